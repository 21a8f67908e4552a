#include "cbias/characters.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include "cbias/errors.hpp"

namespace cbias {

namespace {

int ring_of(const Group& group) { return group.n() - 1; }

std::uint32_t psi_count(const Group& group) { return group.half_rotation() - 1; }

void require_valid(const Group& group, CharacterId id) {
  if (id.kind == CharacterId::Kind::Chi) {
    if (id.index > 3) throw ConfigError("chi index must be 0..3");
  } else if (id.index < 1 || id.index > psi_count(group)) {
    throw ConfigError("psi index out of range for this group");
  }
}

int sign(std::int64_t e) { return (e & 1) ? -1 : 1; }

// Divide every coefficient by d; the sum must be divisible.
CyclotomicInt exact_divide(const CyclotomicInt& value, std::int64_t d) {
  CyclotomicInt out(value.log2_order());
  const auto& c = value.coefficients();
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] % d != 0) throw InternalError("induced character value not integral");
    if (c[i] != 0) out += CyclotomicInt::zeta_power(value.log2_order(), static_cast<std::int64_t>(i)) * (c[i] / d);
  }
  return out;
}

}  // namespace

std::string character_name(CharacterId id) {
  return (id.kind == CharacterId::Kind::Chi ? "chi" : "psi") + std::to_string(id.index);
}

CharacterId parse_character(std::string_view text) {
  CharacterId id;
  if (text.starts_with("chi")) id.kind = CharacterId::Kind::Chi;
  else if (text.starts_with("psi")) id.kind = CharacterId::Kind::Psi;
  else throw ConfigError("unknown character '" + std::string(text) + "'");
  text.remove_prefix(3);
  if (text.starts_with("_")) text.remove_prefix(1);
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, id.index);
  if (text.empty() || ec != std::errc{} || ptr != end) throw ConfigError("bad character index");
  if (id.kind == CharacterId::Kind::Chi && id.index > 3) throw ConfigError("chi index must be 0..3");
  if (id.kind == CharacterId::Kind::Psi && id.index == 0) throw ConfigError("psi index must be >= 1");
  return id;
}

std::string_view fs_type_name(FsType type) {
  switch (type) {
    case FsType::Orthogonal: return "orthogonal";
    case FsType::Unitary: return "unitary";
    case FsType::Symplectic: return "symplectic";
  }
  return "?";
}

CyclotomicInt CharacterValue::exact() const {
  CyclotomicInt out = CyclotomicInt::integer(log2_order, constant);
  if (cos_arg) out += CyclotomicInt::two_cos(log2_order, *cos_arg);
  return out;
}

double CharacterValue::to_double() const {
  double v = static_cast<double>(constant);
  if (cos_arg) {
    const auto order = std::int64_t{1} << log2_order;
    std::int64_t a = ((*cos_arg % order) + order) % order;
    a = std::min(a, order - a);
    // fold into [0, pi/2] so that symmetric arguments give bit-identical magnitudes
    const bool negate = 4 * a > order;
    if (negate) a = order / 2 - a;
    const double c = 2.0 * std::cos(2.0 * std::numbers::pi * static_cast<double>(a) / static_cast<double>(order));
    v += negate ? -c : c;
  }
  return v;
}

ClassFunction Character::exact_values() const {
  ClassFunction out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(v.exact());
  return out;
}

int character_degree(CharacterId id) { return id.kind == CharacterId::Kind::Chi ? 1 : 2; }

std::size_t irreducible_count(const Group& group) { return group.half_rotation() + 3; }

std::vector<CharacterId> irreducible_ids(const Group& group) {
  std::vector<CharacterId> out;
  out.reserve(irreducible_count(group));
  for (std::uint32_t i = 0; i < 4; ++i) out.push_back(CharacterId::chi(i));
  for (std::uint32_t j = 1; j <= psi_count(group); ++j) out.push_back(CharacterId::psi(j));
  return out;
}

CharacterValue character_value(const Group& group, CharacterId id, Element g) {
  require_valid(group, id);
  CharacterValue v;
  v.log2_order = ring_of(group);
  const std::int64_t e = g.exponent;
  if (id.kind == CharacterId::Kind::Chi) {
    // chi1: b -> -1; chi2: a -> -1; chi3: both.
    switch (id.index) {
      case 0: v.constant = 1; break;
      case 1: v.constant = g.flip ? -1 : 1; break;
      case 2: v.constant = sign(e); break;
      default: v.constant = sign(e + (g.flip ? 1 : 0)); break;
    }
    return v;
  }
  if (g.flip) return v;
  const auto order = static_cast<std::int64_t>(group.rotation_order());
  const std::int64_t a = (static_cast<std::int64_t>(id.index) * e) % order;
  // Collapse the integer cases so the stored form is canonical.
  if (a == 0) v.constant = 2;
  else if (a == order / 2) v.constant = -2;
  else v.cos_arg = a;
  return v;
}

double character_value_double(const Group& group, CharacterId id, Element g) {
  return character_value(group, id, g).to_double();
}

int frobenius_schur_closed_form(Family family, CharacterId id) {
  if (family == Family::Quaternion && id.kind == CharacterId::Kind::Psi && id.index % 2 == 1) return -1;
  return 1;
}

FsType fs_type_from_index(int index) {
  if (index == 1) return FsType::Orthogonal;
  if (index == -1) return FsType::Symplectic;
  if (index == 0) return FsType::Unitary;
  throw InternalError("Frobenius-Schur index outside {-1,0,1}");
}

int frobenius_schur_brute_force(const Group& group, const Character& chi) {
  CyclotomicInt sum(ring_of(group));
  for (const Element g : group.elements())
    sum += chi.value(group, group.class_of(group.multiply(g, g))).exact();
  if (!sum.is_integer()) throw InternalError("Frobenius-Schur sum not rational");
  const auto total = sum.constant();
  const auto order = static_cast<std::int64_t>(group.order());
  if (total % order != 0) throw InternalError("Frobenius-Schur sum not a multiple of |G|");
  return static_cast<int>(total / order);
}

bool is_faithful(const Group& group, const Character& chi) {
  const CyclotomicInt at_one = CyclotomicInt::integer(ring_of(group), chi.degree);
  for (const ClassLabel c : group.classes()) {
    if (c.kind == ClassLabel::Kind::One) continue;
    if (chi.value(group, c).exact() == at_one) return false;
  }
  return true;
}

Rational inner_product(const Group& group, const ClassFunction& a, const ClassFunction& b) {
  if (a.size() != group.class_count() || b.size() != group.class_count())
    throw ConfigError("class function size does not match group");
  const int m = std::max(a.front().log2_order(), b.front().log2_order());
  CyclotomicInt sum(m);
  for (std::size_t c = 0; c < a.size(); ++c) {
    const auto size = static_cast<std::int64_t>(group.class_size(group.classes()[c]));
    sum += (a[c].lift(m) * b[c].lift(m).conj()) * size;
  }
  if (!sum.is_integer()) throw InternalError("inner product not rational");
  return Rational(sum.constant(), static_cast<std::int64_t>(group.order()));
}

CharacterTable::CharacterTable(const Group& group) : group_(group), ring_(ring_of(group)) {
  for (const CharacterId id : irreducible_ids(group)) {
    Character chi;
    chi.id = id;
    chi.degree = character_degree(id);
    chi.values.reserve(group.class_count());
    for (const ClassLabel c : group.classes()) chi.values.push_back(character_value(group, id, group.representative(c)));
    chi.fs_type = fs_type_from_index(frobenius_schur_closed_form(group.family(), id));
    // psi_j sends a to a primitive 2^{n-1}/gcd root; faithful exactly for odd j, degree-one never.
    chi.faithful = id.kind == CharacterId::Kind::Psi && id.index % 2 == 1;
    characters_.push_back(std::move(chi));
  }
}

std::size_t CharacterTable::index_of(CharacterId id) const {
  require_valid(group_, id);
  return id.kind == CharacterId::Kind::Chi ? id.index : 3 + id.index;
}

const Character& CharacterTable::operator[](CharacterId id) const { return characters_[index_of(id)]; }

std::string CharacterTable::to_csv() const {
  std::ostringstream out;
  out << "character";
  for (const ClassLabel c : group_.classes()) out << ',' << class_name(group_.family(), c);
  out << '\n';
  char buf[32];
  for (const auto& chi : characters_) {
    out << character_name(chi.id);
    for (const auto& v : chi.values) {
      double x = v.to_double();
      if (std::abs(x) < 1e-14) x = 0.0;
      std::snprintf(buf, sizeof buf, "%.17g", x);
      out << ',' << buf;
    }
    out << '\n';
  }
  return out.str();
}

int InducedDecomposition::degree() const {
  int d = 0;
  for (const auto& [id, mult] : components) d += mult * character_degree(id);
  return d;
}

InducedDecomposition induce(const Tower& tower, int level, CharacterId source) {
  const Group& sub = tower.level(level);
  require_valid(sub, source);
  InducedDecomposition out;
  out.source_level = level;
  out.source = source;
  if (level == tower.n()) {
    out.components[source] = 1;
    return out;
  }
  const std::uint32_t modulus = std::uint32_t{1} << (level - 1);
  const std::uint32_t top_psi = tower.top().half_rotation() - 1;
  auto add_psi_residue = [&](std::uint32_t residue) {
    for (std::uint32_t l = 1; l <= top_psi; ++l)
      if (l % modulus == residue % modulus) out.components[CharacterId::psi(l)] += 1;
  };
  if (source.kind == CharacterId::Kind::Psi) {
    add_psi_residue(source.index);
    add_psi_residue(modulus - source.index);
    return out;
  }
  switch (source.index) {
    case 0:
      out.components[CharacterId::chi(0)] = 1;
      out.components[CharacterId::chi(2)] = 1;
      add_psi_residue(0);
      break;
    case 1:
      out.components[CharacterId::chi(1)] = 1;
      out.components[CharacterId::chi(3)] = 1;
      add_psi_residue(0);
      break;
    default:
      add_psi_residue(modulus / 2);
      break;
  }
  return out;
}

ClassFunction induce_class_function(const Tower& tower, int level, const Character& source) {
  const Group& top = tower.top();
  const Group& sub = tower.level(level);
  const int m = ring_of(top);
  const auto all = top.elements();
  ClassFunction out;
  out.reserve(top.class_count());
  for (const ClassLabel c : top.classes()) {
    const Element g = top.representative(c);
    CyclotomicInt sum(m);
    for (const Element x : all) {
      const Element conj = top.multiply(top.multiply(x, g), top.inverse(x));
      const auto h = tower.to_level(level, conj);
      if (!h) continue;
      sum += source.value(sub, sub.class_of(*h)).exact().lift(m);
    }
    out.push_back(exact_divide(sum, static_cast<std::int64_t>(sub.order())));
  }
  return out;
}

InducedDecomposition decompose(const CharacterTable& top, int level, CharacterId source,
                               const ClassFunction& induced) {
  InducedDecomposition out;
  out.source_level = level;
  out.source = source;
  for (const auto& chi : top.characters()) {
    const Rational r = inner_product(top.group(), induced, chi.exact_values());
    if (!r.is_integer() || r.num() < 0) throw InternalError("induced multiplicity is not a natural number");
    if (r.num() > 0) out.components[chi.id] = static_cast<int>(r.num());
  }
  return out;
}

ClassFunction restrict_to_level(const Tower& tower, int level, const ClassFunction& top_values) {
  const Group& top = tower.top();
  const Group& sub = tower.level(level);
  if (top_values.size() != top.class_count()) throw ConfigError("class function size does not match group");
  ClassFunction out;
  out.reserve(sub.class_count());
  for (const ClassLabel c : sub.classes())
    out.push_back(top_values[top.class_index(top.class_of(tower.embed(level, sub.representative(c))))]);
  return out;
}

SrPartition sr_partition(const Tower& tower, int level) {
  const Group& sub = tower.level(level);
  const auto ids = irreducible_ids(sub);
  // Count how many sources hit each top-level constituent.
  std::map<CharacterId, int> hits;
  std::vector<InducedDecomposition> inductions;
  inductions.reserve(ids.size());
  for (const CharacterId id : ids) {
    inductions.push_back(induce(tower, level, id));
    for (const auto& [target, mult] : inductions.back().components) hits[target] += 1;
  }
  SrPartition out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    bool shared = false;
    for (const auto& [target, mult] : inductions[i].components) shared = shared || hits[target] > 1;
    if (!shared) out.s.push_back(ids[i]);
    else if (!ids[i].is_trivial()) out.r.push_back(ids[i]);
  }
  for (const CharacterId id : out.r) out.b1 = std::max(out.b1, character_degree(id));
  out.b2 = static_cast<int>(out.r.size());
  if (level < tower.n()) out.paper_quoted = std::pair{2, 2};
  return out;
}

CyclotomicInt symplectic_value_sum(int level, std::int64_t k) {
  if (level < 3) throw ConfigError("level must be >= 3");
  const std::int64_t limit = (std::int64_t{1} << (level - 2)) - 1;
  if (k < 1 || k > limit) throw ConfigError("k must satisfy 1 <= k <= 2^{i-2}-1");
  const int m = level - 1;
  CyclotomicInt sum(m);
  for (std::int64_t j = 1; j <= limit; j += 2) sum += CyclotomicInt::two_cos(m, j * k);
  return sum;
}

}  // namespace cbias
