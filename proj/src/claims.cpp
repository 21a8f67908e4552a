#include "cbias/claims.hpp"

#include <cmath>

#include "cbias/errors.hpp"

namespace cbias {

namespace {

using Kind = ClassLabel::Kind;

int rank(ClassLabel c) {
  switch (c.kind) {
    case Kind::One: return 0;
    case Kind::MinusOne: return 1;
    case Kind::Power: return 2;
    default: return 3;
  }
}

bool is_flip(ClassLabel c) { return c.kind == Kind::FlipEven || c.kind == Kind::FlipOdd; }

std::int64_t parity_sign(std::uint32_t k) { return k % 2 ? -1 : 1; }

// Puts the pair in the printed orientation; returns true when it was swapped.
bool orient(ClassLabel& a, ClassLabel& b) {
  if (rank(a) > rank(b) || (rank(a) == rank(b) && b < a)) {
    std::swap(a, b);
    return true;
  }
  return false;
}

Expectation mirror(Expectation e) {
  switch (e) {
    case Expectation::ExtremeLow: return Expectation::ExtremeHigh;
    case Expectation::ExtremeHigh: return Expectation::ExtremeLow;
    case Expectation::ModerateLow: return Expectation::ModerateHigh;
    case Expectation::ModerateHigh: return Expectation::ModerateLow;
    default: return e;
  }
}

}  // namespace

std::optional<std::int64_t> printed_tower_mean(Family family, int n, int level, int W, ClassLabel c1,
                                               ClassLabel c2) {
  if (c1 == c2) return std::nullopt;
  const bool swapped = orient(c1, c2);
  const std::int64_t h = std::int64_t{1} << (level - 1);
  const std::int64_t u = family == Family::Quaternion ? (std::int64_t{1} << (n - 2)) * (1 - W) : 0;
  const bool dihedral = family == Family::Dihedral;
  std::int64_t v = 0;
  if (c1.kind == Kind::One && c2.kind == Kind::MinusOne) v = dihedral ? -h + 1 : -2 * u + h;
  else if (c1.kind == Kind::One && c2.kind == Kind::Power) v = dihedral ? -h + parity_sign(c2.k) : -u + parity_sign(c2.k) - 1;
  else if (c1.kind == Kind::One && is_flip(c2)) v = dihedral ? -h - 1 : -u - 2;
  else if (c1.kind == Kind::MinusOne && c2.kind == Kind::Power)
    v = dihedral ? parity_sign(c2.k) - 1 : u - 1 - parity_sign(c2.k) - h;
  else if (c1.kind == Kind::MinusOne && is_flip(c2)) v = dihedral ? -2 : u - 2 - h;
  else if (c1.kind == Kind::Power && c2.kind == Kind::Power) v = parity_sign(c2.k) - parity_sign(c1.k);
  else if (c1.kind == Kind::Power && is_flip(c2)) v = -parity_sign(c1.k) - 1;
  else if (is_flip(c1) && is_flip(c2)) v = 0;
  else return std::nullopt;
  return swapped ? -v : v;
}

bool known_open_question(Family family, ClassLabel c1, ClassLabel c2) {
  orient(c1, c2);
  if (family == Family::Dihedral) return c1.kind == Kind::One;
  return c1.kind == Kind::MinusOne && c2.kind == Kind::Power;
}

std::vector<H8Row> h8_table(int o) {
  const auto chi = [](std::uint32_t i) { return CharacterId::chi(i); };
  const CharacterId psi = CharacterId::psi(1);
  const ClassLabel one = ClassLabel::one(), m1 = ClassLabel::minus_one();
  const ClassLabel ijk[3] = {ClassLabel::power(1), ClassLabel::flip_even(), ClassLabel::flip_odd()};
  const char* kSumNote = "printed sum runs over chi != chi_b; chi0 carries weight 0 and is left out";
  std::vector<H8Row> rows;
  rows.push_back({one, m1, 4 * (1 - 2 * o), {{psi, 16}}, ""});
  for (int b = 0; b < 3; ++b) {
    H8Row r{one, ijk[b], -2 * (1 + 2 * o), {{psi, 4}}, kSumNote};
    for (std::uint32_t c = 1; c <= 3; ++c)
      if (c != static_cast<std::uint32_t>(b + 1)) r.paper_variance[chi(c)] = 4;
    rows.push_back(r);
  }
  for (int b = 0; b < 3; ++b) {
    H8Row r{m1, ijk[b], 2 * (2 * o - 3), {{psi, 4}}, kSumNote};
    for (std::uint32_t c = 1; c <= 3; ++c)
      if (c != static_cast<std::uint32_t>(b + 1)) r.paper_variance[chi(c)] = 4;
    rows.push_back(r);
  }
  for (int a = 0; a < 3; ++a)
    for (int b = a + 1; b < 3; ++b)
      rows.push_back({ijk[a], ijk[b], 0, {{chi(a + 1), 4}, {chi(b + 1), 4}}, ""});
  return rows;
}

std::string h8_class_name(ClassLabel c) {
  switch (c.kind) {
    case Kind::One: return "1";
    case Kind::MinusOne: return "-1";
    case Kind::Power: return "i";
    case Kind::FlipEven: return "j";
    case Kind::FlipOdd: return "k";
  }
  return "?";
}

std::string h8_character_name(CharacterId id) {
  if (id.kind == CharacterId::Kind::Psi) return "psi";
  static const char* names[] = {"chi0", "chi_i", "chi_j", "chi_k"};
  return id.index < 4 ? names[id.index] : "?";
}

std::string_view expectation_name(Expectation e) {
  switch (e) {
    case Expectation::ExtremeLow: return "extreme-toward-0";
    case Expectation::ExtremeHigh: return "extreme-toward-1";
    case Expectation::ModerateLow: return "moderate-below-half";
    case Expectation::ModerateHigh: return "moderate-above-half";
    case Expectation::Half: return "exactly-half";
    case Expectation::Undetermined: return "undetermined";
  }
  return "?";
}

std::optional<int> expected_side(Expectation e) {
  switch (e) {
    case Expectation::ExtremeLow:
    case Expectation::ModerateLow: return -1;
    case Expectation::ExtremeHigh:
    case Expectation::ModerateHigh: return 1;
    case Expectation::Half: return 0;
    case Expectation::Undetermined: return std::nullopt;
  }
  return std::nullopt;
}

TowerClaim tower_claim(Family family, int n, int W, ClassLabel ca, ClassLabel cb) {
  (void)n;
  if (ca == cb) throw ConfigError("a race needs two distinct classes");
  if (W != 1 && W != -1) throw ConfigError("root number must be +1 or -1");
  const bool swapped = orient(ca, cb);
  using E = Expectation;
  TowerClaim t;
  auto set = [&](E e, std::string row) {
    t.paper = t.formula_faithful = e;
    t.row = std::move(row);
  };
  const bool same_parity = ca.kind == Kind::Power && cb.kind == Kind::Power && (ca.k % 2) == (cb.k % 2);
  if (family == Family::Dihedral) {
    if (ca.kind == Kind::One) set(E::ExtremeLow, cb.kind == Kind::Power ? "C1 vs Cr^k" : "C1 vs C-1/Cs/Crs");
    else if (ca.kind == Kind::MinusOne && cb.kind == Kind::Power)
      set(cb.k % 2 == 0 ? E::Half : E::Undetermined, "C-1 vs Cr^k");
    else if (ca.kind == Kind::MinusOne) set(E::ModerateLow, "C-1 vs Cs/Crs");
    else if (ca.kind == Kind::Power && cb.kind == Kind::Power) set(same_parity ? E::Half : E::Undetermined, "Cr^k vs Cr^l");
    else if (ca.kind == Kind::Power) set(ca.k % 2 ? E::Half : E::Undetermined, "Cr^k vs Cs/Crs");
    else set(E::Half, "Cs vs Crs");
  } else {
    const bool plus = W == 1;
    if (ca.kind == Kind::One && cb.kind == Kind::MinusOne) set(plus ? E::ExtremeHigh : E::ExtremeLow, "C-1 vs C1");
    else if (ca.kind == Kind::One && cb.kind == Kind::Power) {
      if (!plus) set(E::ExtremeLow, "C1 vs Cx^k, W=-1");
      else set(cb.k % 2 == 0 ? E::Half : E::Undetermined, "C1 vs Cx^k, W=1");
    } else if (ca.kind == Kind::One) set(plus ? E::ModerateLow : E::ExtremeLow, "C1 vs Cy/Cxy");
    else if (ca.kind == Kind::MinusOne && cb.kind == Kind::Power) {
      if (plus) set(E::ExtremeLow, "C-1 vs Cx^k, W=1");
      else {
        // The printed row inherits the sign slip of the mean table; the formula mean is
        // (-1)^k - 1 here.
        t.row = "C-1 vs Cx^k, W=-1";
        t.open_question = true;
        t.paper = cb.k % 2 ? E::Half : E::Undetermined;
        t.formula_faithful = cb.k % 2 ? E::ModerateLow : E::Half;
      }
    } else if (ca.kind == Kind::MinusOne) set(plus ? E::ExtremeLow : E::ModerateLow, "C-1 vs Cy/Cxy");
    else if (ca.kind == Kind::Power && cb.kind == Kind::Power) set(same_parity ? E::Half : E::Undetermined, "Cx^k vs Cx^l");
    else if (ca.kind == Kind::Power) set(ca.k % 2 ? E::Half : E::Undetermined, "Cx^k vs Cy/Cxy");
    else set(E::Half, "Cy vs Cxy");
  }
  if (swapped) {
    t.paper = mirror(t.paper);
    t.formula_faithful = mirror(t.formula_faithful);
  }
  return t;
}

int printed_monotone_direction(Family family, int W) {
  return family == Family::Quaternion && W == 1 ? 1 : -1;
}

std::vector<std::pair<int, int>> qualifying_level_pairs(int n, double eps) {
  std::vector<std::pair<int, int>> out;
  const double i_max = n * (1.0 + eps) / 2.0;
  const double j_min = n * (1.0 + 3.0 * eps) / 2.0;
  for (int i = 3; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j)
      if (i <= i_max + 1e-12 && j >= j_min - 1e-12) out.emplace_back(i, j);
  return out;
}

}  // namespace cbias
