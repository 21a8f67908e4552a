#include "cbias/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

#include "cbias/errors.hpp"

namespace cbias {

namespace {

// 2x2 matrix whose entries are 0 or a single root of unity.
struct MonoMatrix {
  std::optional<std::int64_t> e[2][2];
};

MonoMatrix mono_mul(const MonoMatrix& a, const MonoMatrix& b) {
  MonoMatrix out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k) {
        if (!a.e[i][k] || !b.e[k][j]) continue;
        // Both matrices are monomial, so at most one k contributes.
        out.e[i][j] = *a.e[i][k] + *b.e[k][j];
      }
  return out;
}

// rho_j(a^e b^f): a -> diag(z^j, z^-j); b -> [[0, (-1)^j or 1], [1, 0]].
MonoMatrix psi_matrix(const Group& group, std::uint32_t j, Element g) {
  const std::int64_t order = group.rotation_order();
  MonoMatrix rot;
  rot.e[0][0] = static_cast<std::int64_t>(j) * g.exponent % order;
  rot.e[1][1] = (order - *rot.e[0][0]) % order;
  if (!g.flip) return rot;
  MonoMatrix b;
  // b^2 = rho(a^{2^{n-2}}) = (-1)^j in the quaternion case.
  b.e[0][1] = group.family() == Family::Quaternion && (j % 2) ? order / 2 : 0;
  b.e[1][0] = 0;
  return mono_mul(rot, b);
}

int rank_of_rho_minus_one(const Group& group, std::uint32_t j, Element g) {
  const std::int64_t order = group.rotation_order();
  const MonoMatrix m = psi_matrix(group, j, g);
  const int ring = group.n() - 1;
  SparseCyclotomic entry[2][2] = {{SparseCyclotomic(ring), SparseCyclotomic(ring)},
                                  {SparseCyclotomic(ring), SparseCyclotomic(ring)}};
  for (int r = 0; r < 2; ++r)
    for (int c = 0; c < 2; ++c) {
      if (m.e[r][c]) entry[r][c].add_root(*m.e[r][c], 1);
      if (r == c) entry[r][c].add_root(0, -1);
    }
  bool all_zero = true;
  for (auto& row : entry)
    for (auto& x : row) all_zero = all_zero && x.is_zero();
  if (all_zero) return 0;
  // det(rho - 1) = det rho - tr rho + 1
  SparseCyclotomic det(ring);
  det.add_root(0, 1);
  for (int r = 0; r < 2; ++r)
    if (m.e[r][r]) det.add_root(*m.e[r][r], -1);
  if (m.e[0][0] && m.e[1][1]) det.add_root(*m.e[0][0] + *m.e[1][1], 1);
  if (m.e[0][1] && m.e[1][0]) det.add_root(*m.e[0][1] + *m.e[1][0] + order / 2, 1);
  return det.is_zero() ? 1 : 2;
}

bool is_prime(std::uint64_t p) {
  if (p < 2) return false;
  for (std::uint64_t d = 2; d * d <= p; ++d)
    if (p % d == 0) return false;
  return true;
}

std::vector<std::uint64_t> prime_factors(std::uint64_t d) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t q = 2; q * q <= d; ++q)
    if (d % q == 0) {
      out.push_back(q);
      while (d % q == 0) d /= q;
    }
  if (d > 1) out.push_back(d);
  return out;
}

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Element> generated_subgroup(const Group& group, const std::vector<Element>& gens) {
  std::set<Element> seen{group.identity()};
  std::vector<Element> frontier{group.identity()};
  while (!frontier.empty()) {
    const Element g = frontier.back();
    frontier.pop_back();
    for (const Element s : gens) {
      if (!group.contains(s)) throw ConfigError("inertia generator not in group");
      const Element h = group.multiply(g, s);
      if (seen.insert(h).second) frontier.push_back(h);
    }
  }
  return {seen.begin(), seen.end()};
}

Element cyclic_generator(const Group& group, const std::vector<Element>& gens) {
  // Cheap exits: a single generator, or all generators powers of one of them.
  for (const Element g : gens) {
    const auto order = group.element_order(g);
    bool ok = true;
    for (const Element h : gens) {
      bool found = false;
      Element p = group.identity();
      for (std::uint64_t t = 0; t < order && !found; ++t, p = group.multiply(p, g)) found = p == h;
      ok = ok && found;
    }
    if (ok) return g;
  }
  if (gens.empty()) return group.identity();
  const auto sub = generated_subgroup(group, gens);
  for (const Element g : sub)
    if (group.element_order(g) == sub.size()) return g;
  throw ConfigError("inertia subgroup is not cyclic (tame inertia must be cyclic)");
}

void RamificationData::validate(const Group& group) const {
  if (!tame) throw ConfigError("only tame ramification is supported");
  std::set<std::uint64_t> seen;
  for (const auto& q : primes) {
    if (!q.is_virtual()) {
      if (q.p < 3 || !is_prime(q.p)) throw ConfigError("ramified primes must be odd primes");
      if (!seen.insert(q.p).second) throw ConfigError("ramified primes must be distinct");
    }
    if (!(q.log_p > 0.0)) throw ConfigError("prime size must be positive");
    (void)cyclic_generator(group, q.inertia_generators);
  }
}

int ArithmeticScenario::order_of(CharacterId id) const {
  if (kind.family != Family::Quaternion || W != -1) return 0;
  return frobenius_schur_closed_form(kind.family, id) == -1 ? 1 : 0;
}

int artin_exponent_tame(const Group& group, CharacterId id, const RamifiedPrime& prime) {
  const Element g = cyclic_generator(group, prime.inertia_generators);
  if (id.kind == CharacterId::Kind::Chi) {
    // Degree one: fixed line iff the generator lies in the kernel.
    return character_value(group, id, g).constant == 1 ? 0 : 1;
  }
  // dim V^I = 2 - rank(rho(g) - 1), so n = rank.
  return rank_of_rho_minus_one(group, id.index, g);
}

int artin_exponent_by_averaging(const Group& group, CharacterId id, const RamifiedPrime& prime) {
  const auto inertia = generated_subgroup(group, prime.inertia_generators);
  CyclotomicInt sum(group.n() - 1);
  for (const Element h : inertia) sum += character_value(group, id, h).exact();
  if (!sum.is_integer() || sum.constant() % static_cast<std::int64_t>(inertia.size()) != 0)
    throw InternalError("fixed-space dimension not integral");
  const auto fixed = sum.constant() / static_cast<std::int64_t>(inertia.size());
  return character_degree(id) - static_cast<int>(fixed);
}

ConductorReport artin_conductor_tame(const Group& group, CharacterId id, const RamificationData& ram) {
  ConductorReport out;
  out.character = id;
  for (const auto& q : ram.primes) {
    const int e = artin_exponent_tame(group, id, q);
    out.exponents.emplace_back(q.p, e);
    out.log_conductor += e * q.log_p;
  }
  return out;
}

DiscriminantReport conductor_discriminant(const Group& group, const RamificationData& ram) {
  DiscriminantReport out;
  out.exponents.resize(ram.primes.size());
  for (std::size_t k = 0; k < ram.primes.size(); ++k) out.exponents[k].first = ram.primes[k].p;
  for (const CharacterId id : irreducible_ids(group)) {
    const auto report = artin_conductor_tame(group, id, ram);
    for (std::size_t k = 0; k < ram.primes.size(); ++k)
      out.exponents[k].second += character_degree(id) * report.exponents[k].second;
  }
  for (std::size_t k = 0; k < ram.primes.size(); ++k) out.log_abs += out.exponents[k].second * ram.primes[k].log_p;
  return out;
}

DiscriminantReport discriminant_from_inertia(const Group& group, const RamificationData& ram) {
  DiscriminantReport out;
  const auto order = static_cast<std::int64_t>(group.order());
  for (const auto& q : ram.primes) {
    const auto e = static_cast<std::int64_t>(group.element_order(cyclic_generator(group, q.inertia_generators)));
    out.exponents.emplace_back(q.p, order - order / e);
    out.log_abs += static_cast<double>(order - order / e) * q.log_p;
  }
  return out;
}

std::map<CharacterId, double> log_conductors(const ArithmeticScenario& scenario) {
  if (!scenario.ramification) throw ConfigError("scenario has no ramification data");
  const Group group(scenario.kind);
  std::map<CharacterId, double> out;
  for (const CharacterId id : irreducible_ids(group))
    out[id] = artin_conductor_tame(group, id, *scenario.ramification).log_conductor;
  return out;
}

std::map<CharacterId, int> vanishing_orders(Family family, int W, int level, int n) {
  if (W != 1 && W != -1) throw ConfigError("root number must be +1 or -1");
  if (level < 3 || level > n) throw ConfigError("level must satisfy 3 <= i <= n");
  const Group sub({family, level});
  std::map<CharacterId, int> out;
  for (const CharacterId id : irreducible_ids(sub)) {
    const bool symplectic = frobenius_schur_closed_form(family, id) == -1;
    out[id] = (symplectic && W == -1) ? (1 << (n - level)) : 0;
  }
  return out;
}

ArithmeticScenario scenario_generator(Family family, int n, int W, std::uint64_t seed, double c_lo, double c_hi) {
  if (n > kMaxGroupExponent) throw ConfigError("group exponent n must be <= 20");
  if (W != 1 && W != -1) throw ConfigError("root number must be +1 or -1");
  if (!(c_lo > 0.0) || !(c_hi * n >= c_lo)) throw ConfigError("scaling constants must satisfy 0 < c_lo <= c_hi n");
  ArithmeticScenario s;
  s.kind = {family, n};
  const Group group(s.kind);
  s.W = family == Family::Dihedral ? 1 : W;
  s.scaling = std::pair{c_lo, c_hi};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double size = static_cast<double>(group.order());
  s.log_disc = size * (c_lo + (c_hi * n - c_lo) * unit(rng));
  const double share = 0.05 + 0.25 * unit(rng);

  // Small prime (inertia <b>) takes a fixed share of log|d|, the big one (inertia <a>) the rest.
  RamifiedPrime small{0, 0.0, {group.flip(0)}};
  RamifiedPrime big{0, 0.0, {group.rotation(1)}};
  RamificationData ram;
  ram.primes = {small, big};
  const auto exps = discriminant_from_inertia(group, ram).exponents;
  ram.primes[0].log_p = share * s.log_disc / static_cast<double>(exps[0].second);
  ram.primes[1].log_p = (1.0 - share) * s.log_disc / static_cast<double>(exps[1].second);
  s.ramification = std::move(ram);
  return s;
}

std::uint64_t horizontal_discriminant(std::size_t d_index) {
  std::size_t seen = 0;
  for (std::uint64_t d = 5;; d += 4) {
    bool squarefree = true;
    for (std::uint64_t q = 3; q * q <= d && squarefree; q += 2) squarefree = d % (q * q) != 0;
    if (!squarefree) continue;
    if (seen++ == d_index) return d;
  }
}

ArithmeticScenario horizontal_scenario(std::size_t d_index, double f_value, int W) {
  if (!(f_value > 0.0)) throw ConfigError("f must be positive");
  if (W != 1 && W != -1) throw ConfigError("root number must be +1 or -1");
  ArithmeticScenario s;
  s.kind = {Family::Quaternion, 3};
  s.W = W;
  const Group group(s.kind);
  RamificationData ram;
  for (const std::uint64_t p : prime_factors(horizontal_discriminant(d_index)))
    ram.primes.push_back({p, std::log(static_cast<double>(p)), {group.flip(0)}});
  // Stand-in for the smallest prime above e^{f^3}.
  ram.primes.push_back({0, f_value * f_value * f_value, {group.rotation(1)}});
  s.log_disc = conductor_discriminant(group, ram).log_abs;
  s.ramification = std::move(ram);
  return s;
}

void save_scenario(std::ostream& out, const ArithmeticScenario& s) {
  const Group group(s.kind);
  out << "# scenario\n";
  out << "family = " << family_name(s.kind.family) << '\n';
  out << "n = " << s.kind.n << '\n';
  out << "W = " << s.W << '\n';
  out << "log_disc = " << fmt17(s.log_disc) << '\n';
  if (s.scaling) out << "scaling = " << fmt17(s.scaling->first) << ' ' << fmt17(s.scaling->second) << '\n';
  if (s.ramification) {
    for (const auto& q : s.ramification->primes) {
      std::string gens;
      for (const Element g : q.inertia_generators) gens += (gens.empty() ? "" : ",") + group.element_name(g);
      if (gens.empty()) gens = "1";
      if (q.is_virtual()) out << "virtual_prime = " << fmt17(q.log_p) << ' ' << gens << '\n';
      else out << "prime = " << q.p << ' ' << gens << '\n';
    }
  }
}

ArithmeticScenario load_scenario(std::istream& in) {
  ArithmeticScenario s;
  std::optional<Family> family;
  std::optional<int> n;
  std::vector<std::pair<std::size_t, std::string>> prime_lines, virtual_lines;
  bool have_disc = false;
  std::string line;
  std::size_t lineno = 0;
  auto parse_double = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected a number, got '" + text + "'");
    }
    if (used != text.size()) throw ParseError(lineno, "trailing characters after number");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "family") family = parse_family(value);
      else if (key == "n") n = static_cast<int>(parse_double(value));
      else if (key == "W") s.W = static_cast<int>(parse_double(value));
      else if (key == "log_disc") {
        s.log_disc = parse_double(value);
        have_disc = true;
      } else if (key == "scaling") {
        std::istringstream ss(value);
        std::string a, b;
        ss >> a >> b;
        s.scaling = std::pair{parse_double(a), parse_double(b)};
      } else if (key == "prime") prime_lines.emplace_back(lineno, value);
      else if (key == "virtual_prime") virtual_lines.emplace_back(lineno, value);
      else throw ParseError(lineno, "unknown key '" + key + "'");
    } catch (const ConfigError& e) {
      throw ParseError(lineno, e.what());
    }
  }
  if (!family || !n) throw ParseError(lineno, "scenario needs family and n");
  s.kind = {*family, *n};
  if (s.W != 1 && s.W != -1) throw ParseError(lineno, "W must be +1 or -1");
  const Group group(s.kind);
  // Keep file order: real and virtual primes are interleaved by line number.
  std::vector<std::pair<std::size_t, RamifiedPrime>> primes;
  auto parse_gens = [&](std::size_t at, const std::string& text) {
    std::vector<Element> gens;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        const Element g = group.parse_element(trim(item));
        if (g != group.identity()) gens.push_back(g);
      } catch (const ConfigError& e) {
        throw ParseError(at, e.what());
      }
    }
    return gens;
  };
  for (const auto& [at, text] : prime_lines) {
    std::istringstream ss(text);
    std::string p, gens;
    ss >> p >> gens;
    lineno = at;
    const double v = parse_double(p);
    if (v < 3 || v != std::floor(v)) throw ParseError(at, "prime must be an odd integer >= 3");
    const auto pv = static_cast<std::uint64_t>(v);
    primes.emplace_back(at, RamifiedPrime{pv, std::log(static_cast<double>(pv)), parse_gens(at, gens)});
  }
  for (const auto& [at, text] : virtual_lines) {
    std::istringstream ss(text);
    std::string lp, gens;
    ss >> lp >> gens;
    lineno = at;
    primes.emplace_back(at, RamifiedPrime{0, parse_double(lp), parse_gens(at, gens)});
  }
  if (!primes.empty()) {
    std::sort(primes.begin(), primes.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    RamificationData ram;
    for (auto& [at, q] : primes) ram.primes.push_back(std::move(q));
    ram.validate(group);
    if (!have_disc) s.log_disc = conductor_discriminant(group, ram).log_abs;
    s.ramification = std::move(ram);
  } else if (!have_disc) {
    throw ParseError(lineno, "scenario needs primes or log_disc");
  }
  return s;
}

void save_scenario_file(const std::string& path, const ArithmeticScenario& scenario) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path + "'");
  save_scenario(out, scenario);
}

ArithmeticScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  return load_scenario(in);
}

}  // namespace cbias
