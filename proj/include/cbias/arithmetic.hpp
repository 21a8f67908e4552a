#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbias/characters.hpp"
#include "cbias/group.hpp"

namespace cbias {

/// A ramified prime with its inertia subgroup, given by generators (must generate a cyclic group).
/// p == 0 marks a virtual prime: only its logarithm is known (large synthetic scenarios).
struct RamifiedPrime {
  std::uint64_t p = 0;
  double log_p = 0.0;  // log(p) for real primes, the stored size for virtual ones
  std::vector<Element> inertia_generators;

  bool is_virtual() const { return p == 0; }
};

struct RamificationData {
  std::vector<RamifiedPrime> primes;
  bool tame = true;

  /// Odd distinct primes, positive logs, cyclic inertia inside the group.
  void validate(const Group& group) const;
};

/// Elements of the subgroup generated by gens.
std::vector<Element> generated_subgroup(const Group& group, const std::vector<Element>& gens);
/// A generator of <gens>; throws ConfigError if the subgroup is not cyclic.
Element cyclic_generator(const Group& group, const std::vector<Element>& gens);

struct ArithmeticScenario {
  GroupKind kind;
  std::optional<RamificationData> ramification;  // explicit scenarios only
  int W = 1;                                      // shared symplectic root number
  double log_disc = 0.0;
  /// Generator constants when the scenario was drawn in the scaled regime.
  std::optional<std::pair<double, double>> scaling;

  bool explicit_ramification() const { return ramification.has_value(); }
  /// Central vanishing order of a top-level irreducible: (1 - W)/2 for symplectic, else 0.
  int order_of(CharacterId id) const;
};

struct ConductorReport {
  CharacterId character;
  std::vector<std::pair<std::uint64_t, int>> exponents;  // per ramified prime, same order as the data
  double log_conductor = 0.0;
};

/// n(chi, p) = chi(1) - dim V^I, from the rank of rho(g) - 1 for a generator g of the inertia group.
int artin_exponent_tame(const Group& group, CharacterId id, const RamifiedPrime& prime);
/// Same exponent via (1/|I|) sum_{h in I} chi(h); used as an independent check.
int artin_exponent_by_averaging(const Group& group, CharacterId id, const RamifiedPrime& prime);

ConductorReport artin_conductor_tame(const Group& group, CharacterId id, const RamificationData& ram);

struct DiscriminantReport {
  std::vector<std::pair<std::uint64_t, std::int64_t>> exponents;  // per ramified prime
  double log_abs = 0.0;
};

/// |d| = prod_chi A(chi)^{chi(1)}.
DiscriminantReport conductor_discriminant(const Group& group, const RamificationData& ram);
/// Tame discriminant straight from ramification indices: exponent |G| - |G|/e_p.
DiscriminantReport discriminant_from_inertia(const Group& group, const RamificationData& ram);

/// log A(chi) for every top-level irreducible of the scenario (explicit or generated).
std::map<CharacterId, double> log_conductors(const ArithmeticScenario& scenario);

/// Central orders of the level-i irreducibles L(s, chi, L/K_i) under LI+.
std::map<CharacterId, int> vanishing_orders(Family family, int W, int level, int n);

/// Scaled-regime scenario: two virtual ramified primes, log_disc uniform in [c_lo 2^n, c_hi n 2^n].
ArithmeticScenario scenario_generator(Family family, int n, int W, std::uint64_t seed, double c_lo = 0.5,
                                      double c_hi = 1.0);

/// Squarefree d = 1 mod 4, d >= 5, in increasing order; index 0 gives 5.
std::uint64_t horizontal_discriminant(std::size_t d_index);
/// H8 scenario: primes of d with inertia <y>, plus a virtual prime of log f^3 with inertia <x>.
ArithmeticScenario horizontal_scenario(std::size_t d_index, double f_value, int W);

void save_scenario(std::ostream& out, const ArithmeticScenario& scenario);
ArithmeticScenario load_scenario(std::istream& in);
void save_scenario_file(const std::string& path, const ArithmeticScenario& scenario);
ArithmeticScenario load_scenario_file(const std::string& path);

}  // namespace cbias
