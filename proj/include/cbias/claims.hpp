#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbias/characters.hpp"
#include "cbias/group.hpp"

// Published claims, kept as data so experiments and acceptance checks read the same rows.

namespace cbias {

/// Closed-form tower mean as printed, oriented (c1, c2); nullopt when no printed row covers the pair.
std::optional<std::int64_t> printed_tower_mean(Family family, int n, int level, int W, ClassLabel c1,
                                               ClassLabel c2);
/// Rows whose printed value is known to differ from the mean formula: dihedral rows containing C1
/// and the quaternion (C-1, x^k) row.
bool known_open_question(Family family, ClassLabel c1, ClassLabel c2);

/// H8 over Q. Classes One, MinusOne, Power(1), FlipEven, FlipOdd play 1, -1, i, j, k.
struct H8Row {
  ClassLabel a;
  ClassLabel b;
  std::int64_t paper_mean = 0;
  /// Coefficient of the two-sided B0(lambda) in the printed variance.
  std::map<CharacterId, int> paper_variance;
  std::string note;
};

/// The ten races of H8 for central order o of L(s, psi).
std::vector<H8Row> h8_table(int o);
/// i, j, k labels: Power(1) -> "i", FlipEven -> "j", FlipOdd -> "k".
std::string h8_class_name(ClassLabel c);
/// chi_i = chi1, chi_j = chi2, chi_k = chi3, psi = psi1.
std::string h8_character_name(CharacterId id);

enum class Expectation {
  ExtremeLow,     // delta tiny
  ExtremeHigh,    // 1 - delta tiny
  ModerateLow,    // 0 < 1/2 - delta small
  ModerateHigh,
  Half,           // delta == 1/2
  Undetermined,   // no estimate claimed
};
std::string_view expectation_name(Expectation e);
/// Sign of delta - 1/2 implied: -1, 0, +1; nullopt for Undetermined.
std::optional<int> expected_side(Expectation e);

/// One classification row at base Q for a pair (c_a, c_b), read as delta(C_a, C_b).
struct TowerClaim {
  Expectation paper = Expectation::Undetermined;
  /// Differs from paper only on the open-question row.
  Expectation formula_faithful = Expectation::Undetermined;
  bool open_question = false;
  std::string row;  // short label of the matching row
};

/// Rows for dihedral or quaternion towers over Q (W ignored for dihedral).
TowerClaim tower_claim(Family family, int n, int W, ClassLabel ca, ClassLabel cb);

/// Printed monotonicity: for i < j qualifying, delta_j < delta_i (sign -1), or 1 - delta_j < 1 - delta_i
/// (sign +1, i.e. delta_j > delta_i).
int printed_monotone_direction(Family family, int W);
/// Level pairs (i, j), 3 <= i < j <= n, with i <= n(1+eps)/2 and j >= n(1+3 eps)/2.
std::vector<std::pair<int, int>> qualifying_level_pairs(int n, double eps);

}  // namespace cbias
