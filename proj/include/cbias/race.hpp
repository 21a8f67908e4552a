#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cbias/arithmetic.hpp"
#include "cbias/characters.hpp"
#include "cbias/group.hpp"
#include "cbias/zeros.hpp"

namespace cbias {

/// One Chebotarev race L/K_i between two level-i classes. i == n means base Q.
struct RaceSpec {
  ArithmeticScenario scenario;
  int level = 3;
  ClassLabel c1;
  ClassLabel c2;
  /// Central orders of the level-i irreducibles; LI+ orders from the scenario when unset.
  std::optional<std::map<CharacterId, int>> orders;

  GroupKind kind() const { return scenario.kind; }
  std::map<CharacterId, int> vanishing() const;
  /// Range checks and C1 != C2; throws ConfigError. Does not check fusion.
  void validate() const;
};

/// Shorthand for a race in a bare group: no ramification, only W.
RaceSpec make_race(GroupKind kind, int level, ClassLabel c1, ClassLabel c2, int W = 1);

/// 2 sum_{chi != chi0} chi(C) ord(chi), exact. Characters missing from orders count as 0.
std::int64_t z_value(const Group& group, ClassLabel c, const std::map<CharacterId, int>& orders);
/// |C^{1/2}| / |C|, always an integer for these families.
std::int64_t square_root_ratio(const Group& group, ClassLabel c);

bool race_defined(const Tower& tower, int level, ClassLabel c1, ClassLabel c2);

/// s(C2) - s(C1) + z(C2) - z(C1); RaceUndefined when C1+ == C2+.
std::int64_t race_mean(const RaceSpec& spec);

/// |lambda(C2+) - lambda(C1+)| for every top-group irreducible (zeros included).
std::map<CharacterId, double> race_weights(const Tower& tower, int level, ClassLabel c1, ClassLabel c2);
std::map<CharacterId, double> race_weights(const RaceSpec& spec);

/// 2 sum_lambda w_lambda^2 b0(lambda), with b0 the one-sided sum over gamma > 0.
/// ConfigError when a weighted character has no b0 entry.
double race_variance(const std::map<CharacterId, double>& weights, const std::map<CharacterId, double>& b0_map);
double race_variance(const RaceSpec& spec, const std::map<CharacterId, double>& b0_map);
/// mean / sqrt(variance); ConfigError when the variance is not positive.
double bias_factor(double mean, double variance);

/// X = mean + sum_k r_k cos(theta_k) + (optional) Gaussian remainder of variance tail_variance.
struct RaceModel {
  std::int64_t mean = 0;
  std::vector<double> terms;  // descending
  std::map<CharacterId, double> weights;
  /// Variance of the zeros past each set's horizon, from the counting main term.
  double tail_variance = 0.0;
  double variance = 0.0;  // sum r^2 / 2 + tail_variance
  double bias_factor = 0.0;

  double explicit_variance() const;
  /// Synthetic model straight from amplitudes; terms get sorted.
  static RaceModel from_terms(std::int64_t mean, std::vector<double> terms, double tail_variance = 0.0);
};

/// Amplitudes 2 w / sqrt(1/4 + gamma^2) for every zero of every weighted character.
RaceModel term_list(const RaceSpec& spec, const std::map<CharacterId, ZeroSet>& zero_sets);
/// Same, for weights already computed (shared across levels of a tower).
RaceModel term_list(std::int64_t mean, const std::map<CharacterId, double>& weights,
                    const std::map<CharacterId, ZeroSet>& zero_sets);

/// One-sided b0 for every set in the map.
std::map<CharacterId, double> b0_map(const std::map<CharacterId, ZeroSet>& zero_sets);

/// Mismatch is a difference outside the known open-question rows.
enum class RowStatus { Match, OpenQuestion, Mismatch, Undefined };
std::string_view row_status_name(RowStatus status);

struct MeanRow {
  ClassLabel c1;
  ClassLabel c2;
  std::optional<std::int64_t> formula;  // unset when the race is undefined
  std::optional<std::int64_t> paper;
  RowStatus status = RowStatus::Match;
};

/// Every unordered pair of level-i classes in canonical order, with the closed-form values
/// printed for the towers alongside.
std::vector<MeanRow> mean_table(Family family, int n, int level, int W);

}  // namespace cbias
