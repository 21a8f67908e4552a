#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "cbias/arithmetic.hpp"
#include "cbias/claims.hpp"
#include "cbias/density.hpp"
#include "cbias/race.hpp"
#include "cbias/zeros.hpp"

namespace cbias {

using Json = nlohmann::ordered_json;

struct ZeroSource {
  double horizon = 20.0;                 // t_max of synthetic sets
  std::optional<std::string> directory;  // read <dir>/<character>.zeros instead
};

struct ExperimentConfig {
  std::string experiment = "race";  // h8-table, esp-q, esp-d, horizontal, tabD, tabQ, monotonicity, race
  Family family = Family::Quaternion;
  int n = 3;
  int W = 1;
  std::vector<int> levels;                                 // empty: base Q only
  std::vector<std::pair<ClassLabel, ClassLabel>> pairs;    // empty: every pair
  std::optional<std::string> scenario_file;
  std::uint64_t seed = 1;
  std::uint64_t samples = 100000;
  bool fourier = true;
  DensityConfig density;
  ZeroSource zeros;
  std::vector<double> f_values{1, 2, 3, 4};
  std::size_t d_index = 0;
  double eps = 0.1;
  int n_max = 8;  // table reproduction range

  /// Keys mirror the fields; unknown keys are rejected. Throws ConfigError.
  static ExperimentConfig from_json(const Json& j);
  Json to_json() const;
  /// Ranges and file existence; throws ConfigError.
  void validate() const;
};

struct RaceResult {
  int level = 0;
  ClassLabel c1;
  ClassLabel c2;
  std::string name1;
  std::string name2;
  bool defined = true;
  std::int64_t mean = 0;
  std::optional<std::int64_t> paper_mean;
  double variance = 0.0;
  double tail_variance = 0.0;
  double bias = 0.0;
  std::size_t term_count = 0;
  std::optional<DensityEstimate> mc;
  std::optional<DensityEstimate> fourier;
  std::optional<BoundReport> bounds;  // base Q only
  std::optional<TowerClaim> claim;    // base Q only
  Expectation observed = Expectation::Undetermined;
  std::optional<bool> pass;  // against the formula-faithful claim; unset when nothing is claimed
  std::vector<std::string> notes;

  /// Fourier value when available, else Monte Carlo.
  const DensityEstimate& best() const;
};

struct Verdict {
  std::string name;
  std::string status;  // pass, fail, vacuous, info
  std::string detail;
};

struct ExperimentReport {
  std::string experiment;
  Json config;
  std::vector<RaceResult> races;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<Verdict> verdicts;
  Json extra = Json::object();
  bool internal_inconsistency = false;

  bool passed() const;  // no verdict failed and no inconsistency
  Json to_json() const;
  std::string to_csv() const;
};

/// Zero sets for the given top-level irreducibles; synthetic sets are seeded by (seed, table index).
std::map<CharacterId, ZeroSet> zero_sets_for(const ArithmeticScenario& scenario, const std::vector<CharacterId>& ids,
                                             const ZeroSource& source, std::uint64_t seed);

/// Exactly-half / extreme / moderate / side from mean, bias factor and the estimates.
Expectation classify(const RaceResult& r);

/// One race on prepared zero data. Undefined pairs come back with defined == false.
RaceResult evaluate_race(const ArithmeticScenario& scenario, int level, ClassLabel c1, ClassLabel c2,
                         const std::map<CharacterId, ZeroSet>& zeros, std::uint64_t race_seed,
                         const ExperimentConfig& config);

/// Scenario of a config: the file when given, the scaled generator otherwise.
ArithmeticScenario scenario_for(const ExperimentConfig& config);

ExperimentReport run_race(const ExperimentConfig& config);
/// id in {esp-q, esp-d, h8}.
ExperimentReport reproduce_table(const std::string& id, int n_max = 8);
ExperimentReport horizontal_experiment(const ExperimentConfig& config);
ExperimentReport tower_experiment(const ExperimentConfig& config);
ExperimentReport monotonicity_experiment(const ExperimentConfig& config);
/// Dispatch on config.experiment.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// A synthetic tower race oriented so the bias factor is positive, with its MC tail 1 - delta.
struct SandwichRace {
  Family family;
  int n = 0;
  int W = 1;
  int level = 0;
  ClassLabel c1;
  ClassLabel c2;
  double bias = 0.0;
  double Q = 1.0;
  DensityEstimate tail;  // P(X < 0)
};
/// The first `count` races with bias in (1, b_max], scanning scenarios seeded from `seed`.
std::vector<SandwichRace> sandwich_races(std::uint64_t seed, std::size_t count, std::uint64_t samples,
                                         double b_max = 3.0);
/// Largest c1 on a grid of c2 so that c1 exp(-c2 Q B^2) <= tail.hi() for every race; returns (c1, c2).
std::pair<double, double> fit_lower_constants(const std::vector<SandwichRace>& races);
/// Share of races with lower <= tail <= upper, both compared against the MC interval.
double sandwich_share(const std::vector<SandwichRace>& races, double c1, double c2, double c3);

}  // namespace cbias
