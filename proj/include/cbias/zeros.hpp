#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cbias {

/// Main-term zero counting for one L-function: log A(chi) and [K:Q] chi(1).
struct ZeroCountModel {
  double log_conductor = 0.0;
  int degree_factor = 1;
};

/// (T / 2pi) log(A (T / 2pi e)^d), clamped at 0.
double expected_zero_count(const ZeroCountModel& model, double T);
/// d/dT of the unclamped main term, (1/2pi)(log A + d log(T/2pi)), floored at 1e-6.
double zero_density(const ZeroCountModel& model, double T);
/// Integral of zero_density over (0, T]; the sampler's time change.
double integrated_density(const ZeroCountModel& model, double T);
double inverse_integrated_density(const ZeroCountModel& model, double x);

/// Positive ordinates of one L-function, complete up to t_max.
struct ZeroSet {
  std::string character;  // "psi1", "chi2", or any label for external tables
  std::vector<double> ordinates;
  double t_max = 0.0;
  std::optional<double> log_conductor;
  std::optional<std::uint64_t> seed;  // set for synthetic sets

  /// Strictly increasing, positive, all <= t_max; throws ValidationError.
  void validate() const;
};

/// Jittered stratified sampling of the time-changed process: the k-th ordinate sits at
/// Lambda^{-1}(k - 1 + U_k), one point per unit of integrated density.
ZeroSet sample_zero_set(const std::string& character, const ZeroCountModel& model, double t_max,
                        std::uint64_t seed);

ZeroSet load_zeros(std::istream& in);
void save_zeros(std::ostream& out, const ZeroSet& zs);
ZeroSet load_zero_file(const std::string& path);
void save_zero_file(const std::string& path, const ZeroSet& zs);

enum class B0Convention { OneSided, TwoSided };

/// sum 1/(1/4 + gamma^2) over gamma > 0; doubled for the two-sided (gamma != 0) convention.
double b0(const ZeroSet& zs, B0Convention convention = B0Convention::OneSided);
/// sum_{0 < gamma <= T} 1/sqrt(1/4 + gamma^2); HorizonError past t_max.
double partial_inverse_sum(const ZeroSet& zs, double T);
/// (log T / 2pi) log(A (T^{1/2} / 2pi e)^d).
double partial_inverse_sum_main_term(const ZeroCountModel& model, double T);
/// Error scale log(A (T + 4)^d) used as the tolerance unit for the above.
double zero_error_scale(const ZeroCountModel& model, double T);

}  // namespace cbias
