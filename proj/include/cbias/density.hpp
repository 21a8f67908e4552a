#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cbias/characters.hpp"
#include "cbias/race.hpp"

namespace cbias {

// Lower-bound constants from `cbias calibrate --seed 90001 --count 100` (c1 rounded down).
// Acceptance draws its races from other seeds.
inline constexpr double kFittedC1 = 0.013;
inline constexpr double kFittedC2 = 0.125;

/// Every tunable of the density engine; passed explicitly, never global.
struct DensityConfig {
  std::uint64_t samples = 100000;
  std::uint64_t chunk = 8192;  // samples per deterministic RNG chunk
  unsigned threads = 0;        // 0: hardware concurrency
  double ci_z = 2.5758;        // 99% two-sided

  double t_max = 0.0;           // Fourier horizon; 0 picks it from the decay envelope
  double t_cap = 2.0e4;         // largest automatic horizon
  double truncation_tol = 1e-11;
  double quad_tol = 1e-12;      // absolute, whole integral
  int max_subdivisions = 200000;

  bool gaussian_tail = true;  // model zeros past the horizon as a centred normal

  double c1 = kFittedC1;
  double c2 = kFittedC2;
  double c3 = 1.0 / 16.0;
  double big_c = 1.0;  // the absolute constant inside Q
  double a1 = kFittedC1;
  double a2 = kFittedC2;
  double clt_cubic = 1.0;
  double clt_variance = 1.0;
};

enum class DensityMethod { MonteCarlo, Fourier };
std::string_view method_name(DensityMethod m);

struct DensityEstimate {
  double value = 0.5;
  DensityMethod method = DensityMethod::MonteCarlo;
  double error_bound = 0.0;
  std::uint64_t samples_or_nodes = 0;
  std::vector<std::string> warnings;

  double lo() const;
  double hi() const;
};

/// splitmix64 of master mixed with index; the seed of the index-th substream.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// J0 to about 1e-15: power series in long double up to 17, Hankel expansion above.
double bessel_j0(double x);
/// Nonincreasing envelope with |J0(x)| <= envelope(x) for x >= 0.
double bessel_j0_envelope(double x);

/// P(mean + sum r cos(2 pi U) > 0) with antithetic pairs U, U + 1/2.
DensityEstimate density_montecarlo(const RaceModel& model, std::uint64_t samples, std::uint64_t seed,
                                   const DensityConfig& config = {});
/// Same draws for several shifts: P(shift_k + S > 0) for every k (common random numbers).
std::vector<DensityEstimate> density_montecarlo_shared(const std::vector<double>& terms, double tail_variance,
                                                       const std::vector<double>& shifts, std::uint64_t samples,
                                                       std::uint64_t seed, const DensityConfig& config = {});

/// 1/2 + (1/pi) int_0^T sin(m t) prod J0(r t) / t dt by adaptive Gauss-Kronrod (7, 15).
DensityEstimate density_fourier(const RaceModel& model, const DensityConfig& config = {});
DensityEstimate density_fourier(double mean, const std::vector<double>& terms, double tail_variance,
                                const DensityConfig& config = {});

/// Effect bound of a variance shift on delta: tail / (2 sqrt(2 pi e) Var).
double truncation_budget(double tail_variance, double variance);

struct CltEstimate {
  double estimate = 0.5;
  double error_budget = 0.0;
};
/// 1/2 + B / sqrt(2 pi), budget |B|^3 + Var^{-1/3} with unit constants by default.
CltEstimate clt_estimate(double bias, double variance, const DensityConfig& config = {});

/// exp(-c3 B^2); nullopt when B <= 0.
std::optional<double> upper_bound(double bias, double c3);
/// c1 exp(-c2 Q B^2); nullopt when B <= 0.
std::optional<double> lower_bound(double bias, double Q, double c1, double c2);

struct QFactor {
  double Q = 1.0;
  double b3 = 0.0;
  double b4 = 0.0;
  CharacterId lambda_star;
};
/// b3, b4 from the full-group weights; Q from the S/R data (C (b3/b4 + 1) over Q).
QFactor q_factor(const RaceSpec& spec, const SrPartition& sr, int M, double C = 1.0);
/// max_{chi in R} ord + 1.
int m_parameter(const SrPartition& sr, const std::map<CharacterId, int>& orders);

struct MoTail {
  double big_sum = 0.0;       // sum_{r >= alpha} r
  double small_square = 0.0;  // sum_{r < alpha} r^2
  bool upper_applicable = false;
  bool lower_applicable = false;
  double upper = 1.0;
  double lower = 0.0;
};
/// Montgomery-Odlyzko regimes for P(sum r X >= V).
MoTail mo_tail(const std::vector<double>& terms, double V, double alpha, double a1, double a2);
MoTail mo_tail(const RaceModel& model, double V, double alpha, double a1, double a2);

struct BoundReport {
  double bias = 0.0;
  double variance = 0.0;
  CltEstimate clt;
  std::optional<double> upper_one_minus_delta;
  std::optional<double> lower_one_minus_delta;
  QFactor q;
  double c1 = 0, c2 = 0, c3 = 0;
};
BoundReport bound_report(const RaceSpec& spec, const RaceModel& model, const DensityConfig& config = {});

}  // namespace cbias
