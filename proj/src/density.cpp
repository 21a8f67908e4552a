#include "cbias/density.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "cbias/errors.hpp"

namespace cbias {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSeriesLimit = 17.0;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double unit(std::mt19937_64& rng) { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; }

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

// Amplitudes sorted descending so the envelope product can stop early.
struct Integrand {
  double m;
  const std::vector<double>& r;
  double tail;

  double phi(double t) const {
    double p = tail > 0.0 ? std::exp(-0.5 * tail * t * t) : 1.0;
    for (const double x : r) {
      p *= bessel_j0(x * t);
      if (p == 0.0) break;
    }
    return p;
  }
  double operator()(double t) const {
    if (t == 0.0) return m;
    return std::sin(m * t) * phi(t) / t;
  }
};

// Bound on the integral of |integrand| over [T, inf).
double tail_bound(const std::vector<double>& r, double tail, double T) {
  double g = tail > 0.0 ? std::exp(-0.5 * tail * T * T) : 1.0;
  int decaying = 0;
  for (const double x : r) {
    g *= bessel_j0_envelope(x * T);
    if (x * T >= 2.29) ++decaying;
  }
  double factor = INFINITY;
  if (decaying > 0) factor = 2.0 / decaying;
  if (tail > 0.0) factor = std::min(factor, 1.0 / (tail * T * T));
  return g * factor / kPi;
}

const double kGkNodes[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                            0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                            0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                            0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
const double kKronrodWeights[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                                   0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                                   0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                                   0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
const double kGaussWeights[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                 0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b, value, error;
};

Panel gk15(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double k = fc * kKronrodWeights[7];
  double g = fc * kGaussWeights[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = h * kGkNodes[i];
    const double s = f(c - dx) + f(c + dx);
    k += kKronrodWeights[i] * s;
    if (i % 2 == 1) g += kGaussWeights[i / 2] * s;
  }
  return {a, b, k * h, std::abs((k - g) * h)};
}

}  // namespace

std::string_view method_name(DensityMethod m) { return m == DensityMethod::MonteCarlo ? "montecarlo" : "fourier"; }

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index + 1));
}

double DensityEstimate::lo() const { return clamp01(value - error_bound); }
double DensityEstimate::hi() const { return clamp01(value + error_bound); }

double bessel_j0(double x) {
  x = std::abs(x);
  if (x <= kSeriesLimit) {
    const long double y = 0.25L * static_cast<long double>(x) * x;
    long double term = 1.0L, sum = 1.0L;
    for (int k = 1; k < 200; ++k) {
      term *= -y / (static_cast<long double>(k) * k);
      sum += term;
      if (std::abs(term) < 1e-22L) break;
    }
    return static_cast<double>(sum);
  }
  // Hankel: J0 = sqrt(2/(pi x)) (P cos chi - Q sin chi), chi = x - pi/4.
  double P = 1.0, Q = 0.0, a = 1.0;
  double prev = INFINITY;
  for (int k = 1; k < 60; ++k) {
    const double odd = 2.0 * k - 1.0;
    a *= -(odd * odd) / (8.0 * k * x);
    if (std::abs(a) >= prev) break;
    prev = std::abs(a);
    // a_k / x^k with alternating sign folded in per the parity of k.
    if (k % 2 == 1) Q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * a;
    else P += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * a;
    if (std::abs(a) < 1e-17) break;
  }
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (P * std::cos(chi) - Q * std::sin(chi));
}

double bessel_j0_envelope(double x) {
  x = std::abs(x);
  if (x <= 1.6) return std::exp(-0.25 * x * x);
  if (x <= 2.29) return std::exp(-0.64);
  return std::sqrt(2.0 / (kPi * x));
}

std::vector<DensityEstimate> density_montecarlo_shared(const std::vector<double>& terms, double tail_variance,
                                                       const std::vector<double>& shifts, std::uint64_t samples,
                                                       std::uint64_t seed, const DensityConfig& config) {
  if (terms.empty() && !(tail_variance > 0.0)) throw ConfigError("Monte Carlo needs a nonempty term list");
  if (samples < 2) throw ConfigError("need at least two samples");
  const std::uint64_t pairs = (samples + 1) / 2;
  const std::uint64_t chunk_pairs = std::max<std::uint64_t>(1, config.chunk / 2);
  const std::uint64_t chunks = (pairs + chunk_pairs - 1) / chunk_pairs;
  const std::size_t K = shifts.size();
  // Per chunk and shift: sum of pair scores and of their squares (scores in {0, 1/2, 1}).
  std::vector<double> sum(chunks * K, 0.0), sum_sq(chunks * K, 0.0);
  const double tail_sd = config.gaussian_tail && tail_variance > 0.0 ? std::sqrt(tail_variance) : 0.0;

  auto run_chunk = [&](std::uint64_t c) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(c + 1)));
    std::normal_distribution<double> normal;
    const std::uint64_t begin = c * chunk_pairs, end = std::min(pairs, begin + chunk_pairs);
    for (std::uint64_t p = begin; p < end; ++p) {
      double s = 0.0;
      for (const double r : terms) s += r * std::cos(2.0 * kPi * unit(rng));
      if (tail_sd > 0.0) s += tail_sd * normal(rng);
      // U + 1/2 flips every cosine: the partner draw is -s.
      for (std::size_t k = 0; k < K; ++k) {
        const double score = 0.5 * ((shifts[k] + s > 0.0) + (shifts[k] - s > 0.0));
        sum[c * K + k] += score;
        sum_sq[c * K + k] += score * score;
      }
    }
  };

  unsigned workers = config.threads ? config.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;) run_chunk(c);
      });
    for (auto& t : pool) t.join();
  }

  std::vector<DensityEstimate> out(K);
  const double np = static_cast<double>(pairs);
  for (std::size_t k = 0; k < K; ++k) {
    double s = 0.0, s2 = 0.0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
      s += sum[c * K + k];
      s2 += sum_sq[c * K + k];
    }
    const double p = s / np;
    const double var = std::max(0.0, s2 / np - p * p);
    DensityEstimate e;
    e.method = DensityMethod::MonteCarlo;
    e.value = p;
    e.samples_or_nodes = 2 * pairs;
    e.error_bound = config.ci_z * std::sqrt(var / np);
    // No spread seen: fall back to a rule-of-three style width.
    if (e.error_bound == 0.0) e.error_bound = config.ci_z * config.ci_z / (2.0 * np);
    if (!config.gaussian_tail && tail_variance > 0.0)
      e.error_bound += truncation_budget(tail_variance, tail_variance + [&] {
        double v = 0.0;
        for (const double r : terms) v += 0.5 * r * r;
        return v;
      }());
    out[k] = e;
  }
  return out;
}

DensityEstimate density_montecarlo(const RaceModel& model, std::uint64_t samples, std::uint64_t seed,
                                   const DensityConfig& config) {
  if (model.terms.empty()) throw ConfigError("Monte Carlo needs a nonempty term list");
  return density_montecarlo_shared(model.terms, model.tail_variance, {static_cast<double>(model.mean)}, samples,
                                   seed, config)[0];
}

DensityEstimate density_fourier(double mean, const std::vector<double>& terms_in, double tail_variance,
                                const DensityConfig& config) {
  if (terms_in.empty()) throw ConfigError("Fourier inversion needs a nonempty term list");
  std::vector<double> terms = terms_in;
  std::sort(terms.begin(), terms.end(), std::greater<>());
  double s2 = 0.0;
  for (const double r : terms) s2 += r * r;
  if (!(s2 > 0.0)) throw ConfigError("Fourier inversion needs positive variance");
  const double tail = config.gaussian_tail ? tail_variance : 0.0;

  DensityEstimate e;
  e.method = DensityMethod::Fourier;
  if (terms.size() < 3 && !(tail > 0.0))
    e.warnings.push_back("fewer than 3 terms: slow decay, raise t_max");
  if (mean == 0.0) {
    // sin(0 t) vanishes identically.
    e.value = 0.5;
    return e;
  }

  double T = config.t_max;
  double trunc = 0.0;
  if (T <= 0.0) {
    T = std::sqrt(2.0 * std::log(1e12) / (0.5 * s2 + tail));
    while (T < config.t_cap && tail_bound(terms, tail, T) > config.truncation_tol) T *= 1.5;
    T = std::min(T, config.t_cap);
  }
  trunc = tail_bound(terms, tail, T);
  if (trunc > 1e-6) e.warnings.push_back("truncation bound " + std::to_string(trunc) + " at t_max");

  const Integrand f{mean, terms, tail};
  // Panels no wider than the fastest oscillation.
  const double freq = std::abs(mean) + terms.front() + std::sqrt(tail);
  const int panels = std::clamp(static_cast<int>(std::ceil(T * freq / 2.0)), 1, config.max_subdivisions / 4);
  auto by_error = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::vector<Panel> work;
  double err = 0.0;
  for (int p = 0; p < panels; ++p) {
    work.push_back(gk15(f, T * p / panels, T * (p + 1) / panels));
    err += work.back().error;
  }
  std::make_heap(work.begin(), work.end(), by_error);
  std::uint64_t evals = 15ULL * panels;
  while (err > config.quad_tol && static_cast<int>(work.size()) < config.max_subdivisions) {
    std::pop_heap(work.begin(), work.end(), by_error);
    const Panel p = work.back();
    const double mid = 0.5 * (p.a + p.b);
    const Panel left = gk15(f, p.a, mid), right = gk15(f, mid, p.b);
    work.back() = left;
    std::push_heap(work.begin(), work.end(), by_error);
    work.push_back(right);
    std::push_heap(work.begin(), work.end(), by_error);
    evals += 30;
    err += left.error + right.error - p.error;
  }
  // Sum in position order so the result does not depend on refinement history.
  std::sort(work.begin(), work.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double integral = 0.0;
  err = 0.0;
  for (const auto& p : work) {
    integral += p.value;
    err += p.error;
  }
  e.value = clamp01(0.5 + integral / kPi);
  e.error_bound = err / kPi + trunc;
  if (!config.gaussian_tail && tail_variance > 0.0) e.error_bound += truncation_budget(tail_variance, 0.5 * s2);
  e.samples_or_nodes = evals;
  return e;
}

DensityEstimate density_fourier(const RaceModel& model, const DensityConfig& config) {
  return density_fourier(static_cast<double>(model.mean), model.terms, model.tail_variance, config);
}

double truncation_budget(double tail_variance, double variance) {
  if (!(variance > 0.0)) return 0.0;
  return tail_variance / (2.0 * std::sqrt(2.0 * kPi * std::numbers::e) * variance);
}

CltEstimate clt_estimate(double bias, double variance, const DensityConfig& config) {
  if (!(variance > 0.0)) throw ConfigError("CLT estimate needs a positive variance");
  return {clamp01(0.5 + bias / std::sqrt(2.0 * kPi)),
          config.clt_cubic * std::pow(std::abs(bias), 3) + config.clt_variance * std::pow(variance, -1.0 / 3.0)};
}

std::optional<double> upper_bound(double bias, double c3) {
  if (!(bias > 0.0)) return std::nullopt;
  return std::exp(-c3 * bias * bias);
}

std::optional<double> lower_bound(double bias, double Q, double c1, double c2) {
  if (!(bias > 0.0)) return std::nullopt;
  return c1 * std::exp(-c2 * Q * bias * bias);
}

int m_parameter(const SrPartition& sr, const std::map<CharacterId, int>& orders) {
  int m = 0;
  for (const CharacterId id : sr.r) {
    const auto it = orders.find(id);
    m = std::max(m, it == orders.end() ? 0 : it->second);
  }
  return m + 1;
}

QFactor q_factor(const RaceSpec& spec, const SrPartition& sr, int M, double C) {
  const auto w = race_weights(spec);
  QFactor q;
  q.b4 = INFINITY;
  int star_degree = 0;
  for (const auto& [id, x] : w) {
    if (x == 0.0) continue;
    q.b4 = std::min(q.b4, x);
    const int deg = character_degree(id);
    if (x > q.b3 + 1e-12 || (std::abs(x - q.b3) <= 1e-12 && deg > star_degree)) {
      q.b3 = std::max(q.b3, x);
      q.lambda_star = id;
      star_degree = deg;
    }
  }
  if (!(q.b3 > 0.0)) throw InternalError("all weights vanish on a defined race");
  if (spec.level == spec.kind().n || sr.r.empty()) {
    q.Q = C * (q.b3 / q.b4 + 1.0);
  } else {
    const double e = std::exp(C * std::sqrt(static_cast<double>(M) * sr.b1 * sr.b2 / (star_degree * q.b3)));
    q.Q = std::max({e, C * q.b3 / q.b4, C});
  }
  return q;
}

MoTail mo_tail(const std::vector<double>& terms, double V, double alpha, double a1, double a2) {
  if (V < 0.0 || !(alpha > 0.0)) throw ConfigError("mo_tail needs V >= 0 and alpha > 0");
  MoTail t;
  for (const double r : terms) {
    if (r >= alpha) t.big_sum += r;
    else t.small_square += r * r;
  }
  t.upper_applicable = t.big_sum <= V / 2.0;
  t.lower_applicable = t.big_sum >= 2.0 * V;
  if (t.small_square > 0.0) {
    t.upper = std::exp(-V * V / (16.0 * t.small_square));
    t.lower = a1 * std::exp(-a2 * V * V / t.small_square);
  } else {
    t.upper = V > 0.0 ? 0.0 : 1.0;
    t.lower = V > 0.0 ? 0.0 : a1;
  }
  return t;
}

MoTail mo_tail(const RaceModel& model, double V, double alpha, double a1, double a2) {
  return mo_tail(model.terms, V, alpha, a1, a2);
}

BoundReport bound_report(const RaceSpec& spec, const RaceModel& model, const DensityConfig& config) {
  BoundReport b;
  b.variance = model.variance;
  b.bias = bias_factor(static_cast<double>(model.mean), model.variance);
  b.clt = clt_estimate(b.bias, b.variance, config);
  const Tower tower(spec.kind());
  const SrPartition sr = sr_partition(tower, spec.level);
  b.q = q_factor(spec, sr, m_parameter(sr, spec.vanishing()), config.big_c);
  b.upper_one_minus_delta = upper_bound(b.bias, config.c3);
  b.lower_one_minus_delta = lower_bound(b.bias, b.q.Q, config.c1, config.c2);
  b.c1 = config.c1;
  b.c2 = config.c2;
  b.c3 = config.c3;
  return b;
}

}  // namespace cbias
