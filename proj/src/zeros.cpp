#include "cbias/zeros.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>

#include "cbias/errors.hpp"

namespace cbias {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDensityFloor = 1e-6;

// Below t0 the density is clamped to the floor.
double floor_crossing(const ZeroCountModel& m) {
  if (m.degree_factor <= 0) return m.log_conductor > kTwoPi * kDensityFloor ? 0.0 : INFINITY;
  return kTwoPi * std::exp((kTwoPi * kDensityFloor - m.log_conductor) / m.degree_factor);
}

double main_term(const ZeroCountModel& m, double T) {
  return T / kTwoPi * (m.log_conductor + m.degree_factor * std::log(T / (kTwoPi * std::numbers::e)));
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

double expected_zero_count(const ZeroCountModel& model, double T) {
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  return std::max(0.0, main_term(model, T));
}

double zero_density(const ZeroCountModel& model, double T) {
  const double rate = (model.log_conductor + model.degree_factor * std::log(T / kTwoPi)) / kTwoPi;
  return std::max(rate, kDensityFloor);
}

double integrated_density(const ZeroCountModel& model, double T) {
  if (T <= 0.0) return 0.0;
  const double t0 = floor_crossing(model);
  if (T <= t0) return kDensityFloor * T;
  const double base = t0 > 0.0 ? kDensityFloor * t0 - main_term(model, t0) : 0.0;
  return base + main_term(model, T);
}

namespace {

// Newton on the convex branch past t0, bracketed; `lo` must satisfy Lambda(lo) <= x.
double invert_from(const ZeroCountModel& model, double x, double lo) {
  double t = lo + (x - integrated_density(model, lo)) / zero_density(model, lo);
  double hi = INFINITY;
  for (int it = 0; it < 200; ++it) {
    const double f = integrated_density(model, t) - x;
    if (f > 0) hi = std::min(hi, t);
    else lo = std::max(lo, t);
    double next = t - f / zero_density(model, t);
    if (!(next >= lo && next <= hi)) next = std::isinf(hi) ? 2.0 * std::max(t, 1.0) : 0.5 * (lo + hi);
    if (std::abs(next - t) <= 4e-16 * t) return next;
    t = next;
  }
  return t;
}

}  // namespace

double inverse_integrated_density(const ZeroCountModel& model, double x) {
  if (x <= 0.0) return 0.0;
  const double t0 = floor_crossing(model);
  if (std::isinf(t0) || x <= kDensityFloor * t0) return x / kDensityFloor;
  return invert_from(model, x, t0);
}

void ZeroSet::validate() const {
  double prev = 0.0;
  for (std::size_t k = 0; k < ordinates.size(); ++k) {
    const double g = ordinates[k];
    if (!(g > prev)) {
      throw ValidationError(k == 0 ? "ordinates must be positive"
                                   : "ordinates must be strictly increasing (entry " + std::to_string(k + 1) + ")");
    }
    prev = g;
  }
  if (!ordinates.empty() && ordinates.back() > t_max) throw ValidationError("ordinate beyond T_max");
}

ZeroSet sample_zero_set(const std::string& character, const ZeroCountModel& model, double t_max,
                        std::uint64_t seed) {
  if (!(t_max >= 1.0)) throw ConfigError("T_max must be >= 1");
  if (model.log_conductor < 0.0) throw ConfigError("log conductor must be >= 0");
  ZeroSet zs;
  zs.character = character;
  zs.t_max = t_max;
  zs.log_conductor = model.log_conductor;
  zs.seed = seed;
  std::mt19937_64 rng(seed);
  const double total = integrated_density(model, t_max);
  const double t0 = floor_crossing(model);
  for (std::uint64_t k = 0;; ++k) {
    // U in (0, 1): never lands on a stratum edge.
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    const double x = static_cast<double>(k) + u;
    if (x > total) break;
    const double prev = zs.ordinates.empty() ? 0.0 : zs.ordinates.back();
    const double g = prev > t0 ? invert_from(model, x, prev) : inverse_integrated_density(model, x);
    if (g > t_max) break;
    if (!zs.ordinates.empty() && !(g > zs.ordinates.back())) throw InternalError("sampler produced a tie");
    zs.ordinates.push_back(g);
  }
  return zs;
}

ZeroSet load_zeros(std::istream& in) {
  ZeroSet zs;
  bool have_tmax = false;
  std::string line;
  std::size_t lineno = 0;
  auto number = [&](const std::string& text) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(text, &used);
    } catch (const std::exception&) {
      throw ParseError(lineno, "expected a number, got '" + text + "'");
    }
    if (used != text.size()) throw ParseError(lineno, "trailing characters in '" + text + "'");
    return v;
  };
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(':');
      if (colon == std::string::npos) continue;
      const std::string key = trim(line.substr(1, colon - 1));
      const std::string value = trim(line.substr(colon + 1));
      if (key == "character") zs.character = value;
      else if (key == "T_max") {
        zs.t_max = number(value);
        have_tmax = true;
      } else if (key == "log_conductor") zs.log_conductor = number(value);
      else if (key == "seed") zs.seed = static_cast<std::uint64_t>(std::stoull(value));
      continue;
    }
    const double g = number(line);
    if (!(g > 0.0)) throw ValidationError("line " + std::to_string(lineno) + ": ordinate must be positive");
    if (!zs.ordinates.empty() && !(g > zs.ordinates.back()))
      throw ValidationError("line " + std::to_string(lineno) + ": ordinates must be strictly increasing");
    zs.ordinates.push_back(g);
  }
  if (!have_tmax) zs.t_max = zs.ordinates.empty() ? 0.0 : zs.ordinates.back();
  zs.validate();
  return zs;
}

void save_zeros(std::ostream& out, const ZeroSet& zs) {
  char buf[40];
  out << "# character: " << zs.character << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", zs.t_max);
  out << "# T_max: " << buf << '\n';
  if (zs.log_conductor) {
    std::snprintf(buf, sizeof buf, "%.17g", *zs.log_conductor);
    out << "# log_conductor: " << buf << '\n';
  }
  if (zs.seed) out << "# seed: " << *zs.seed << '\n';
  for (const double g : zs.ordinates) {
    std::snprintf(buf, sizeof buf, "%.17g", g);
    out << buf << '\n';
  }
}

ZeroSet load_zero_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open zero file '" + path + "'");
  return load_zeros(in);
}

void save_zero_file(const std::string& path, const ZeroSet& zs) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write zero file '" + path + "'");
  save_zeros(out, zs);
}

double b0(const ZeroSet& zs, B0Convention convention) {
  double s = 0.0;
  // Smallest terms first.
  for (auto it = zs.ordinates.rbegin(); it != zs.ordinates.rend(); ++it) s += 1.0 / (0.25 + *it * *it);
  return convention == B0Convention::TwoSided ? 2.0 * s : s;
}

double partial_inverse_sum(const ZeroSet& zs, double T) {
  if (T > zs.t_max) throw HorizonError("T beyond the completeness horizon of the zero set");
  double s = 0.0;
  for (const double g : zs.ordinates) {
    if (g > T) break;
    s += 1.0 / std::sqrt(0.25 + g * g);
  }
  return s;
}

double partial_inverse_sum_main_term(const ZeroCountModel& model, double T) {
  return std::log(T) / kTwoPi *
         (model.log_conductor + model.degree_factor * std::log(std::sqrt(T) / (kTwoPi * std::numbers::e)));
}

double zero_error_scale(const ZeroCountModel& model, double T) {
  return model.log_conductor + model.degree_factor * std::log(T + 4.0);
}

}  // namespace cbias
