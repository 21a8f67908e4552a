#include "cbias/cyclotomic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cbias/errors.hpp"

namespace cbias {

namespace {

std::size_t basis_size(int log2_order) { return std::size_t{1} << (log2_order - 1); }

void require_same_ring(const CyclotomicInt& a, const CyclotomicInt& b) {
  if (a.log2_order() != b.log2_order()) throw InternalError("cyclotomic ring mismatch");
}

}  // namespace

CyclotomicInt::CyclotomicInt(int log2_order) : log2_order_(log2_order) {
  if (log2_order < 1 || log2_order > 24) throw ConfigError("cyclotomic order 2^m needs 1 <= m <= 24");
  coeffs_.assign(basis_size(log2_order), 0);
}

CyclotomicInt CyclotomicInt::integer(int log2_order, std::int64_t value) {
  CyclotomicInt out(log2_order);
  out.coeffs_[0] = value;
  return out;
}

CyclotomicInt CyclotomicInt::zeta_power(int log2_order, std::int64_t exponent) {
  CyclotomicInt out(log2_order);
  const auto order = static_cast<std::int64_t>(std::size_t{1} << log2_order);
  const auto phi = static_cast<std::int64_t>(basis_size(log2_order));
  std::int64_t e = ((exponent % order) + order) % order;
  // zeta^phi = -1
  if (e >= phi) out.coeffs_[static_cast<std::size_t>(e - phi)] = -1;
  else out.coeffs_[static_cast<std::size_t>(e)] = 1;
  return out;
}

CyclotomicInt CyclotomicInt::two_cos(int log2_order, std::int64_t a) {
  return zeta_power(log2_order, a) + zeta_power(log2_order, -a);
}

CyclotomicInt CyclotomicInt::lift(int target) const {
  if (target < log2_order_) throw InternalError("cannot lift to a smaller cyclotomic ring");
  CyclotomicInt out(target);
  const std::size_t stride = std::size_t{1} << (target - log2_order_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) out.coeffs_[i * stride] = coeffs_[i];
  return out;
}

CyclotomicInt CyclotomicInt::conj() const {
  CyclotomicInt out(log2_order_);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    out += zeta_power(log2_order_, -static_cast<std::int64_t>(i)) * coeffs_[i];
  }
  return out;
}

bool CyclotomicInt::is_integer() const {
  return std::all_of(coeffs_.begin() + 1, coeffs_.end(), [](std::int64_t c) { return c == 0; });
}

bool CyclotomicInt::is_zero() const {
  return std::all_of(coeffs_.begin(), coeffs_.end(), [](std::int64_t c) { return c == 0; });
}

std::complex<double> CyclotomicInt::to_complex() const {
  const double order = static_cast<double>(std::size_t{1} << log2_order_);
  std::complex<double> sum = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    if (coeffs_[i] == 0) continue;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(i) / order;
    sum += static_cast<double>(coeffs_[i]) * std::polar(1.0, angle);
  }
  return sum;
}

CyclotomicInt& CyclotomicInt::operator+=(const CyclotomicInt& other) {
  require_same_ring(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

CyclotomicInt& CyclotomicInt::operator-=(const CyclotomicInt& other) {
  require_same_ring(*this, other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

CyclotomicInt& CyclotomicInt::operator*=(std::int64_t scalar) {
  for (auto& c : coeffs_) c *= scalar;
  return *this;
}

CyclotomicInt operator*(const CyclotomicInt& a, const CyclotomicInt& b) {
  require_same_ring(a, b);
  // Negacyclic convolution: x^phi = -1.
  CyclotomicInt out(a.log2_order_);
  const std::size_t phi = a.coeffs_.size();
  for (std::size_t i = 0; i < phi; ++i) {
    if (a.coeffs_[i] == 0) continue;
    for (std::size_t j = 0; j < phi; ++j) {
      if (b.coeffs_[j] == 0) continue;
      const std::int64_t term = a.coeffs_[i] * b.coeffs_[j];
      const std::size_t k = i + j;
      if (k < phi) out.coeffs_[k] += term;
      else out.coeffs_[k - phi] -= term;
    }
  }
  return out;
}

bool operator==(const CyclotomicInt& a, const CyclotomicInt& b) {
  if (a.log2_order_ == b.log2_order_) return a.coeffs_ == b.coeffs_;
  const int target = std::max(a.log2_order_, b.log2_order_);
  return a.lift(target).coeffs_ == b.lift(target).coeffs_;
}

std::string CyclotomicInt::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const std::int64_t c = coeffs_[i];
    if (c == 0) continue;
    if (!out.empty()) out += c > 0 ? " + " : " - ";
    else if (c < 0) out += "-";
    const std::int64_t mag = c < 0 ? -c : c;
    if (i == 0) out += std::to_string(mag);
    else {
      if (mag != 1) out += std::to_string(mag) + "*";
      out += "z^" + std::to_string(i);
    }
  }
  return out.empty() ? "0" : out;
}

SparseCyclotomic::SparseCyclotomic(int log2_order) : order_(std::int64_t{1} << log2_order) {
  if (log2_order < 1 || log2_order > 62) throw ConfigError("cyclotomic order 2^m needs 1 <= m <= 62");
}

void SparseCyclotomic::add_root(std::int64_t e, std::int64_t c) {
  const std::int64_t phi = order_ / 2;
  e = ((e % order_) + order_) % order_;
  if (e >= phi) {
    e -= phi;
    c = -c;
  }
  if (c == 0) return;
  if ((terms_[e] += c) == 0) terms_.erase(e);
}

std::int64_t SparseCyclotomic::constant() const {
  const auto it = terms_.find(0);
  return it == terms_.end() ? 0 : it->second;
}

Rational::Rational(std::int64_t num, std::int64_t den) {
  if (den == 0) throw InternalError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  num_ = g ? num / g : 0;
  den_ = g ? den / g : 1;
}

std::string Rational::to_string() const {
  return den_ == 1 ? std::to_string(num_) : std::to_string(num_) + "/" + std::to_string(den_);
}

}  // namespace cbias
