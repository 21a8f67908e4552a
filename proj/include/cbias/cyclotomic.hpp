#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

namespace cbias {

/// Element of Z[zeta] with zeta = exp(2 pi i / 2^m), stored on the power basis 1, zeta, ...,
/// zeta^{phi-1} with phi = 2^{m-1} and zeta^phi = -1. Equality is exact.
class CyclotomicInt {
 public:
  /// Zero of Z[zeta_{2^m}], m >= 1.
  explicit CyclotomicInt(int log2_order = 1);
  static CyclotomicInt integer(int log2_order, std::int64_t value);
  static CyclotomicInt zeta_power(int log2_order, std::int64_t exponent);
  /// zeta^a + zeta^{-a}, the value 2 cos(2 pi a / 2^m).
  static CyclotomicInt two_cos(int log2_order, std::int64_t a);

  int log2_order() const { return log2_order_; }
  const std::vector<std::int64_t>& coefficients() const { return coeffs_; }

  /// Same element viewed in Z[zeta_{2^target}], target >= log2_order().
  CyclotomicInt lift(int target_log2_order) const;
  CyclotomicInt conj() const;

  bool is_integer() const;
  bool is_zero() const;
  /// Constant coefficient; meaningful when is_integer().
  std::int64_t constant() const { return coeffs_[0]; }

  std::complex<double> to_complex() const;
  double real() const { return to_complex().real(); }

  CyclotomicInt& operator+=(const CyclotomicInt& other);
  CyclotomicInt& operator-=(const CyclotomicInt& other);
  CyclotomicInt& operator*=(std::int64_t scalar);
  friend CyclotomicInt operator+(CyclotomicInt a, const CyclotomicInt& b) { return a += b; }
  friend CyclotomicInt operator-(CyclotomicInt a, const CyclotomicInt& b) { return a -= b; }
  friend CyclotomicInt operator*(CyclotomicInt a, std::int64_t s) { return a *= s; }
  friend CyclotomicInt operator*(const CyclotomicInt& a, const CyclotomicInt& b);
  friend bool operator==(const CyclotomicInt& a, const CyclotomicInt& b);

  std::string to_string() const;

 private:
  int log2_order_;
  std::vector<std::int64_t> coeffs_;
};

/// Sparse element of Z[zeta_{2^m}] on the same power basis; cheap when only a few root powers
/// are involved, at any m.
class SparseCyclotomic {
 public:
  explicit SparseCyclotomic(int log2_order);
  void add_root(std::int64_t exponent, std::int64_t coefficient = 1);
  void add_integer(std::int64_t value) { add_root(0, value); }
  bool is_zero() const { return terms_.empty(); }
  bool is_integer() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 0); }
  std::int64_t constant() const;

 private:
  std::int64_t order_;
  std::map<std::int64_t, std::int64_t> terms_;
};

/// Exact rational with normalized sign and gcd.
class Rational {
 public:
  Rational(std::int64_t num = 0, std::int64_t den = 1);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }
  bool is_integer() const { return den_ == 1; }

  friend bool operator==(const Rational&, const Rational&) = default;
  std::string to_string() const;

 private:
  std::int64_t num_;
  std::int64_t den_;
};

}  // namespace cbias
