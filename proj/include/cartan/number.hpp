#pragma once

#include <complex>
#include <cstdint>
#include <string>

namespace cartan::expr {

/// Reduced fraction num/den with den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  friend bool operator==(const Rational&, const Rational&) = default;
  double toDouble() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool isZero() const { return num == 0; }
};

/// Complex constant. Exact Gaussian rationals are kept exact (so I*I is
/// exactly -1); any operation that would overflow 64-bit rationals, or that
/// involves an inexact operand, falls back to a double-precision pair.
class Number {
 public:
  Number() = default;
  Number(std::int64_t value);  // NOLINT(google-explicit-constructor)
  Number(Rational re, Rational im);
  static Number inexact(std::complex<double> value);
  static Number imaginaryUnit() { return Number(Rational{0, 1}, Rational{1, 1}); }

  bool isExact() const { return exact_; }
  bool isZero() const;
  bool isOne() const;
  bool isReal() const;
  bool isNegativeReal() const;
  const Rational& re() const { return re_; }
  const Rational& im() const { return im_; }
  std::complex<double> value() const;

  Number operator+(const Number& o) const;
  Number operator-(const Number& o) const;
  Number operator*(const Number& o) const;
  Number operator/(const Number& o) const;  // throws std::domain_error on zero
  Number operator-() const;
  Number pow(int exponent) const;

  /// Structural equality: exact numbers compare exactly, inexact by value.
  bool operator==(const Number& o) const;
  /// Total order used for canonical sorting.
  int compare(const Number& o) const;
  std::size_t hash() const;

  /// Infix rendering re-readable by the parser, e.g. "3/2", "I", "(1 + 2*I)".
  std::string toString() const;
  /// Canonical prefix rendering, e.g. "3/2", "(c 1 2)".
  std::string toPrefix() const;

 private:
  bool exact_ = true;
  Rational re_{};
  Rational im_{};
  std::complex<double> approx_{};
};

}  // namespace cartan::expr
