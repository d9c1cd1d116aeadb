#include "cartan/number.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <optional>
#include <stdexcept>

namespace cartan::expr {
namespace {

using i128 = __int128;

std::optional<Rational> normalize(i128 num, i128 den) {
  if (den == 0) return std::nullopt;
  if (den < 0) {
    num = -num;
    den = -den;
  }
  i128 a = num < 0 ? -num : num;
  i128 b = den;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    num /= a;
    den /= a;
  }
  constexpr i128 kMax = INT64_MAX;
  if (num > kMax || num < -kMax || den > kMax) return std::nullopt;
  return Rational{static_cast<std::int64_t>(num), static_cast<std::int64_t>(den)};
}

std::optional<Rational> add(const Rational& x, const Rational& y) {
  return normalize(i128(x.num) * y.den + i128(y.num) * x.den, i128(x.den) * y.den);
}

std::optional<Rational> sub(const Rational& x, const Rational& y) {
  return normalize(i128(x.num) * y.den - i128(y.num) * x.den, i128(x.den) * y.den);
}

std::optional<Rational> mul(const Rational& x, const Rational& y) {
  return normalize(i128(x.num) * y.num, i128(x.den) * y.den);
}

std::string rationalText(const Rational& r) {
  if (r.den == 1) return std::to_string(r.num);
  return std::to_string(r.num) + "/" + std::to_string(r.den);
}

std::string doubleText(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  std::string s(buf);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

int cmp(double a, double b) { return a < b ? -1 : (a > b ? 1 : 0); }

}  // namespace

Number::Number(std::int64_t value) : re_{value, 1} {}

Number::Number(Rational re, Rational im) {
  auto r = normalize(re.num, re.den);
  auto i = normalize(im.num, im.den);
  if (!r || !i) throw std::domain_error("zero denominator in rational constant");
  re_ = *r;
  im_ = *i;
}

Number Number::inexact(std::complex<double> value) {
  Number n;
  n.exact_ = false;
  n.approx_ = value;
  return n;
}

bool Number::isZero() const { return exact_ ? (re_.isZero() && im_.isZero()) : approx_ == 0.0; }

bool Number::isOne() const {
  return exact_ ? (re_ == Rational{1, 1} && im_.isZero()) : approx_ == 1.0;
}

bool Number::isReal() const { return exact_ ? im_.isZero() : approx_.imag() == 0.0; }

bool Number::isNegativeReal() const {
  return isReal() && (exact_ ? re_.num < 0 : approx_.real() < 0.0);
}

std::complex<double> Number::value() const {
  return exact_ ? std::complex<double>(re_.toDouble(), im_.toDouble()) : approx_;
}

Number Number::operator+(const Number& o) const {
  if (exact_ && o.exact_) {
    auto r = add(re_, o.re_);
    auto i = add(im_, o.im_);
    if (r && i) return Number(*r, *i);
  }
  return inexact(value() + o.value());
}

Number Number::operator-(const Number& o) const {
  if (exact_ && o.exact_) {
    auto r = sub(re_, o.re_);
    auto i = sub(im_, o.im_);
    if (r && i) return Number(*r, *i);
  }
  return inexact(value() - o.value());
}

Number Number::operator*(const Number& o) const {
  if (exact_ && o.exact_) {
    auto ac = mul(re_, o.re_);
    auto bd = mul(im_, o.im_);
    auto ad = mul(re_, o.im_);
    auto bc = mul(im_, o.re_);
    if (ac && bd && ad && bc) {
      auto r = sub(*ac, *bd);
      auto i = add(*ad, *bc);
      if (r && i) return Number(*r, *i);
    }
  }
  return inexact(value() * o.value());
}

Number Number::operator/(const Number& o) const {
  if (o.isZero()) throw std::domain_error("division by zero constant");
  if (exact_ && o.exact_) {
    // 1/(c + di) = (c - di)/(c^2 + d^2)
    auto c2 = mul(o.re_, o.re_);
    auto d2 = mul(o.im_, o.im_);
    if (c2 && d2) {
      auto norm = add(*c2, *d2);
      if (norm) {
        auto invNorm = normalize(norm->den, norm->num);
        if (invNorm) {
          auto re = mul(o.re_, *invNorm);
          auto im = mul(Rational{-o.im_.num, o.im_.den}, *invNorm);
          if (re && im) return *this * Number(*re, *im);
        }
      }
    }
  }
  return inexact(value() / o.value());
}

Number Number::operator-() const {
  if (exact_) return Number(Rational{-re_.num, re_.den}, Rational{-im_.num, im_.den});
  return inexact(-approx_);
}

Number Number::pow(int exponent) const {
  if (exponent < 0) return Number(1) / pow(-exponent);
  Number result(1);
  Number base = *this;
  unsigned e = static_cast<unsigned>(exponent);
  while (e != 0) {
    if (e & 1u) result = result * base;
    base = base * base;
    e >>= 1u;
  }
  return result;
}

bool Number::operator==(const Number& o) const {
  if (exact_ != o.exact_) return false;
  if (exact_) return re_ == o.re_ && im_ == o.im_;
  return approx_ == o.approx_;
}

int Number::compare(const Number& o) const {
  if (exact_ != o.exact_) return exact_ ? -1 : 1;
  auto a = value();
  auto b = o.value();
  if (int c = cmp(a.real(), b.real())) return c;
  if (int c = cmp(a.imag(), b.imag())) return c;
  if (!exact_) return 0;
  // Equal doubles but distinct rationals are possible in principle.
  if (re_.num != o.re_.num) return re_.num < o.re_.num ? -1 : 1;
  if (re_.den != o.re_.den) return re_.den < o.re_.den ? -1 : 1;
  if (im_.num != o.im_.num) return im_.num < o.im_.num ? -1 : 1;
  if (im_.den != o.im_.den) return im_.den < o.im_.den ? -1 : 1;
  return 0;
}

std::size_t Number::hash() const {
  std::hash<std::int64_t> h;
  if (exact_) {
    return h(re_.num) * 31 + h(re_.den) * 131 + h(im_.num) * 1031 + h(im_.den) * 10037;
  }
  std::hash<double> hd;
  return hd(approx_.real()) * 7 + hd(approx_.imag()) + 0x9e3779b9;
}

std::string Number::toString() const {
  if (!exact_) {
    if (approx_.imag() == 0.0) return doubleText(approx_.real());
    return "(" + doubleText(approx_.real()) + " + " + doubleText(approx_.imag()) + "*I)";
  }
  if (im_.isZero()) return rationalText(re_);
  std::string imag;
  if (im_ == Rational{1, 1}) {
    imag = "I";
  } else if (im_ == Rational{-1, 1}) {
    imag = "-I";
  } else {
    imag = rationalText(im_) + "*I";
  }
  if (re_.isZero()) return imag;
  if (imag.front() == '-') return "(" + rationalText(re_) + " - " + imag.substr(1) + ")";
  return "(" + rationalText(re_) + " + " + imag + ")";
}

std::string Number::toPrefix() const {
  if (!exact_) {
    if (approx_.imag() == 0.0) return doubleText(approx_.real());
    return "(c " + doubleText(approx_.real()) + " " + doubleText(approx_.imag()) + ")";
  }
  if (im_.isZero()) return rationalText(re_);
  return "(c " + rationalText(re_) + " " + rationalText(im_) + ")";
}

}  // namespace cartan::expr
