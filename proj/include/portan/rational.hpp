#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "portan/errors.hpp"

namespace portan {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Nonnegative rational with exact arithmetic. Always in lowest terms with a
// positive denominator (the backing type maintains that); the nonnegativity
// guard is ours.
class ExactScalar {
 public:
  ExactScalar() : v_(0) {}
  ExactScalar(long long n) : v_(check_int(n)) {}  // NOLINT: implicit by design
  ExactScalar(long long num, long long den);
  ExactScalar(BigInt num, BigInt den);

  static ExactScalar from_raw(BigRational r);
  // Accepts "p/q", integers, plain decimals ("0.125"), and "2^k" / "2^-k".
  static ExactScalar parse(std::string_view text);
  static ExactScalar pow2(long long k);

  const BigRational& raw() const { return v_; }
  BigInt numerator() const { return boost::multiprecision::numerator(v_); }
  BigInt denominator() const { return boost::multiprecision::denominator(v_); }
  bool is_zero() const { return v_ == 0; }
  bool is_integer() const { return denominator() == 1; }
  double to_double() const { return v_.convert_to<double>(); }
  std::string str() const;

  // Integer power; negative exponents require a nonzero value.
  ExactScalar pow(long long e) const;
  ExactScalar reciprocal() const;

  friend ExactScalar operator+(const ExactScalar& a, const ExactScalar& b) {
    return ExactScalar(a.v_ + b.v_, guarded{});
  }
  // Subtraction keeps the nonnegativity invariant; use abs_diff for distances.
  friend ExactScalar operator-(const ExactScalar& a, const ExactScalar& b);
  friend ExactScalar operator*(const ExactScalar& a, const ExactScalar& b) {
    return ExactScalar(a.v_ * b.v_, guarded{});
  }
  friend ExactScalar operator/(const ExactScalar& a, const ExactScalar& b);

  ExactScalar& operator+=(const ExactScalar& b) { return *this = *this + b; }
  ExactScalar& operator*=(const ExactScalar& b) { return *this = *this * b; }

  friend bool operator==(const ExactScalar& a, const ExactScalar& b) { return a.v_ == b.v_; }
  friend bool operator!=(const ExactScalar& a, const ExactScalar& b) { return a.v_ != b.v_; }
  friend bool operator<(const ExactScalar& a, const ExactScalar& b) { return a.v_ < b.v_; }
  friend bool operator<=(const ExactScalar& a, const ExactScalar& b) { return a.v_ <= b.v_; }
  friend bool operator>(const ExactScalar& a, const ExactScalar& b) { return a.v_ > b.v_; }
  friend bool operator>=(const ExactScalar& a, const ExactScalar& b) { return a.v_ >= b.v_; }

 private:
  struct guarded {};  // tag: value already known nonnegative
  ExactScalar(BigRational v, guarded) : v_(std::move(v)) {}
  static BigRational check_int(long long n);
  BigRational v_;
};

ExactScalar abs_diff(const ExactScalar& a, const ExactScalar& b);
const ExactScalar& min(const ExactScalar& a, const ExactScalar& b);
const ExactScalar& max(const ExactScalar& a, const ExactScalar& b);

// The continued-fraction-simplest rational in the closed interval [lo, hi].
// Exact on degenerate intervals: simplest_in_interval(c, c) == c.
ExactScalar simplest_in_interval(const ExactScalar& lo, const ExactScalar& hi);

// Either a finite ExactScalar or +infinity (used for rho_* of singleton
// spaces and for local constancy radii of constant maps).
class ExtendedScalar {
 public:
  ExtendedScalar() : finite_(false) {}
  ExtendedScalar(ExactScalar v) : finite_(true), v_(std::move(v)) {}  // NOLINT
  static ExtendedScalar infinity() { return ExtendedScalar(); }
  bool is_finite() const { return finite_; }
  const ExactScalar& value() const;
  std::string str() const { return finite_ ? v_.str() : "inf"; }
  friend bool operator==(const ExtendedScalar& a, const ExtendedScalar& b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.v_ == b.v_;
  }
  friend bool operator<(const ExtendedScalar& a, const ExtendedScalar& b) {
    if (!a.finite_) return false;
    return !b.finite_ || a.v_ < b.v_;
  }

 private:
  bool finite_;
  ExactScalar v_;
};

}  // namespace portan
