#include "portan/rational.hpp"

#include <cctype>

namespace portan {

namespace {

// cpp_int's string constructor treats a leading 0 as an octal prefix
BigInt from_digits(std::string d) {
  size_t nz = d.find_first_not_of('0');
  if (nz == std::string::npos) return BigInt(0);
  return BigInt(d.substr(nz));
}

BigRational make_checked(BigInt num, BigInt den) {
  if (den == 0) throw ValidationError("ExactScalar: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  if (num < 0) throw ValidationError("ExactScalar: negative value");
  return BigRational(num, den);
}

}  // namespace

BigRational ExactScalar::check_int(long long n) {
  if (n < 0) throw ValidationError("ExactScalar: negative value");
  return BigRational(n);
}

ExactScalar::ExactScalar(long long num, long long den) : v_(make_checked(BigInt(num), BigInt(den))) {}

ExactScalar::ExactScalar(BigInt num, BigInt den) : v_(make_checked(std::move(num), std::move(den))) {}

ExactScalar ExactScalar::from_raw(BigRational r) {
  if (r < 0) throw ValidationError("ExactScalar: negative value");
  return ExactScalar(std::move(r), guarded{});
}

ExactScalar ExactScalar::pow2(long long k) {
  BigInt one(1);
  if (k >= 0) return ExactScalar(one << static_cast<unsigned>(k), one);
  return ExactScalar(one, one << static_cast<unsigned>(-k));
}

ExactScalar operator-(const ExactScalar& a, const ExactScalar& b) {
  if (b.v_ > a.v_) throw ValidationError("ExactScalar: subtraction would be negative");
  return ExactScalar(a.v_ - b.v_, ExactScalar::guarded{});
}

ExactScalar operator/(const ExactScalar& a, const ExactScalar& b) {
  if (b.is_zero()) throw ValidationError("ExactScalar: division by zero");
  return ExactScalar(a.v_ / b.v_, ExactScalar::guarded{});
}

ExactScalar ExactScalar::pow(long long e) const {
  if (e < 0) {
    if (is_zero()) throw ValidationError("ExactScalar: negative power of zero");
    return reciprocal().pow(-e);
  }
  BigRational acc(1);
  BigRational base = v_;
  unsigned long long n = static_cast<unsigned long long>(e);
  while (n) {
    if (n & 1ULL) acc *= base;
    base *= base;
    n >>= 1ULL;
  }
  return ExactScalar(std::move(acc), guarded{});
}

ExactScalar ExactScalar::reciprocal() const {
  if (is_zero()) throw ValidationError("ExactScalar: reciprocal of zero");
  return ExactScalar(BigRational(1) / v_, guarded{});
}

std::string ExactScalar::str() const {
  std::string s = numerator().str();
  if (!is_integer()) {
    s += '/';
    s += denominator().str();
  }
  return s;
}

ExactScalar ExactScalar::parse(std::string_view text) {
  // strip surrounding whitespace
  size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  std::string s(text.substr(b, e - b));
  if (s.empty()) throw ConfigError("ExactScalar: empty literal");

  auto digits_only = [](const std::string& d) {
    if (d.empty()) return false;
    for (char c : d)
      if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
  };

  if (auto caret = s.find('^'); caret != std::string::npos) {
    std::string base = s.substr(0, caret);
    std::string expo = s.substr(caret + 1);
    bool neg = !expo.empty() && expo[0] == '-';
    if (neg) expo.erase(0, 1);
    if (base != "2" || !digits_only(expo))
      throw ConfigError("ExactScalar: unsupported power literal '" + s + "'");
    long long k = std::stoll(expo);
    return pow2(neg ? -k : k);
  }
  if (auto slash = s.find('/'); slash != std::string::npos) {
    std::string num = s.substr(0, slash);
    std::string den = s.substr(slash + 1);
    if (!digits_only(num) || !digits_only(den))
      throw ConfigError("ExactScalar: bad rational literal '" + s + "'");
    return ExactScalar(from_digits(num), from_digits(den));
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot);
    std::string fp = s.substr(dot + 1);
    if (ip.empty()) ip = "0";
    if (!digits_only(ip) || (!fp.empty() && !digits_only(fp)))
      throw ConfigError("ExactScalar: bad decimal literal '" + s + "'");
    BigInt num = from_digits(ip + fp);
    BigInt den(1);
    for (size_t i = 0; i < fp.size(); ++i) den *= 10;
    return ExactScalar(std::move(num), std::move(den));
  }
  if (!digits_only(s)) throw ConfigError("ExactScalar: bad literal '" + s + "'");
  return ExactScalar(from_digits(s), BigInt(1));
}

ExactScalar abs_diff(const ExactScalar& a, const ExactScalar& b) { return a >= b ? a - b : b - a; }

const ExactScalar& min(const ExactScalar& a, const ExactScalar& b) { return b < a ? b : a; }

const ExactScalar& max(const ExactScalar& a, const ExactScalar& b) { return b > a ? b : a; }

namespace {

BigInt floor_of(const BigRational& r) {
  BigInt num = boost::multiprecision::numerator(r);
  BigInt den = boost::multiprecision::denominator(r);
  BigInt q = num / den;
  if (num < 0 && q * den != num) --q;
  return q;
}

BigRational simplest_raw(const BigRational& lo, const BigRational& hi) {
  if (lo == hi) return lo;
  BigInt fl = floor_of(lo);
  BigInt ceil_lo = fl;
  if (BigRational(fl) != lo) ++ceil_lo;
  if (BigRational(ceil_lo) <= hi) return BigRational(ceil_lo);
  // same integer part; recurse on the reciprocal of the fractional parts
  BigRational flo = lo - BigRational(fl);
  BigRational fhi = hi - BigRational(fl);
  BigRational inner = simplest_raw(BigRational(1) / fhi, BigRational(1) / flo);
  return BigRational(fl) + BigRational(1) / inner;
}

}  // namespace

ExactScalar simplest_in_interval(const ExactScalar& lo, const ExactScalar& hi) {
  if (hi < lo) throw ConfigError("simplest_in_interval: empty interval");
  return ExactScalar::from_raw(simplest_raw(lo.raw(), hi.raw()));
}

const ExactScalar& ExtendedScalar::value() const {
  if (!finite_) throw ValidationError("ExtendedScalar: value of infinity");
  return v_;
}

}  // namespace portan
