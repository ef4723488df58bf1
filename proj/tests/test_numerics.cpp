#include <doctest.h>

#include <random>

#include "portan/limits.hpp"
#include "portan/rational.hpp"

using namespace portan;

namespace {

ExactScalar random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long long> num(0, 1 << 16);
  std::uniform_int_distribution<long long> den(1, 1 << 12);
  return ExactScalar(num(rng), den(rng));
}

}  // namespace

TEST_CASE("arithmetic is exact and association-independent") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 300; ++i) {
    ExactScalar a = random_rational(rng), b = random_rational(rng), c = random_rational(rng);
    CHECK((a + b) + c == a + (b + c));
    CHECK((a * b) * c == a * (b * c));
    CHECK(a * (b + c) == a * b + a * c);
    if (!c.is_zero()) CHECK((a + b) / c == a / c + b / c);
  }
  // reduced representation
  ExactScalar x(6, 8);
  CHECK(x.numerator() == 3);
  CHECK(x.denominator() == 4);
}

TEST_CASE("nonnegativity guard") {
  ExactScalar a(1, 2), b(3, 4);
  CHECK(b - a == ExactScalar(1, 4));
  CHECK_THROWS_AS(a - b, ValidationError);
  CHECK(abs_diff(a, b) == ExactScalar(1, 4));
  CHECK_THROWS_AS(ExactScalar(1, 0), ValidationError);
  CHECK_THROWS_AS(a / ExactScalar(0), ValidationError);
}

TEST_CASE("parse accepts rationals, decimals and powers of two") {
  CHECK(ExactScalar::parse("3/4") == ExactScalar(3, 4));
  CHECK(ExactScalar::parse("0.25") == ExactScalar(1, 4));
  CHECK(ExactScalar::parse("12") == ExactScalar(12));
  CHECK(ExactScalar::parse("2^-5") == ExactScalar(1, 32));
  CHECK(ExactScalar::parse("2^10") == ExactScalar(1024));
  CHECK_THROWS_AS(ExactScalar::parse("-1/2"), ConfigError);
  CHECK_THROWS_AS(ExactScalar::parse("x"), ConfigError);
}

TEST_CASE("pow handles negative exponents") {
  ExactScalar half(1, 2);
  CHECK(half.pow(3) == ExactScalar(1, 8));
  CHECK(half.pow(-2) == ExactScalar(4));
  CHECK(ExactScalar::pow2(-4) == ExactScalar(1, 16));
}

TEST_CASE("simplest_in_interval") {
  CHECK(simplest_in_interval(ExactScalar(1, 3), ExactScalar(1, 2)) == ExactScalar(1, 2));
  CHECK(simplest_in_interval(ExactScalar(1, 5), ExactScalar(2, 5)) == ExactScalar(1, 3));
  CHECK(simplest_in_interval(ExactScalar(5, 2), ExactScalar(7, 2)) == ExactScalar(3));
  ExactScalar c(17, 12);
  CHECK(simplest_in_interval(c, c) == c);
  CHECK(simplest_in_interval(ExactScalar(0), ExactScalar(1, 7)) == ExactScalar(0));
}

TEST_CASE("tail_stats: constant sequence converges exactly") {
  auto e = tail_stats([](std::int64_t) { return ExactScalar(3, 2); }, TailWindow{32, 256});
  CHECK(e.verdict == Verdict::Converges);
  CHECK(e.value == ExactScalar(3, 2));
  CHECK(e.tail_min == ExactScalar(3, 2));
  CHECK(e.tail_max == ExactScalar(3, 2));
}

TEST_CASE("tail_stats: 2 + 1/n drift is honest about the tolerance") {
  auto drift = [](std::int64_t n) { return ExactScalar(2) + ExactScalar(1) / ExactScalar(n); };
  // at the default tol = 2^-20 the drift over (32,256) does not certify
  auto e = tail_stats(drift, TailWindow{32, 256});
  CHECK(e.verdict == Verdict::Oscillates);
  CHECK(e.tail_max == ExactScalar(2) + ExactScalar(1, 32));
  CHECK(e.tail_min == ExactScalar(2) + ExactScalar(1, 256));
  // coarser tolerance and a deeper window certify a value within the band
  Settings coarse;
  coarse.tol = ExactScalar::pow2(-10);
  auto deep = tail_stats(drift, TailWindow{1024, 8192}, coarse);
  CHECK(deep.verdict == Verdict::Converges);
  CHECK(deep.tail_min <= deep.value);
  CHECK(deep.value <= deep.tail_max);
  CHECK(abs_diff(deep.value, ExactScalar(2)) <= ExactScalar::pow2(-9));
}

TEST_CASE("tail_stats: divergence needs the whole tail beyond the cap") {
  auto id = [](std::int64_t n) { return ExactScalar(n); };
  CHECK(tail_stats(id, TailWindow{1000001, 1000033}).verdict == Verdict::Diverges);
  // at a shallow window the same sequence merely fails to certify
  CHECK(tail_stats(id, TailWindow{32, 256}).verdict == Verdict::Oscillates);
  // an exactly constant huge sequence still converges
  auto e = tail_stats([](std::int64_t) { return ExactScalar(10000000); }, TailWindow{32, 64});
  CHECK(e.verdict == Verdict::Converges);
  CHECK(e.value == ExactScalar(10000000));
}

TEST_CASE("tail_stats: degenerate window is a configuration error") {
  auto one = [](std::int64_t) { return ExactScalar(1); };
  CHECK_THROWS_AS(tail_stats(one, TailWindow{256, 32}), ConfigError);
  CHECK_THROWS_AS(tail_stats(one, TailWindow{32, 32}), ConfigError);
}

TEST_CASE("window refinement keeps converged values inside the old band") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 100; ++i) {
    ExactScalar c = random_rational(rng) + ExactScalar(1, 7);
    std::uniform_int_distribution<std::int64_t> cut(1, 30);
    std::int64_t settle = cut(rng);  // constant from `settle` on
    auto seq = [&](std::int64_t n) { return n < settle ? c + ExactScalar(1, n) : c; };
    TailWindow w0{32, 128}, w1{32, 512};
    auto e0 = tail_stats(seq, w0);
    auto e1 = tail_stats(seq, w1);
    REQUIRE(e0.verdict == Verdict::Converges);
    REQUIRE(e1.verdict == Verdict::Converges);
    CHECK(abs_diff(e0.value, e1.value) <= e0.tail_max - e0.tail_min);
  }
}

TEST_CASE("limsup_stats: suffix sup of an attained limsup stabilizes") {
  std::vector<ExactScalar> vals;
  TailWindow w{8, 40};
  for (std::int64_t n = w.start; n <= w.end; ++n)
    vals.push_back(n % 2 == 0 ? ExactScalar(2) : ExactScalar(1));
  auto e = limsup_stats_values(vals, w);
  CHECK(e.verdict == Verdict::Converges);
  CHECK(e.value == ExactScalar(2));

  // strictly decreasing values never stabilize their suffix sup
  std::vector<ExactScalar> dec;
  for (std::int64_t n = w.start; n <= w.end; ++n) dec.push_back(ExactScalar(1) / ExactScalar(n));
  auto d = limsup_stats_values(dec, w);
  CHECK(d.verdict == Verdict::Oscillates);
  CHECK(d.tail_min == ExactScalar(1, 40));
}

TEST_CASE("trend helpers") {
  std::vector<ExactScalar> growing, flat, dying;
  for (std::int64_t n = 1; n <= 32; ++n) {
    growing.push_back(ExactScalar(n));
    flat.push_back(ExactScalar(1, 2));
    dying.push_back(ExactScalar(1) / ExactScalar(n * n));
  }
  CHECK(growth_trend(growing));
  CHECK(!growth_trend(flat));
  CHECK(!growth_trend(dying));
  CHECK(vanishing_certificate(dying, ExactScalar::pow2(-20)));
  CHECK(!vanishing_certificate(flat, ExactScalar::pow2(-20)));
  CHECK(!vanishing_certificate(growing, ExactScalar::pow2(-20)));
}
