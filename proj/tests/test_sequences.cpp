#include <doctest.h>

#include <random>

#include "portan/sequence_spec.hpp"

using namespace portan;

TEST_CASE("evaluate: closed-form variants") {
  auto geo = SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2));
  CHECK(geo.evaluate(3) == ExactScalar(1, 8));
  auto dyadic = SequenceSpec::dyadic_gaussian(ExactScalar(1));
  CHECK(dyadic.evaluate(2) == ExactScalar(1, 16));
  CHECK(dyadic.evaluate(3) == ExactScalar::pow2(-9));
  CHECK_THROWS_AS(geo.evaluate(0), ConfigError);
}

TEST_CASE("partition index is the 2-adic valuation plus one") {
  CHECK(partition_index(1) == 1);
  CHECK(partition_index(2) == 2);
  CHECK(partition_index(3) == 1);
  CHECK(partition_index(4) == 3);
  CHECK(partition_index(6) == 2);
  CHECK(partition_index(8) == 4);
  CHECK(partition_index(12) == 3);
}

TEST_CASE("starred perturbation divides by 2^(m(n))") {
  auto starred = SequenceSpec::starred(SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2)));
  CHECK(starred.evaluate(4) == ExactScalar(1, 128));  // m(4) = 3
  CHECK(starred.evaluate(1) == ExactScalar(1, 4));    // m(1) = 1
  CHECK(starred.evaluate(2) == ExactScalar(1, 16));   // m(2) = 2
}

TEST_CASE("ratio rules evaluate exactly and validate their range") {
  auto harmonic = SequenceSpec::ratio_rule(ExactScalar(1), "n*(n+1)^-1");
  CHECK(harmonic.evaluate(1) == ExactScalar(1));
  CHECK(harmonic.evaluate(5) == ExactScalar(1, 5));
  CHECK(harmonic.evaluate(17) == ExactScalar(1, 17));

  auto factorial = SequenceSpec::ratio_rule(ExactScalar(1), "(n+1)^-1");
  CHECK(factorial.evaluate(4) == ExactScalar(1, 24));  // 1/4!

  auto bad = SequenceSpec::ratio_rule(ExactScalar(1), "n");
  CHECK_THROWS_AS(bad.evaluate(3), ValidationError);
  auto bad2 = SequenceSpec::ratio_rule(ExactScalar(1), "2");
  CHECK_THROWS_AS(bad2.evaluate(2), ValidationError);
}

TEST_CASE("ratio expression grammar") {
  auto e = RatioExpr::parse("2^-(n*n)");
  CHECK(e.eval_raw(3) == BigRational(1, 512));
  auto p = RatioExpr::parse("(n+1)^-1");
  CHECK(p.eval_raw(3) == BigRational(1, 4));
  auto mixed = RatioExpr::parse("1 - 2^-(n)");
  CHECK(mixed.eval_raw(3) == BigRational(7, 8));
  CHECK_THROWS_AS(RatioExpr::parse("n^"), ConfigError);
  CHECK_THROWS_AS(RatioExpr::parse("(n"), ConfigError);
  CHECK_THROWS_AS(RatioExpr::parse("n %"), ConfigError);
  // 2^-(...) is reserved for base two
  CHECK_THROWS_AS(RatioExpr::parse("3^-(n)"), ConfigError);
}

TEST_CASE("certify_eventually_decreasing") {
  TailWindow w{8, 64};
  auto geo = SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2));
  CHECK(certify_eventually_decreasing(geo, w) == 1);

  auto bumped = SequenceSpec::explicit_prefix(
      {ExactScalar(1, 2), ExactScalar(3, 4)},
      SequenceSpec::geometric(ExactScalar(1, 2), ExactScalar(1, 2)));
  CHECK(certify_eventually_decreasing(bumped, w) == 2);

  auto starred = SequenceSpec::starred(SequenceSpec::dyadic_gaussian(ExactScalar(1)));
  CHECK(certify_eventually_decreasing(starred, w) == 1);

  // constant tails never certify
  auto constant = SequenceSpec::explicit_prefix(
      {ExactScalar(1, 2), ExactScalar(1, 2)},
      SequenceSpec::geometric(ExactScalar(1, 2), ExactScalar(1, 2)));
  CHECK(certify_eventually_decreasing(constant, TailWindow{1, 2}) == std::nullopt);
}

TEST_CASE("decreasing_subsequence is the greedy running minimum") {
  TailWindow w{4, 16};
  auto geo = SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2));
  auto ident = decreasing_subsequence(geo, w);
  REQUIRE(ident.has_value());
  CHECK(ident->size() == 16);
  CHECK((*ident)[0] == 1);
  CHECK((*ident)[15] == 16);

  auto bumpy = SequenceSpec::explicit_prefix(
      {ExactScalar(1, 2), ExactScalar(3, 4), ExactScalar(1, 4), ExactScalar(3, 8)},
      SequenceSpec::geometric(ExactScalar(1, 8), ExactScalar(1, 2)));
  auto picked = decreasing_subsequence(bumpy, w);
  REQUIRE(picked.has_value());
  CHECK((*picked)[0] == 1);
  CHECK((*picked)[1] == 3);
  CHECK((*picked)[2] == 5);
  CHECK((*picked)[3] == 6);

  auto duped = SequenceSpec::explicit_prefix(
      {ExactScalar(1, 2), ExactScalar(1, 2)},
      SequenceSpec::geometric(ExactScalar(1, 4), ExactScalar(1, 2)));
  auto skip = decreasing_subsequence(duped, w);
  REQUIRE(skip.has_value());
  CHECK((*skip)[0] == 1);
  CHECK((*skip)[1] == 3);
}

TEST_CASE("starred output over a fast base decreases with exploding ratios") {
  // base(n+1) <= 2^(-n^2) base(n)
  auto base = SequenceSpec::ratio_rule(ExactScalar(1, 2), "2^-(n*n)");
  auto starred = SequenceSpec::starred(base);
  TailWindow w{4, 24};
  CHECK(certify_eventually_decreasing(starred, w) == 1);
  std::vector<ExactScalar> vals = starred.evaluate_range(w.start, w.end + 1);
  ExactScalar min_ratio = vals[0] / vals[1];
  for (size_t i = 0; i + 1 < vals.size(); ++i) min_ratio = min(min_ratio, vals[i] / vals[i + 1]);
  CHECK(min_ratio >= ExactScalar::pow2(w.start));  // ratio exceeds any fixed bound deep enough
}

TEST_CASE("evaluate_range matches per-index evaluation") {
  std::mt19937_64 rng(3);
  std::vector<SequenceSpec> specs = {
      SequenceSpec::geometric(ExactScalar(3, 2), ExactScalar(2, 3)),
      SequenceSpec::dyadic_gaussian(ExactScalar(5, 7)),
      SequenceSpec::ratio_rule(ExactScalar(2), "n*(n+2)^-1"),
      SequenceSpec::starred(SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 3))),
      SequenceSpec::explicit_prefix({ExactScalar(9), ExactScalar(4)},
                                    SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2))),
      SequenceSpec::subsequence(2, 3, SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2))),
  };
  for (const auto& spec : specs) {
    auto range = spec.evaluate_range(1, 20);
    for (std::int64_t n = 1; n <= 20; ++n)
      CHECK(range[static_cast<size_t>(n - 1)] == spec.evaluate(n));
  }
}

TEST_CASE("scaled specs canonicalize") {
  auto geo = SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2));
  auto s = SequenceSpec::scaled(ExactScalar(2), geo);
  CHECK(s.describe() == "geometric(2, 1/2)");
  auto ss = SequenceSpec::scaled(ExactScalar(3), SequenceSpec::scaled(ExactScalar(2), geo));
  CHECK(ss.describe() == "geometric(6, 1/2)");
  auto sub = SequenceSpec::subsequence(1, 2, geo);
  CHECK(sub.evaluate(2) == geo.evaluate(3));
  CHECK(SequenceSpec::scaled(ExactScalar(1), geo).describe() == geo.describe());
}

TEST_CASE("json round trip preserves evaluation") {
  std::vector<SequenceSpec> specs = {
      SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2)),
      SequenceSpec::ratio_rule(ExactScalar(1), "n*(n+1)^-1"),
      SequenceSpec::starred(SequenceSpec::dyadic_gaussian(ExactScalar(2))),
      SequenceSpec::explicit_prefix({ExactScalar(1, 2)},
                                    SequenceSpec::geometric(ExactScalar(1, 4), ExactScalar(1, 2))),
      SequenceSpec::subsequence(2, 2, SequenceSpec::dyadic_gaussian(ExactScalar(1))),
  };
  for (const auto& spec : specs) {
    SequenceSpec back = SequenceSpec::from_json(spec.to_json());
    for (std::int64_t n : {1, 2, 5, 11}) CHECK(back.evaluate(n) == spec.evaluate(n));
  }
  CHECK_THROWS_AS(SequenceSpec::from_json(Json{{"type", "unknown"}}), ConfigError);
}

TEST_CASE("scaling sequences validate decay") {
  TailWindow w{8, 64};
  auto ok = ScalingSequence::make(SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2)), w);
  CHECK(ok.decreasing_from == 1);
  auto bumped = ScalingSequence::make(
      SequenceSpec::explicit_prefix({ExactScalar(1, 4), ExactScalar(1, 2)},
                                    SequenceSpec::geometric(ExactScalar(1, 4), ExactScalar(1, 2))),
      w);
  CHECK(bumped.decreasing_from == 2);
  // decreasing but not to zero: partial products of (1 - 2^-n) stay above 1/4
  auto stuck = SequenceSpec::ratio_rule(ExactScalar(1), "1-2^-(n)");
  CHECK_THROWS_AS(ScalingSequence::make(stuck, w), ValidationError);
}
