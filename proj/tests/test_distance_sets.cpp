#include <doctest.h>

#include <algorithm>
#include <random>

#include "portan/distance_set.hpp"

using namespace portan;

namespace {

DistanceSet finite_set(std::vector<ExactScalar> values) {
  return DistanceSet::make({}, std::move(values));
}

DistanceSet geometric_set(long long num, long long den) {
  return DistanceSet::make({SequenceSpec::geometric(ExactScalar(1), ExactScalar(num, den))}, {});
}

// brute-force gap scan over the sorted members of a finite set
std::vector<GapComponent> brute_gaps(std::vector<ExactScalar> members, const ExactScalar& h,
                                     const ExactScalar& eps) {
  std::sort(members.begin(), members.end(), [](auto& x, auto& y) { return x > y; });
  members.erase(std::unique(members.begin(), members.end()), members.end());
  std::vector<GapComponent> out;
  ExactScalar prev = h;
  bool prev_in_e = false;
  for (const auto& m : members) {
    if (m > h) continue;
    if (m == prev) {
      prev_in_e = true;
      continue;
    }
    GapComponent g{m, prev,
                   prev_in_e ? GapComponent::Kind::Interior : GapComponent::Kind::TruncatedAtH};
    if (g.a < eps) return out;
    out.push_back(g);
    prev = m;
    prev_in_e = true;
  }
  if (!prev.is_zero() && eps.is_zero())
    out.push_back({ExactScalar(0), prev, GapComponent::Kind::TouchesZero});
  return out;
}

}  // namespace

TEST_CASE("members_in merges tails and finite parts exactly") {
  auto fin = finite_set({ExactScalar(1, 2), ExactScalar(1, 4)});
  auto r1 = members_in(fin, ExactScalar(0), ExactScalar(1));
  CHECK(r1.values == std::vector<ExactScalar>{ExactScalar(1, 4), ExactScalar(1, 2)});

  auto geo = geometric_set(1, 2);
  auto r2 = members_in(geo, ExactScalar(1, 8), ExactScalar(1, 2));
  CHECK(r2.values ==
        std::vector<ExactScalar>{ExactScalar(1, 8), ExactScalar(1, 4), ExactScalar(1, 2)});

  auto both = DistanceSet::make({SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2)),
                                 SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 3))},
                                {});
  auto r3 = members_in(both, ExactScalar(1, 9), ExactScalar(1, 2));
  CHECK(r3.values == std::vector<ExactScalar>{ExactScalar(1, 9), ExactScalar(1, 8),
                                              ExactScalar(1, 4), ExactScalar(1, 3),
                                              ExactScalar(1, 2)});
  CHECK(r3.complete);
}

TEST_CASE("members_in needs a cap to walk down to zero") {
  auto geo = geometric_set(1, 2);
  CHECK_THROWS_AS(members_in(geo, ExactScalar(0), ExactScalar(1)), ResourceError);
  auto capped = members_in(geo, ExactScalar(0), ExactScalar(1), 5);
  CHECK(capped.values.size() == 5);
  CHECK(!capped.complete);
}

TEST_CASE("membership is decided by bounded enumeration") {
  auto geo = geometric_set(1, 2);
  CHECK(contains(geo, ExactScalar(1, 1024)));
  CHECK(!contains(geo, ExactScalar(1, 3)));
  CHECK(!contains(geo, ExactScalar(0)));
  auto with_zero = DistanceSet::make({}, {ExactScalar(1)}, true);
  CHECK(contains(with_zero, ExactScalar(0)));
  CHECK_THROWS_AS(contains(geo, ExactScalar::pow2(-20000)), ResourceError);
}

TEST_CASE("gap components: finite set") {
  auto fin = finite_set({ExactScalar(1, 4), ExactScalar(1, 2)});
  auto gl = gap_components(fin, ExactScalar(1), ExactScalar(0));
  REQUIRE(gl.gaps.size() == 3);
  CHECK(gl.gaps[0].a == ExactScalar(1, 2));
  CHECK(gl.gaps[0].b == ExactScalar(1));
  CHECK(gl.gaps[0].kind == GapComponent::Kind::TruncatedAtH);
  CHECK(gl.gaps[1].a == ExactScalar(1, 4));
  CHECK(gl.gaps[1].b == ExactScalar(1, 2));
  CHECK(gl.gaps[1].kind == GapComponent::Kind::Interior);
  CHECK(gl.gaps[2].a == ExactScalar(0));
  CHECK(gl.gaps[2].b == ExactScalar(1, 4));
  CHECK(gl.gaps[2].kind == GapComponent::Kind::TouchesZero);
}

TEST_CASE("gap components: geometric tail with a floor") {
  auto geo = geometric_set(1, 2);
  auto gl = gap_components(geo, ExactScalar(1), ExactScalar(1, 32));
  REQUIRE(gl.gaps.size() == 5);
  CHECK(gl.gaps[0].kind == GapComponent::Kind::TruncatedAtH);  // (1/2, 1)
  for (int k = 1; k <= 4; ++k) {
    CHECK(gl.gaps[static_cast<size_t>(k)].a == ExactScalar::pow2(-k - 1));
    CHECK(gl.gaps[static_cast<size_t>(k)].b == ExactScalar::pow2(-k));
    CHECK(gl.gaps[static_cast<size_t>(k)].kind == GapComponent::Kind::Interior);
  }
  CHECK(gl.complete);
}

TEST_CASE("gap components: dyadic gaussian matches the consecutive-term gaps") {
  auto dy = DistanceSet::make({SequenceSpec::dyadic_gaussian(ExactScalar(1))}, {});
  auto gl = gap_components(dy, ExactScalar(1, 2), ExactScalar::pow2(-20));
  REQUIRE(gl.gaps.size() == 3);
  CHECK(gl.gaps[0].a == ExactScalar::pow2(-4));
  CHECK(gl.gaps[0].b == ExactScalar::pow2(-1));
  CHECK(gl.gaps[0].kind == GapComponent::Kind::Interior);  // h = 1/2 is a member
  CHECK(gl.gaps[1].a == ExactScalar::pow2(-9));
  CHECK(gl.gaps[1].b == ExactScalar::pow2(-4));
  CHECK(gl.gaps[2].a == ExactScalar::pow2(-16));
  CHECK(gl.gaps[2].b == ExactScalar::pow2(-9));
}

TEST_CASE("gap cap exhaustion is flagged, not silent") {
  auto geo = geometric_set(1, 2);
  auto gl = gap_components(geo, ExactScalar(1), ExactScalar::pow2(-30), 4);
  CHECK(!gl.complete);
  CHECK(gl.gaps.size() == 4);
  CHECK(!gl.note.empty());
}

TEST_CASE("gap components agree with a brute-force scan on random finite sets") {
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<long long> num(1, 64), den(1, 64), count(0, 12);
  for (int round = 0; round < 200; ++round) {
    std::vector<ExactScalar> members;
    int k = static_cast<int>(count(rng));
    for (int i = 0; i < k; ++i) members.push_back(ExactScalar(num(rng), 64 + den(rng)));
    ExactScalar h(num(rng), 48);
    if (h.is_zero()) continue;
    ExactScalar eps = round % 3 == 0 ? ExactScalar(1, 128) : ExactScalar(0);
    if (eps >= h) continue;
    auto expect = brute_gaps(members, h, eps);
    auto got = gap_components(finite_set(members), h, eps);
    REQUIRE(got.gaps.size() == expect.size());
    for (size_t i = 0; i < expect.size(); ++i) {
      CHECK(got.gaps[i].a == expect[i].a);
      CHECK(got.gaps[i].b == expect[i].b);
      CHECK(got.gaps[i].kind == expect[i].kind);
    }
  }
}

TEST_CASE("lambda: examples and monotonicity") {
  auto fin = finite_set({ExactScalar(1, 4), ExactScalar(1, 2)});
  CHECK(lambda(fin, ExactScalar(1)) == ExactScalar(1, 2));

  auto far = finite_set({ExactScalar(2)});
  CHECK(lambda(far, ExactScalar(1)) == ExactScalar(1));  // E cap (0,h) empty

  auto geo = geometric_set(1, 2);
  CHECK(lambda(geo, ExactScalar(3, 4)) == ExactScalar(1, 4));
  CHECK(lambda(geo, ExactScalar(1)) == ExactScalar(1, 2));

  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long long> num(1, 96);
  for (int round = 0; round < 100; ++round) {
    std::vector<ExactScalar> members;
    for (int i = 0; i < 6; ++i) members.push_back(ExactScalar(num(rng), 97));
    auto set = finite_set(members);
    ExactScalar h1(num(rng), 97), h2 = h1 + ExactScalar(num(rng), 97);
    if (h1.is_zero()) continue;
    CHECK(lambda(set, h1) <= lambda(set, h2));
  }
}

TEST_CASE("porosity of geometric sets is exactly 1 - q") {
  TailWindow w{32, 256};
  for (auto [num, den] : {std::pair{1LL, 2LL}, {1LL, 3LL}, {3LL, 4LL}}) {
    ExactScalar q(num, den);
    auto rep = porosity_report(geometric_set(num, den), std::nullopt, w);
    CHECK(rep.estimate.verdict == Verdict::Converges);
    CHECK(rep.estimate.value == ExactScalar(1) - q);
    CHECK(rep.estimate.tail_max == ExactScalar(1) - q);
    // analytic oracle: lambda(h)/h never exceeds 1 - q, and attains it at members
    auto set = geometric_set(num, den);
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<long long> pick(1, 4096);
    for (int i = 0; i < 120; ++i) {
      ExactScalar h(pick(rng), 8192);
      CHECK(lambda(set, h) / h <= ExactScalar(1) - q);
    }
    for (int n = 3; n < 9; ++n) {
      ExactScalar h = q.pow(n);
      CHECK(lambda(set, h) / h == ExactScalar(1) - q);
    }
  }
}

TEST_CASE("porosity: dyadic gaussian certifies strong porosity") {
  auto dy = DistanceSet::make({SequenceSpec::dyadic_gaussian(ExactScalar(1))}, {});
  auto rep = porosity_report(dy, std::nullopt, TailWindow{32, 256});
  CHECK(rep.estimate.verdict == Verdict::Converges);
  CHECK(rep.estimate.value >= ExactScalar(1) - ExactScalar::pow2(-20));
  CHECK(rep.porous_certificate);
}

TEST_CASE("porosity: the harmonic set heads to zero") {
  auto harmonic =
      DistanceSet::make({SequenceSpec::ratio_rule(ExactScalar(1), "n*(n+1)^-1")}, {});
  auto rep = porosity_report(harmonic, std::nullopt, TailWindow{32, 128});
  CHECK(rep.estimate.liminf_estimate() <= ExactScalar::pow2(-5));
  CHECK(!rep.porous_certificate);
}

TEST_CASE("porosity grid lambdas agree with the direct operation") {
  // dual route: the shared backward scan vs per-anchor lambda calls
  auto set = DistanceSet::make({SequenceSpec::geometric(ExactScalar(1), ExactScalar(2, 3))},
                               {ExactScalar(7, 8)});
  MemberCursor cursor(set);
  std::vector<ExactScalar> members;
  auto m = cursor.next_at_most(ExactScalar(7, 8));
  while (m && members.size() < 24) {
    members.push_back(*m);
    m = cursor.next();
  }
  for (size_t k = 0; k + 1 < members.size() - 1; ++k) {
    ExactScalar mid = (members[k] + members[k + 1]) / ExactScalar(2);
    CHECK(lambda(set, mid) == max(mid - members[k + 1], lambda(set, members[k + 1])));
  }
}

TEST_CASE("porosity of a set with isolated zero is vacuously 1") {
  auto fin = finite_set({ExactScalar(1, 3), ExactScalar(2, 3)});
  auto rep = porosity_report(fin, std::nullopt, TailWindow{8, 32});
  CHECK(rep.estimate.verdict == Verdict::Converges);
  CHECK(rep.estimate.value == ExactScalar(1));
}

TEST_CASE("scale_set stays symbolic and preserves structure") {
  auto geo = geometric_set(1, 2);
  auto doubled = scale_set(geo, ExactScalar(2));
  CHECK(doubled.tails[0].describe() == "geometric(2, 1/2)");
  auto same = scale_set(geo, ExactScalar(1));
  CHECK(same.tails[0].describe() == geo.tails[0].describe());
  // weak self-similarity probe: for t in E, E/t contains 1
  for (int n = 1; n < 6; ++n) {
    ExactScalar t = ExactScalar::pow2(-n);
    CHECK(contains(geo, t));
    auto rescaled = scale_set(geo, t.reciprocal());
    CHECK(contains(rescaled, ExactScalar(1)));
  }
}

TEST_CASE("distance set validation rejects bad tails") {
  CHECK_THROWS_AS(DistanceSet::make({SequenceSpec::explicit_prefix(
                                        {ExactScalar(1, 4), ExactScalar(1, 2)},
                                        SequenceSpec::geometric(ExactScalar(1, 4), ExactScalar(1, 2)))},
                                    {}),
                  ValidationError);
  CHECK_THROWS_AS(DistanceSet::make({}, {ExactScalar(0)}), ValidationError);
}

TEST_CASE("distance set json round trip") {
  auto set = DistanceSet::make({SequenceSpec::geometric(ExactScalar(1), ExactScalar(1, 2))},
                               {ExactScalar(3, 4)}, true);
  auto back = DistanceSet::from_json(set.to_json());
  CHECK(back.tails.size() == 1);
  CHECK(back.finite_part == set.finite_part);
  CHECK(back.contains_zero);
  CHECK(back.tails[0].evaluate(5) == ExactScalar(1, 32));
}
