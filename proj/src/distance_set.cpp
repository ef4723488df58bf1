#include "portan/distance_set.hpp"

#include <algorithm>

namespace portan {

// ---------------------------------------------------------------------------
// DistanceSet
// ---------------------------------------------------------------------------

DistanceSet DistanceSet::make(std::vector<SequenceSpec> tails, std::vector<ExactScalar> finite_part,
                              bool contains_zero, TailWindow window, const Settings& s) {
  window.validate();
  for (const auto& tail : tails) {
    auto from = certify_eventually_decreasing(tail, window);
    if (!from || *from != 1)
      throw ValidationError("distance set tail " + tail.describe() +
                            " is not strictly decreasing from its first term");
    std::vector<ExactScalar> tail_vals = tail.evaluate_range(window.start, window.end);
    if (!vanishing_certificate(tail_vals, s.tol))
      throw ValidationError("distance set tail " + tail.describe() +
                            " has no finite-horizon decay-to-zero certificate");
  }
  for (const auto& v : finite_part)
    if (v.is_zero()) throw ValidationError("distance set finite part must be strictly positive");
  std::sort(finite_part.begin(), finite_part.end(),
            [](const ExactScalar& x, const ExactScalar& y) { return x > y; });
  finite_part.erase(std::unique(finite_part.begin(), finite_part.end()), finite_part.end());
  return DistanceSet{std::move(tails), std::move(finite_part), contains_zero};
}

std::optional<ExactScalar> DistanceSet::max_member() const {
  std::optional<ExactScalar> best;
  for (const auto& tail : tails) {
    ExactScalar first = tail.evaluate(1);
    if (!best || first > *best) best = first;
  }
  if (!finite_part.empty() && (!best || finite_part.front() > *best)) best = finite_part.front();
  return best;
}

Json DistanceSet::to_json() const {
  Json jt = Json::array();
  for (const auto& t : tails) jt.push_back(t.to_json());
  Json jf = Json::array();
  for (const auto& v : finite_part) jf.push_back(rational_to_json(v));
  return Json{{"tails", jt}, {"finite_part", jf}, {"contains_zero", contains_zero}};
}

DistanceSet DistanceSet::from_json(const Json& j, TailWindow window, const Settings& s) {
  if (!j.is_object()) throw ConfigError("distance set: expected an object");
  std::vector<SequenceSpec> tails;
  if (j.contains("tails"))
    for (const auto& t : j.at("tails")) tails.push_back(SequenceSpec::from_json(t));
  std::vector<ExactScalar> finite;
  if (j.contains("finite_part"))
    for (const auto& v : j.at("finite_part")) finite.push_back(rational_from_json(v));
  bool zero = j.value("contains_zero", false);
  return make(std::move(tails), std::move(finite), zero, window, s);
}

std::string to_string(GapComponent::Kind k) {
  switch (k) {
    case GapComponent::Kind::Interior: return "interior";
    case GapComponent::Kind::TouchesZero: return "touches_zero";
    case GapComponent::Kind::TruncatedAtH: return "truncated_at_h";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// MemberCursor
// ---------------------------------------------------------------------------

const ExactScalar& MemberCursor::TailState::value_at(std::int64_t idx) {
  while (static_cast<std::int64_t>(cache.size()) < idx) {
    std::int64_t have = static_cast<std::int64_t>(cache.size());
    std::int64_t grow = std::max(idx, std::min(have > 0 ? have * 2 : 32, have + 256));
    std::vector<ExactScalar> more = spec->evaluate_range(have + 1, grow);
    for (auto& v : more) cache.push_back(std::move(v));
  }
  return cache[static_cast<size_t>(idx - 1)];
}

MemberCursor::MemberCursor(const DistanceSet& set, const Settings& s)
    : settings_(&s), finite_(&set.finite_part) {
  tails_.reserve(set.tails.size());
  for (const auto& t : set.tails) tails_.push_back(TailState{&t, {}, 0});
}

std::optional<ExactScalar> MemberCursor::next_at_most(const ExactScalar& ceiling) {
  for (auto& t : tails_) {
    std::int64_t lo = t.pos + 1;
    if (t.value_at(lo) <= ceiling) continue;
    std::int64_t hi = lo;
    while (t.value_at(hi) > ceiling) {
      lo = hi;
      if (hi >= settings_->member_cap)
        throw ResourceError("member enumeration cap exhausted while seeking below " + ceiling.str());
      hi = std::min(hi * 2, settings_->member_cap);
    }
    while (lo + 1 < hi) {  // value(lo) > ceiling >= value(hi)
      std::int64_t mid = lo + (hi - lo) / 2;
      (t.value_at(mid) > ceiling ? lo : hi) = mid;
    }
    t.pos = hi - 1;
  }
  while (finite_pos_ < finite_->size() && (*finite_)[finite_pos_] > ceiling) ++finite_pos_;
  return next();
}

std::optional<ExactScalar> MemberCursor::next() {
  const ExactScalar* best = nullptr;
  for (auto& t : tails_) {
    const ExactScalar& v = t.value_at(t.pos + 1);
    if (!best || v > *best) best = &v;
  }
  if (finite_pos_ < finite_->size()) {
    const ExactScalar& v = (*finite_)[finite_pos_];
    if (!best || v > *best) best = &v;
  }
  if (!best) return std::nullopt;
  ExactScalar out = *best;
  for (auto& t : tails_)
    if (t.value_at(t.pos + 1) == out) ++t.pos;
  if (finite_pos_ < finite_->size() && (*finite_)[finite_pos_] == out) ++finite_pos_;
  if (++emitted_ > settings_->member_cap) throw ResourceError("member enumeration cap exhausted");
  return out;
}

// ---------------------------------------------------------------------------
// queries
// ---------------------------------------------------------------------------

MemberList members_in(const DistanceSet& set, const ExactScalar& lo, const ExactScalar& hi,
                      std::optional<std::int64_t> cap, const Settings& s) {
  if (lo >= hi) throw ConfigError("members_in: need 0 <= lo < hi");
  if (lo.is_zero() && set.zero_accumulation() && !cap)
    throw ResourceError("members_in: lo = 0 with tails present needs an element cap");
  MemberList out;
  MemberCursor cursor(set, s);
  std::optional<ExactScalar> m = cursor.next_at_most(hi);
  while (m && *m >= lo) {
    if (cap && static_cast<std::int64_t>(out.values.size()) == *cap) {
      out.complete = false;
      break;
    }
    out.values.push_back(*m);
    m = cursor.next();
  }
  std::reverse(out.values.begin(), out.values.end());
  return out;
}

bool contains(const DistanceSet& set, const ExactScalar& v, const Settings& s) {
  if (v.is_zero()) return set.contains_zero;
  if (std::binary_search(set.finite_part.begin(), set.finite_part.end(), v,
                         [](const ExactScalar& x, const ExactScalar& y) { return x > y; }))
    return true;
  for (const auto& tail : set.tails) {
    ExactScalar first = tail.evaluate(1);
    if (first == v) return true;
    if (first < v) continue;
    std::int64_t lo = 1, hi = 1;
    while (true) {  // gallop to the first index with value <= v
      if (hi >= s.member_cap)
        throw ResourceError("membership test for " + v.str() + " exceeds the enumeration cap");
      std::int64_t next_hi = std::min(hi * 2, s.member_cap);
      if (tail.evaluate(next_hi) <= v) {
        lo = hi;
        hi = next_hi;
        break;
      }
      lo = hi = next_hi;
    }
    while (lo + 1 < hi) {  // value(lo) > v >= value(hi)
      std::int64_t mid = lo + (hi - lo) / 2;
      (tail.evaluate(mid) > v ? lo : hi) = mid;
    }
    if (tail.evaluate(hi) == v) return true;
  }
  return false;
}

namespace {

struct GapWalk {
  MemberCursor cursor;
  ExactScalar prev;       // right end of the gap currently being closed
  bool prev_in_e = false; // whether prev is a member of E
  bool started = false;
  bool exhausted = false;

  GapWalk(const DistanceSet& set, const ExactScalar& h, const Settings& s)
      : cursor(set, s), prev(h) {}

  // Next gap going down; the TouchesZero component, when it exists, is the
  // final one. nullopt once exhausted.
  std::optional<GapComponent> next() {
    if (exhausted) return std::nullopt;
    std::optional<ExactScalar> m;
    if (!started) {
      started = true;
      m = cursor.next_at_most(prev);
      if (m && *m == prev) {  // h itself belongs to E: no truncated component
        prev_in_e = true;
        m = cursor.next();
      }
    } else {
      m = cursor.next();
    }
    if (!m) {
      exhausted = true;
      if (prev.is_zero()) return std::nullopt;
      return GapComponent{ExactScalar(0), prev, GapComponent::Kind::TouchesZero};
    }
    GapComponent g{*m, prev,
                   prev_in_e ? GapComponent::Kind::Interior : GapComponent::Kind::TruncatedAtH};
    prev = *m;
    prev_in_e = true;
    return g;
  }
};

}  // namespace

GapList gap_components(const DistanceSet& set, const ExactScalar& h, const ExactScalar& eps,
                       std::optional<std::int64_t> cap, const Settings& s) {
  if (h.is_zero()) throw ConfigError("gap_components: need h > 0");
  if (eps >= h) throw ConfigError("gap_components: need eps < h");
  const std::int64_t limit = cap.value_or(s.gap_cap);
  GapList out;
  GapWalk walk(set, h, s);
  try {
    while (true) {
      std::optional<GapComponent> g = walk.next();
      if (!g) break;
      if (g->a < eps) {
        if (!eps.is_zero() && g->b > eps) out.note = "floor lies inside a gap component";
        return out;
      }
      if (static_cast<std::int64_t>(out.gaps.size()) == limit) {
        out.complete = false;
        out.note = "gap cap exhausted before reaching the floor";
        return out;
      }
      out.gaps.push_back(std::move(*g));
    }
  } catch (const ResourceError& e) {
    out.complete = false;
    out.note = e.what();
  }
  return out;
}

ExactScalar lambda(const DistanceSet& set, const ExactScalar& h, const Settings& s) {
  if (h.is_zero()) throw ConfigError("lambda: need h > 0");
  ExactScalar best(0);
  GapWalk walk(set, h, s);
  while (true) {
    std::optional<GapComponent> g = walk.next();
    if (!g) return best;
    ExactScalar len = g->length();
    if (len > best) best = len;
    if (g->a <= best) return best;  // every deeper gap fits inside (0, a)
  }
}

// ---------------------------------------------------------------------------
// porosity
// ---------------------------------------------------------------------------

PorosityReport porosity_report(const DistanceSet& set, std::optional<ExactScalar> h0,
                               TailWindow window, const Settings& s) {
  window.validate();
  PorosityReport rep;
  rep.deficit_shallow = ExactScalar(0);
  rep.deficit_deep = ExactScalar(0);
  if (!set.zero_accumulation()) {
    rep.estimate = LimitEstimate::converged_exact(ExactScalar(1), window,
                                                  "0 isolated in E: lambda(h) = h for small h");
    rep.porous_certificate = true;
    return rep;
  }
  ExactScalar top = h0.value_or(ExactScalar(0));
  if (!h0) {
    std::optional<ExactScalar> m = set.max_member();
    top = min(*m, ExactScalar(1));
  }

  // One shared descending enumeration serves every grid anchor: lambda at an
  // anchor is a suffix maximum of the gap lengths, exact once the enumeration
  // reaches a member no larger than the deepest anchor's running lambda.
  // Two grid entries beyond the window act as limsup lookahead.
  const std::int64_t needed = window.end + 2;
  std::vector<ExactScalar> members;  // descending, all <= top
  MemberCursor cursor(set, s);
  {
    std::optional<ExactScalar> m = cursor.next_at_most(top);
    if (!m) throw PreconditionError("porosity grid: no members at or below h0");
    members.push_back(*m);
  }
  // grid anchors: members interleaved with gap midpoints, indexed from 1
  const std::int64_t grid_members = needed / 2 + 2;
  while (static_cast<std::int64_t>(members.size()) < grid_members) {
    std::optional<ExactScalar> m = cursor.next();
    if (!m) throw ResourceError("porosity grid: ran out of members before filling the window");
    members.push_back(*m);
  }
  // extend until the deepest anchor's lambda is certified exact: once the
  // current member is no larger than some gap already seen below that anchor,
  // no deeper gap can change any anchor's suffix maximum
  ExactScalar deep_gap(0);  // largest gap seen strictly below the deepest grid member
  while (members.back() > deep_gap) {
    std::optional<ExactScalar> m = cursor.next();
    if (!m) break;  // tails guarantee this does not happen; finite sets handled earlier
    deep_gap = max(deep_gap, members.back() - *m);
    members.push_back(*m);
  }

  // suffix maxima of gap lengths: lam_from[j] = lambda(E, members[j])
  size_t count = members.size();
  std::vector<ExactScalar> lam_from(count);
  {
    ExactScalar running(0);
    if (members.back() > deep_gap) running = members.back();  // exhausted: touches-zero gap
    lam_from[count - 1] = running;
    for (size_t j = count - 1; j-- > 0;) {
      running = max(running, members[j] - members[j + 1]);
      lam_from[j] = running;
    }
  }

  std::vector<ExactScalar> ratios, deficits;
  ratios.reserve(static_cast<size_t>(window.length() + 2));
  for (std::int64_t i = window.start; i <= needed; ++i) {
    // grid index i (1-based): odd -> members[(i-1)/2], even -> midpoint below members[i/2 - 1]
    ExactScalar anchor, lam;
    if (i % 2 == 1) {
      size_t k = static_cast<size_t>((i - 1) / 2);
      anchor = members[k];
      lam = lam_from[k];  // gaps inside (0, members[k]), the top one included
    } else {
      size_t k = static_cast<size_t>(i / 2 - 1);  // midpoint of (members[k+1], members[k])
      anchor = (members[k] + members[k + 1]) / ExactScalar(2);
      lam = max(anchor - members[k + 1], lam_from[k + 1]);
    }
    ExactScalar ratio = lam / anchor;
    if (i <= window.end) {
      deficits.push_back(ExactScalar(1) - ratio);
      rep.samples.emplace_back(anchor, ratio);
    }
    ratios.push_back(std::move(ratio));
  }
  rep.estimate = limsup_stats_values(ratios, window, s);
  rep.porous_certificate = vanishing_certificate(deficits, s.tol);
  size_t half = deficits.size() / 2;
  for (size_t i = 0; i < deficits.size(); ++i) {
    ExactScalar& slot = i < half ? rep.deficit_shallow : rep.deficit_deep;
    if (deficits[i] > slot) slot = deficits[i];
  }
  rep.grid_size = needed;
  return rep;
}

LimitEstimate porosity_upper(const DistanceSet& set, TailWindow window, const Settings& s) {
  return porosity_report(set, std::nullopt, window, s).estimate;
}

DistanceSet scale_set(const DistanceSet& set, const ExactScalar& t) {
  if (t.is_zero()) throw ConfigError("scale_set: need t > 0");
  DistanceSet out;
  out.contains_zero = set.contains_zero;
  out.tails.reserve(set.tails.size());
  for (const auto& tail : set.tails) out.tails.push_back(SequenceSpec::scaled(t, tail));
  out.finite_part.reserve(set.finite_part.size());
  for (const auto& v : set.finite_part) out.finite_part.push_back(t * v);
  return out;
}

}  // namespace portan
