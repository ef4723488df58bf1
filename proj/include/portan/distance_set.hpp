#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "portan/sequence_spec.hpp"

namespace portan {

// E = S_p(X) as a finite union of strictly decreasing tails plus a finite
// part. 0 is an accumulation point of E exactly when there is at least one
// tail; membership in any bounded interval is decidable by bounded
// enumeration.
struct DistanceSet {
  std::vector<SequenceSpec> tails;
  std::vector<ExactScalar> finite_part;  // kept sorted descending, deduplicated
  bool contains_zero = false;

  static DistanceSet make(std::vector<SequenceSpec> tails, std::vector<ExactScalar> finite_part,
                          bool contains_zero = false, TailWindow window = {},
                          const Settings& s = default_settings());

  bool zero_accumulation() const { return !tails.empty(); }
  bool empty() const { return tails.empty() && finite_part.empty(); }
  // largest element, if any
  std::optional<ExactScalar> max_member() const;

  Json to_json() const;
  static DistanceSet from_json(const Json& j, TailWindow window = {},
                               const Settings& s = default_settings());
};

// Maximal E-free open interval. TouchesZero components have a == 0 without
// claiming 0 is in E; TruncatedAtH components are clipped at the query bound.
struct GapComponent {
  enum class Kind { Interior, TouchesZero, TruncatedAtH };
  ExactScalar a, b;
  Kind kind = Kind::Interior;

  ExactScalar length() const { return b - a; }
};

std::string to_string(GapComponent::Kind k);

// Strictly descending deduplicated walk over the members of a DistanceSet.
class MemberCursor {
 public:
  MemberCursor(const DistanceSet& set, const Settings& s = default_settings());

  // Largest member <= ceiling not yet emitted; nullopt when exhausted.
  // Throws ResourceError after settings.member_cap emissions.
  std::optional<ExactScalar> next_at_most(const ExactScalar& ceiling);
  std::optional<ExactScalar> next();

  std::int64_t emitted() const { return emitted_; }

 private:
  struct TailState {
    const SequenceSpec* spec;
    std::vector<ExactScalar> cache;
    std::int64_t pos = 0;  // next cache slot to emit

    const ExactScalar& value_at(std::int64_t idx);
  };
  const Settings* settings_;
  std::vector<TailState> tails_;
  const std::vector<ExactScalar>* finite_;
  size_t finite_pos_ = 0;
  std::int64_t emitted_ = 0;
};

struct MemberList {
  std::vector<ExactScalar> values;  // ascending
  bool complete = true;
};

// Exactly the elements of E in [lo, hi], duplicates merged. With tails and
// lo == 0 an explicit cap is required; `complete` is false when the cap cut
// the enumeration short.
MemberList members_in(const DistanceSet& set, const ExactScalar& lo, const ExactScalar& hi,
                      std::optional<std::int64_t> cap = std::nullopt,
                      const Settings& s = default_settings());

// Exact membership test. Throws ResourceError when v lies below the
// enumeration cap depth of every tail.
bool contains(const DistanceSet& set, const ExactScalar& v, const Settings& s = default_settings());

struct GapList {
  std::vector<GapComponent> gaps;  // ordered by decreasing left endpoint
  bool complete = true;            // false: a cap interrupted the walk
  std::string note;
};

// All maximal E-free open subintervals of (0, h) with left endpoint >= eps,
// ordered by decreasing left endpoint, at most `cap` of them.
GapList gap_components(const DistanceSet& set, const ExactScalar& h, const ExactScalar& eps,
                       std::optional<std::int64_t> cap = std::nullopt,
                       const Settings& s = default_settings());

// lambda(E, 0, h): the length of the largest open subinterval of (0, h) free
// of E (TouchesZero components count with length equal to their right
// endpoint). Exact; uses early termination once no deeper gap can win.
ExactScalar lambda(const DistanceSet& set, const ExactScalar& h,
                   const Settings& s = default_settings());

struct PorosityReport {
  LimitEstimate estimate;        // limsup_{h->0+} lambda(E,0,h)/h over the anchored grid
  bool porous_certificate = false;  // finite-horizon certificate that the deficit 1 - ratio vanishes
  ExactScalar deficit_shallow;   // max deficit over the shallow half window
  ExactScalar deficit_deep;      // max deficit over the deep half window
  std::int64_t grid_size = 0;
  std::vector<std::pair<ExactScalar, ExactScalar>> samples;  // (h anchor, lambda/h) on the window
};

// Grid anchored at E's members below h0 plus the midpoints of consecutive
// gaps; the estimate applies limsup (suffix-sup) semantics over the grid.
PorosityReport porosity_report(const DistanceSet& set, std::optional<ExactScalar> h0,
                               TailWindow window, const Settings& s = default_settings());

LimitEstimate porosity_upper(const DistanceSet& set, TailWindow window,
                             const Settings& s = default_settings());

// {t*e : e in E}; tails stay symbolic via scaled specs.
DistanceSet scale_set(const DistanceSet& set, const ExactScalar& t);

}  // namespace portan
