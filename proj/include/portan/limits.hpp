#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "portan/rational.hpp"

namespace portan {

// Finite-horizon stand-in for "for sufficiently large n": statistics are
// taken over the index range [start, end], inclusive.
struct TailWindow {
  std::int64_t start = 32;
  std::int64_t end = 256;

  std::int64_t length() const { return end - start + 1; }
  // first index of the deep half, used by trend tests
  std::int64_t half() const { return start + (end - start) / 2 + 1; }
  void validate() const;
};

// Global tuning knobs. Defaults separate exactly-constant window ratios from
// slow drift while keeping enumeration bounded.
struct Settings {
  ExactScalar tol = ExactScalar::pow2(-20);  // convergence band, relative to max(1, tail_max)
  ExactScalar divergence_cap = ExactScalar(1000000);
  std::int64_t member_cap = 10000;  // enumerated set elements per query
  std::int64_t gap_cap = 1000;      // gap components per query
  ExactScalar witness_search_cap = ExactScalar(1024);  // left endpoints searched in [tau, cap*tau]
  ExactScalar witness_margin = ExactScalar(1, 16);     // added to C(tau) when deriving k
  std::int64_t min_window = 8;    // smallest window usable for equivalence checks
  std::int64_t min_refined = 8;   // indices that must survive subsequence refinement
  ExactScalar audit_tol = ExactScalar::pow2(-10);  // cross-validation tolerance for audits
};

const Settings& default_settings();

enum class Verdict { Converges, Diverges, Oscillates };

std::string to_string(Verdict v);

// Tail-window verdict for a limit / limsup / liminf. tail_min and tail_max
// are exact over the window; `value` is meaningful only when the verdict is
// Converges and always lies in [tail_min, tail_max].
struct LimitEstimate {
  Verdict verdict = Verdict::Oscillates;
  ExactScalar value;
  ExactScalar tail_min;
  ExactScalar tail_max;
  TailWindow window;
  std::string note;

  bool converged() const { return verdict == Verdict::Converges; }
  // tail_max is the limsup estimate, tail_min the liminf estimate
  const ExactScalar& limsup_estimate() const { return tail_max; }
  const ExactScalar& liminf_estimate() const { return tail_min; }

  static LimitEstimate diverged(TailWindow w, const Settings& s, std::string note);
  static LimitEstimate converged_exact(ExactScalar v, TailWindow w, std::string note = "");
};

using TermFn = std::function<ExactScalar(std::int64_t)>;

// Exact min/max of the sequence over the window plus a verdict. Convergence
// (band within tol) is checked before divergence, so exactly constant
// sequences converge no matter how large they are.
LimitEstimate tail_stats(const TermFn& seq, TailWindow window, const Settings& s = default_settings());

// Same, over precomputed values: values[i] corresponds to index window.start + i.
LimitEstimate tail_stats_values(const std::vector<ExactScalar>& values, TailWindow window,
                                const Settings& s = default_settings());

// limsup semantics: statistics of the suffix-sup transform T_k = max_{j >= k} a_j.
// T is nonincreasing, so a Converges verdict means the running sup stabilized.
LimitEstimate limsup_stats_values(const std::vector<ExactScalar>& values, TailWindow window,
                                  const Settings& s = default_settings());

// Affirmative finite-horizon growth: the deep-half max at least doubles the
// shallow-half max.
bool growth_trend(const std::vector<ExactScalar>& values);

// Finite-horizon certificate that values head to zero: deep-half max is at
// most max(floor, shallow_half_max / 2).
bool vanishing_certificate(const std::vector<ExactScalar>& values, const ExactScalar& floor_tol);

}  // namespace portan
