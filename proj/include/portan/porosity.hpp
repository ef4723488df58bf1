#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "portan/distance_set.hpp"

namespace portan {

// A sequence of maximal gap components of E ordered by decreasing left
// endpoint. gaps[i] carries index first_index + i; indices below first_index
// had no admissible gap (membership conditions are eventual, so a short
// prefix is allowed).
struct IntervalSequence {
  std::vector<GapComponent> gaps;
  std::int64_t first_index = 1;

  std::int64_t last_index() const {
    return first_index + static_cast<std::int64_t>(gaps.size()) - 1;
  }
  const GapComponent& at(std::int64_t n) const;
  Json to_json() const;
};

struct MembershipReport {
  bool ok = false;
  std::string failure;  // first unmet condition, empty when ok
};

// Finite-horizon membership in the family of gap sequences whose left
// endpoints eventually decrease to zero with relative gap length heading to
// one. verify_maximality additionally re-derives each gap from E.
MembershipReport interval_sequence_membership(const IntervalSequence& seq, const DistanceSet& set,
                                              TailWindow window, bool verify_maximality = false,
                                              const Settings& s = default_settings());

// c1 * a_n < gamma_n < c2 * a_n for n >= valid_from.
struct EquivalenceCertificate {
  ExactScalar c1, c2;
  std::int64_t valid_from = 1;

  EquivalenceCertificate inverse() const;  // certificate for the swapped pair
  EquivalenceCertificate compose(const EquivalenceCertificate& inner) const;
  Json to_json() const;
};

enum class EquivalenceFailure { None, NoLowerConstant, NoUpperConstant };

struct EquivalenceResult {
  std::optional<EquivalenceCertificate> certificate;
  EquivalenceFailure failure = EquivalenceFailure::None;
  std::string detail;

  bool equivalent() const { return certificate.has_value(); }
};

// Window comparability of two positive sequences. Affirmative refutations
// only: a doubling growth trend of one ratio direction that has already
// cleared 1 (values at or below 1 can never witness an unbounded ratio).
EquivalenceResult asymp_equivalent(const SequenceSpec& a, const SequenceSpec& gamma,
                                   TailWindow window, const Settings& s = default_settings());
EquivalenceResult asymp_equivalent_values(const std::vector<ExactScalar>& a,
                                          const std::vector<ExactScalar>& gamma, TailWindow window,
                                          const Settings& s = default_settings());

// One-sided criterion: gamma_n <= a_n on the window and no unbounded-trend
// evidence for a/gamma. Callers must already know gamma <= a holds.
bool lemma_one_sided_equivalent(const std::vector<ExactScalar>& a,
                                const std::vector<ExactScalar>& gamma, TailWindow window,
                                const Settings& s = default_settings());

// Check a certificate against the window values (strict inequalities).
bool certificate_holds(const EquivalenceCertificate& cert, const std::vector<ExactScalar>& a,
                       const std::vector<ExactScalar>& gamma, TailWindow window);

// A candidate test sequence: positive members of E, eventually decreasing to
// zero, materialized through the window (plus limsup lookahead).
struct TauSeq {
  std::string label;
  std::vector<ExactScalar> values;  // values[i] is tau_{i+1}
  std::optional<SequenceSpec> spec;

  const ExactScalar& at(std::int64_t n) const { return values.at(static_cast<size_t>(n - 1)); }
  std::int64_t count() const { return static_cast<std::int64_t>(values.size()); }

  static TauSeq from_spec(const SequenceSpec& spec, std::int64_t upto, std::string label = "");
};

// Throws PreconditionError unless tau is positive, in E, eventually
// nonincreasing by window.start, and certified to head to zero.
void validate_tau(const TauSeq& tau, const DistanceSet& set, TailWindow window,
                  const Settings& s = default_settings());

enum class WitnessStatus { Accepted, NoWitness, RefutedUnbounded };

std::string to_string(WitnessStatus s);

struct WitnessDiag {
  std::int64_t n = 0;
  ExactScalar tau;
  bool found = false;
  ExactScalar a, b;         // selected gap when found
  ExactScalar a_over_tau;   // selection ratio when found
};

struct WitnessSearchResult {
  WitnessStatus status = WitnessStatus::NoWitness;
  std::optional<IntervalSequence> witness;
  std::optional<LimitEstimate> c_estimate;  // C(tau): limsup of a_n / tau_n
  std::vector<WitnessDiag> diags;
  std::string reason;

  Json to_json() const;
};

// For each n pick, among gap components with left endpoint in
// [tau_n, cap * tau_n], the one maximizing b/a; accept when the selection
// passes the gap-family membership conditions and a/tau stays bounded.
WitnessSearchResult find_interval_sequence(const DistanceSet& set, const TauSeq& tau,
                                           TailWindow window,
                                           std::optional<ExactScalar> search_cap = std::nullopt,
                                           const Settings& s = default_settings());
WitnessSearchResult find_interval_sequence(const DistanceSet& set, const SequenceSpec& tau,
                                           TailWindow window,
                                           std::optional<ExactScalar> search_cap = std::nullopt,
                                           const Settings& s = default_settings());

// k and N1(K) such that (k tau_n, K tau_n) misses E for all window n >= N1.
struct PorosityWitness {
  ExactScalar k, K;
  std::int64_t n1 = 0;
  IntervalSequence intervals;

  Json to_json() const;
};

struct PorosityWitnessResult {
  std::optional<PorosityWitness> witness;
  std::optional<WitnessSearchResult> refutation;  // set when no witness exists
};

PorosityWitnessResult porosity_witness(const DistanceSet& set, const SequenceSpec& tau,
                                       const ExactScalar& K, TailWindow window,
                                       const Settings& s = default_settings());

struct CandidateResult {
  std::optional<IntervalSequence> candidate;
  std::int64_t gaps_found = 0;
  MembershipReport membership;
  std::string note;
};

// All gap components below h0 with b/a >= theta, ordered by decreasing left
// endpoint; fails when fewer than window.end + 2 qualify.
CandidateResult universal_candidate(const DistanceSet& set, const ExactScalar& h0,
                                    const ExactScalar& theta, TailWindow window,
                                    const Settings& s = default_settings());

struct UniversalSearch {
  std::optional<IntervalSequence> candidate;
  ExactScalar theta;  // the filter that succeeded
  ExactScalar h0;
  std::string note;
};

// Escalates theta = 2, 4, 16, 256 until the filtered gap list passes
// membership; h0 defaults to the largest member at most 1.
UniversalSearch find_universal_candidate(const DistanceSet& set, TailWindow window,
                                         const Settings& s = default_settings());

struct UniversalityCheck {
  bool universal = true;
  std::string exhibit;  // failing candidate and index when not universal
};

// Every candidate's left endpoints must coincide, from window.start on, with
// left endpoints of L (exact equality).
UniversalityCheck is_universal(const IntervalSequence& L,
                               const std::vector<IntervalSequence>& candidates, TailWindow window);

// M(L): limsup of l_n / m_{n+1} over consecutive gaps of L.
LimitEstimate M_of_L(const IntervalSequence& L, TailWindow window,
                     const Settings& s = default_settings());

struct ProbeResult {
  std::string label;
  WitnessStatus status = WitnessStatus::NoWitness;
  std::optional<LimitEstimate> c_estimate;
  std::string detail;
  std::vector<WitnessDiag> diags;
};

struct CEReport {
  LimitEstimate c_e;  // sup over the probe family of C(tau)
  std::vector<ProbeResult> probes;
  std::optional<LimitEstimate> m_estimate;
  bool consistent_with_m = false;

  Json to_json() const;
};

CEReport C_E_estimate(const DistanceSet& set, const std::vector<SequenceSpec>& tau_family,
                      TailWindow window, const Settings& s = default_settings());

enum class CspKind { Csp, NotCsp, Vacuous, Inconclusive };

std::string to_string(CspKind k);

struct CspReport {
  CspKind kind = CspKind::Inconclusive;
  std::optional<LimitEstimate> m_estimate;       // finite when kind == Csp
  std::optional<IntervalSequence> universal;     // the candidate behind m_estimate
  ExactScalar theta_used;
  ExactScalar h0_used;
  std::optional<std::string> refuting_probe;
  PorosityReport porosity;
  std::vector<ProbeResult> probes;
  std::optional<LimitEstimate> c_e;
  std::string note;

  Json to_json() const;
};

// Battery: each tail, its odd/even subsequences, and pairwise sorted merges
// of tails. Vacuous when 0 is not an accumulation point; NotCsp on a failed
// strong-porosity certificate or an affirmative unbounded-ratio probe;
// Inconclusive otherwise when some probe finds no witness.
CspReport csp_verdict(const DistanceSet& set, TailWindow window,
                      const Settings& s = default_settings());

// The deterministic probe family used by csp_verdict, exposed for reports.
std::vector<TauSeq> probe_battery(const DistanceSet& set, std::int64_t upto,
                                  const Settings& s = default_settings());

struct NormalityReport {
  bool normal = false;
  std::string reason;
  std::vector<ExactScalar> witness;  // nearest members, window indices
  std::optional<LimitEstimate> ratio_stats;

  Json to_json() const;
};

// r is normal for (E, |.|, 0) iff it is eventually decreasing and the
// nearest-member sequence tracks it with ratio heading to 1.
NormalityReport is_normal_scaling(const DistanceSet& set, const SequenceSpec& r, TailWindow window,
                                  const Settings& s = default_settings());

// Closest member of E to v in ratio distance max(m/v, v/m).
std::optional<ExactScalar> nearest_member(const DistanceSet& set, const ExactScalar& v,
                                          const Settings& s = default_settings());

}  // namespace portan
