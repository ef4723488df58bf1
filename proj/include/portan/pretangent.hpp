#pragma once

#include <functional>
#include <memory>

#include "portan/porosity.hpp"

namespace portan {

// Finite-horizon oracle for an abstract pointed metric space: families of
// points indexed by (family id, n) with an exact pairwise distance rule.
// Family id -1 denotes the marked point. Symmetry and the diagonal are
// enforced; the triangle inequality is spot-checked on sampled triples.
class OracleSpace {
 public:
  using DistFn = std::function<ExactScalar(int, int, std::int64_t)>;

  OracleSpace(int families, DistFn fn, TailWindow check_window = {},
              std::int64_t triangle_samples = 64);

  ExactScalar distance(int i, int j, std::int64_t n) const;
  int families() const { return families_; }

 private:
  int families_;
  DistFn fn_;
};

// Either a subset of the half-line carrying |x - y| with marked point 0, or
// a finite-horizon oracle space.
struct PointedSpaceSpec {
  std::optional<DistanceSet> line;
  std::shared_ptr<const OracleSpace> oracle;

  static PointedSpaceSpec line_set(DistanceSet set);
  static PointedSpaceSpec oracle_space(std::shared_ptr<const OracleSpace> o);
  bool is_line() const { return line.has_value(); }
  const DistanceSet& set() const;
};

// A point sequence of the space: the constant marked point, positions on the
// line (symbolic or materialized), or an oracle family.
struct PointSequence {
  enum class Kind { Marked, Positions, OracleFamily };
  Kind kind = Kind::Marked;
  std::string label = "p";
  std::optional<SequenceSpec> spec;
  std::vector<ExactScalar> values;  // values[i] is the position at index i+1
  int family = -1;

  static PointSequence marked();
  static PointSequence from_spec(SequenceSpec s, std::int64_t upto, std::string label = "");
  static PointSequence from_values(std::vector<ExactScalar> vals, std::string label);
  static PointSequence oracle_family(int id, std::string label = "");

  ExactScalar position(std::int64_t n) const;  // line kinds only
};

struct StabilityVerdict {
  std::string x_label, y_label;
  LimitEstimate estimate;  // of d(x_n, y_n) / r_n

  bool mutually_stable() const { return estimate.converged(); }
};

StabilityVerdict mutual_stability(const PointedSpaceSpec& space, const PointSequence& x,
                                  const PointSequence& y, const ScalingSequence& r,
                                  TailWindow window, const Settings& s = default_settings());

// Exact band of a quotient distance over the kept index set. Exact when the
// underlying ratios were eventually constant.
struct DistVal {
  ExactScalar lo, hi;

  bool exact() const { return lo == hi; }
  ExactScalar rep() const { return exact() ? lo : simplest_in_interval(lo, hi); }
};

struct RefinementStep {
  std::string x_label, y_label;
  ExactScalar band_lo, band_hi;
  std::int64_t kept = 0;
};

struct RefinementLog {
  std::vector<RefinementStep> steps;
  std::vector<std::int64_t> final_indices;

  Json to_json() const;
};

struct PretangentSpace {
  std::vector<std::vector<int>> classes;  // seed ids; seed 0 is the marked sequence
  std::vector<std::string> seed_labels;
  std::vector<std::vector<DistVal>> dist;  // symmetric, zero exactly on the diagonal
  int marked = 0;
  bool normal = false;
  RefinementLog log;

  int class_of(int seed) const;
  ExactScalar class_distance(int i, int j) const { return dist[i][j].rep(); }
  Json to_json() const;
};

enum class BuildStatus { Built, Inconclusive };

struct BuildResult {
  BuildStatus status = BuildStatus::Inconclusive;
  std::optional<PretangentSpace> space;
  std::string offending;  // pair or reason when Inconclusive
  std::vector<std::string> rejected_seeds;

  bool built() const { return status == BuildStatus::Built; }
};

// Pairwise stability matrix; greedy common-subsequence refinement of
// oscillating pairs (largest tol-band cluster, deterministic); zero-distance
// quotient via union-find. The marked sequence is always included.
BuildResult build_pretangent(const PointedSpaceSpec& space, std::vector<PointSequence> seeds,
                             const ScalingSequence& r, TailWindow window,
                             const Settings& s = default_settings());

// sup and inf of the distance from the marked class (inf over non-marked
// classes; +infinity for the singleton space).
ExactScalar rho_star(const PretangentSpace& omega);
ExtendedScalar rho_lower(const PretangentSpace& omega);

// Scaling sequence + seeds realizing the extremal pretangent spaces of a
// completely strongly porous set: right endpoints of the limsup-attaining
// gaps scale a seed sitting at distance M (bounded form), left endpoints one
// at distance 1/M (discrete form); the witness certifies normality.
struct ExtremalConstruction {
  ScalingSequence scaling;
  PointSequence t_seed;
  PointSequence s_witness;
  TailWindow build_window;
  std::vector<std::int64_t> picked;
};

ExtremalConstruction extremal_normal_scaling(const DistanceSet& set, const CspReport& csp,
                                             TailWindow window,
                                             const Settings& s = default_settings());
ExtremalConstruction extremal_discrete_scaling(const DistanceSet& set, const CspReport& csp,
                                               TailWindow window,
                                               const Settings& s = default_settings());

struct BoundednessAudit {
  CspKind kind = CspKind::Inconclusive;
  LimitEstimate r_star;   // sup over normal-scaling pretangent spaces of rho*
  LimitEstimate r_lower;  // inf of rho_*
  std::optional<ExactScalar> extremal_rho_star;
  std::optional<ExtendedScalar> extremal_rho_lower;
  bool cross_check_ok = false;
  std::string note;

  Json to_json() const;
};

// R* and R_* through the porosity route (M and 1/M), each cross-validated by
// building the corresponding extremal space and reading rho* / rho_*.
BoundednessAudit boundedness_audit(const PointedSpaceSpec& space, TailWindow window,
                                   const Settings& s = default_settings());
LimitEstimate R_star_estimate(const PointedSpaceSpec& space, TailWindow window,
                              const Settings& s = default_settings());
LimitEstimate R_lower_estimate(const PointedSpaceSpec& space, TailWindow window,
                               const Settings& s = default_settings());

struct ScalingProbeReport {
  ExactScalar t;
  bool unit_sphere_ok = false;
  ExactScalar rho_star_value;
  ExtendedScalar rho_lower_value;
};

struct WeakSelfSimilarityReport {
  std::vector<ScalingProbeReport> probes;
  ExactScalar sup_rho_star;
  ExtendedScalar inf_rho_lower;
  std::optional<ExactScalar> product;  // sup * inf when finite
  bool consistent = false;             // product within audit tolerance of 1

  Json to_json() const;
};

// For each sample t in E: rescale by 1/t, verify the unit sphere is nonvoid,
// and accumulate rho* / rho_* of the extremal spaces of the rescaled set.
WeakSelfSimilarityReport weak_self_similarity_probe(const PointedSpaceSpec& space,
                                                    const std::vector<ExactScalar>& samples,
                                                    TailWindow window,
                                                    const Settings& s = default_settings());

}  // namespace portan
