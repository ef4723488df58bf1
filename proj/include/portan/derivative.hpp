#pragma once

#include "portan/pretangent.hpp"

namespace portan {

// Exact pointwise map on a line space: y = slope * x with finitely many
// per-point overrides. The marked point must map to the marked point.
struct MapRule {
  ExactScalar slope;
  std::vector<std::pair<ExactScalar, ExactScalar>> overrides;  // sorted by x

  static MapRule linear(ExactScalar slope);
  static MapRule with_overrides(ExactScalar slope,
                                std::vector<std::pair<ExactScalar, ExactScalar>> overrides);
  ExactScalar apply(const ExactScalar& x) const;
  bool is_identity() const { return overrides.empty() && slope == ExactScalar(1); }
  std::string describe() const;
};

struct MapSpec {
  PointedSpaceSpec domain;
  PointedSpaceSpec codomain;
  MapRule rule;

  static MapSpec make(PointedSpaceSpec domain, PointedSpaceSpec codomain, MapRule rule);
};

// Push a line point sequence through the rule, validating that the image
// lives in the codomain.
PointSequence pushforward(const MapSpec& f, const PointSequence& x, TailWindow window,
                          const Settings& s = default_settings());

enum class DiffStatus { Differentiable, NotDifferentiable, Inconclusive };

std::string to_string(DiffStatus st);

struct DiffVerdict {
  DiffStatus status = DiffStatus::Inconclusive;
  std::string offending;  // violating pair when NotDifferentiable / Inconclusive
  Json to_json() const;
};

// (i) every pushed-forward seed must be mutually stable with the whole target
// family w.r.t. r2 (no refinement: the families are fixed); (ii) zero-distance
// pairs must push to zero-distance pairs. When fam2 is empty the target
// family defaults to the pushforward of fam1.
DiffVerdict check_differentiable(const MapSpec& f, const std::vector<PointSequence>& fam1,
                                 const ScalingSequence& r1, std::vector<PointSequence> fam2,
                                 const ScalingSequence& r2, TailWindow window,
                                 const Settings& s = default_settings());

struct DerivativeMap {
  PretangentSpace source;
  PretangentSpace target;
  std::vector<int> class_map;  // source class -> target class

  Json to_json() const;
};

struct DerivativeResult {
  DiffStatus status = DiffStatus::Inconclusive;
  std::optional<DerivativeMap> derivative;
  std::string note;  // contradiction flag details when representatives scatter
};

// Build both quotients and read the class-level map off the pushed
// representatives; well-definedness is re-verified on every representative.
DerivativeResult metric_derivative(const MapSpec& f, const std::vector<PointSequence>& fam1,
                                   const ScalingSequence& r1, std::vector<PointSequence> fam2,
                                   const ScalingSequence& r2, TailWindow window,
                                   const Settings& s = default_settings());

// inf distance from the base class to a class mapped differently; +infinity
// for constant maps.
ExtendedScalar local_constancy_radius(const PretangentSpace& omega,
                                      const std::vector<int>& labels, int base_class);

struct MapAudit {
  std::string map;
  std::string space;
  DiffStatus status = DiffStatus::Inconclusive;
  ExtendedScalar c_alpha;
  bool ok = false;  // c_alpha >= bound - tolerance
};

struct SharpnessWitness {
  bool achieved = false;
  ExactScalar c_alpha_identity;
  ExactScalar rho_lower_value;
  std::string note;
};

struct Prop54Report {
  ExactScalar bound;  // 1 / M
  std::vector<MapAudit> audits;
  SharpnessWitness sharpness;
  bool all_ok = false;

  Json to_json() const;
};

// Battery of normal pretangent spaces (bounded extremal, discrete extremal,
// plain first tail) against identity, rational dilations, and the constant
// map; every derivative's local constancy radius must clear 1/M, and the
// discrete extremal space must achieve it with the identity.
Prop54Report derivative_bound_audit(const PointedSpaceSpec& space, TailWindow window,
                                    const Settings& s = default_settings());

}  // namespace portan
