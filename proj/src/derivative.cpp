#include "portan/derivative.hpp"

#include <algorithm>

namespace portan {

// ---------------------------------------------------------------------------
// map rules
// ---------------------------------------------------------------------------

MapRule MapRule::linear(ExactScalar slope) { return MapRule{std::move(slope), {}}; }

MapRule MapRule::with_overrides(ExactScalar slope,
                                std::vector<std::pair<ExactScalar, ExactScalar>> overrides) {
  std::sort(overrides.begin(), overrides.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (size_t i = 0; i + 1 < overrides.size(); ++i)
    if (overrides[i].first == overrides[i + 1].first)
      throw ValidationError("map rule: duplicate override for x = " + overrides[i].first.str());
  MapRule r{std::move(slope), std::move(overrides)};
  if (!r.apply(ExactScalar(0)).is_zero())
    throw ValidationError("map rule must send the marked point to the marked point");
  return r;
}

ExactScalar MapRule::apply(const ExactScalar& x) const {
  auto it = std::lower_bound(overrides.begin(), overrides.end(), x,
                             [](const auto& o, const ExactScalar& v) { return o.first < v; });
  if (it != overrides.end() && it->first == x) return it->second;
  return slope * x;
}

std::string MapRule::describe() const {
  std::string d = "x -> " + slope.str() + "*x";
  if (!overrides.empty()) d += " (+" + std::to_string(overrides.size()) + " overrides)";
  return d;
}

MapSpec MapSpec::make(PointedSpaceSpec domain, PointedSpaceSpec codomain, MapRule rule) {
  if (!domain.is_line() || !codomain.is_line())
    throw PreconditionError("map rules are defined for line spaces");
  if (!rule.apply(ExactScalar(0)).is_zero())
    throw ValidationError("map rule must send the marked point to the marked point");
  return MapSpec{std::move(domain), std::move(codomain), std::move(rule)};
}

PointSequence pushforward(const MapSpec& f, const PointSequence& x, TailWindow window,
                          const Settings& s) {
  window.validate();
  if (x.kind == PointSequence::Kind::Marked) return PointSequence::marked();
  std::vector<ExactScalar> out;
  out.reserve(static_cast<size_t>(window.end));
  for (std::int64_t n = 1; n <= window.end; ++n) {
    ExactScalar y = f.rule.apply(x.position(n));
    if (!y.is_zero() && !contains(f.codomain.set(), y, s))
      throw ValidationError("pushforward of '" + x.label + "' leaves the codomain at n=" +
                            std::to_string(n) + " (value " + y.str() + ")");
    out.push_back(std::move(y));
  }
  return PointSequence::from_values(std::move(out), "f(" + x.label + ")");
}

// ---------------------------------------------------------------------------
// differentiability
// ---------------------------------------------------------------------------

std::string to_string(DiffStatus st) {
  switch (st) {
    case DiffStatus::Differentiable: return "differentiable";
    case DiffStatus::NotDifferentiable: return "not_differentiable";
    case DiffStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

Json DiffVerdict::to_json() const {
  return Json{{"status", to_string(status)}, {"offending", offending}};
}

namespace {

struct TargetFamily {
  std::vector<PointSequence> members;  // fam2 then pushed seeds
  size_t pushed_offset = 0;            // index of the first pushed member
};

TargetFamily assemble_target(const MapSpec& f, const std::vector<PointSequence>& fam1,
                             std::vector<PointSequence> fam2, TailWindow window,
                             const Settings& s) {
  TargetFamily t;
  t.members = std::move(fam2);
  t.pushed_offset = t.members.size();
  for (const auto& x : fam1) t.members.push_back(pushforward(f, x, window, s));
  return t;
}

// ratios d2(x_n, y_n)/r2_n over the window
std::vector<ExactScalar> pair_ratios(const PointedSpaceSpec& space, const PointSequence& x,
                                     const PointSequence& y, const std::vector<ExactScalar>& rv,
                                     TailWindow window) {
  std::vector<ExactScalar> out;
  out.reserve(static_cast<size_t>(window.length()));
  for (std::int64_t n = window.start; n <= window.end; ++n)
    out.push_back(abs_diff(x.position(n), y.position(n)) / rv[static_cast<size_t>(n - 1)]);
  return out;
}

}  // namespace

DiffVerdict check_differentiable(const MapSpec& f, const std::vector<PointSequence>& fam1,
                                 const ScalingSequence& r1, std::vector<PointSequence> fam2,
                                 const ScalingSequence& r2, TailWindow window, const Settings& s) {
  window.validate();
  DiffVerdict verdict;
  BuildResult source = build_pretangent(f.domain, fam1, r1, window, s);
  if (!source.built()) {
    verdict.status = DiffStatus::Inconclusive;
    verdict.offending = "source family build: " + source.offending;
    return verdict;
  }
  TargetFamily target = assemble_target(f, fam1, std::move(fam2), window, s);
  std::vector<PointSequence> all;
  all.push_back(PointSequence::marked());
  for (auto& m : target.members) all.push_back(m);

  std::vector<ExactScalar> rv = r2.spec.evaluate_range(1, window.end);
  // condition (i): fixed families, no refinement; every pair involving a
  // pushed member must be stable at the window
  for (size_t i = 0; i < all.size(); ++i) {
    for (size_t j = i + 1; j < all.size(); ++j) {
      bool involves_pushed = i > target.pushed_offset || j > target.pushed_offset;
      if (!involves_pushed) continue;
      std::vector<ExactScalar> ratios = pair_ratios(f.codomain, all[i], all[j], rv, window);
      LimitEstimate e = tail_stats_values(ratios, window, s);
      if (e.converged()) continue;
      verdict.offending = "pair (" + all[i].label + ", " + all[j].label + "): " +
                          to_string(e.verdict) + " distance ratio w.r.t. r2";
      verdict.status =
          growth_trend(ratios) ? DiffStatus::NotDifferentiable : DiffStatus::Inconclusive;
      return verdict;
    }
  }
  // condition (ii): zero-distance pairs push to zero-distance pairs
  const PretangentSpace& omega1 = *source.space;
  // seed k of fam1 is member k+1 in omega1 (the marked sequence is member 0)
  for (size_t a = 0; a < fam1.size(); ++a) {
    for (size_t b = a + 1; b < fam1.size(); ++b) {
      if (omega1.class_of(static_cast<int>(a + 1)) != omega1.class_of(static_cast<int>(b + 1)))
        continue;
      const PointSequence& fa = target.members[target.pushed_offset + a];
      const PointSequence& fb = target.members[target.pushed_offset + b];
      std::vector<ExactScalar> ratios = pair_ratios(f.codomain, fa, fb, rv, window);
      ExactScalar hi(0);
      for (const auto& v : ratios) hi = max(hi, v);
      if (hi > s.tol) {
        verdict.status = DiffStatus::NotDifferentiable;
        verdict.offending = "zero-distance pair (" + fam1[a].label + ", " + fam1[b].label +
                            ") pushes to distance ratio " + hi.str();
        return verdict;
      }
    }
  }
  verdict.status = DiffStatus::Differentiable;
  return verdict;
}

Json DerivativeMap::to_json() const {
  Json cm = Json::array();
  for (int c : class_map) cm.push_back(c);
  return Json{{"source", source.to_json()}, {"target", target.to_json()}, {"class_map", cm}};
}

DerivativeResult metric_derivative(const MapSpec& f, const std::vector<PointSequence>& fam1,
                                   const ScalingSequence& r1, std::vector<PointSequence> fam2,
                                   const ScalingSequence& r2, TailWindow window,
                                   const Settings& s) {
  DerivativeResult out;
  DiffVerdict v = check_differentiable(f, fam1, r1, fam2, r2, window, s);
  if (v.status != DiffStatus::Differentiable) {
    out.status = v.status;
    out.note = v.offending;
    return out;
  }
  BuildResult source = build_pretangent(f.domain, fam1, r1, window, s);
  TargetFamily target = assemble_target(f, fam1, std::move(fam2), window, s);
  BuildResult target_build = build_pretangent(f.codomain, target.members, r2, window, s);
  if (!source.built() || !target_build.built()) {
    out.status = DiffStatus::Inconclusive;
    out.note = "quotient build failed: " +
               (source.built() ? target_build.offending : source.offending);
    return out;
  }
  const PretangentSpace& omega1 = *source.space;
  const PretangentSpace& omega2 = *target_build.space;
  if (omega2.seed_labels.size() != target.members.size() + 1) {
    out.status = DiffStatus::Inconclusive;
    out.note = "a pushed seed was rejected by the target build";
    return out;
  }
  std::vector<int> class_map(omega1.classes.size(), -1);
  // the marked class maps to the marked class
  class_map[static_cast<size_t>(omega1.marked)] = omega2.marked;
  for (size_t a = 0; a < fam1.size(); ++a) {
    int src = omega1.class_of(static_cast<int>(a + 1));
    int dst = omega2.class_of(static_cast<int>(target.pushed_offset + a + 1));
    if (class_map[static_cast<size_t>(src)] == -1) {
      class_map[static_cast<size_t>(src)] = dst;
    } else if (class_map[static_cast<size_t>(src)] != dst) {
      out.status = DiffStatus::Inconclusive;
      out.note = "representatives of one source class land in different target classes "
                 "(window too short)";
      return out;
    }
  }
  out.status = DiffStatus::Differentiable;
  out.derivative = DerivativeMap{omega1, omega2, std::move(class_map)};
  return out;
}

ExtendedScalar local_constancy_radius(const PretangentSpace& omega, const std::vector<int>& labels,
                                      int base_class) {
  if (labels.size() != omega.classes.size())
    throw ConfigError("local_constancy_radius: one label per class required");
  std::optional<ExactScalar> best;
  for (size_t c = 0; c < omega.classes.size(); ++c) {
    if (labels[c] == labels[static_cast<size_t>(base_class)]) continue;
    ExactScalar d = omega.dist[static_cast<size_t>(base_class)][c].rep();
    if (!best || d < *best) best = d;
  }
  return best ? ExtendedScalar(*best) : ExtendedScalar::infinity();
}

// ---------------------------------------------------------------------------
// derivative bound audit
// ---------------------------------------------------------------------------

Json Prop54Report::to_json() const {
  Json audits_json = Json::array();
  for (const auto& a : audits)
    audits_json.push_back(Json{{"map", a.map},
                               {"space", a.space},
                               {"status", to_string(a.status)},
                               {"c_alpha", a.c_alpha.str()},
                               {"ok", a.ok}});
  return Json{{"bound", bound.str()},
              {"audits", audits_json},
              {"sharpness", Json{{"achieved", sharpness.achieved},
                                 {"c_alpha_identity", sharpness.c_alpha_identity.str()},
                                 {"rho_lower", sharpness.rho_lower_value.str()},
                                 {"note", sharpness.note}}},
              {"all_ok", all_ok}};
}

namespace {

struct SpaceUnderAudit {
  std::string name;
  ScalingSequence scaling;
  std::vector<PointSequence> seeds;
  TailWindow window;
};

struct MapUnderAudit {
  std::string name;
  ExactScalar slope;
  ExactScalar r2_factor;  // r2 = factor * r1
};

}  // namespace

Prop54Report derivative_bound_audit(const PointedSpaceSpec& space, TailWindow window,
                                    const Settings& s) {
  window.validate();
  const DistanceSet& set = space.set();
  CspReport csp = csp_verdict(set, window, s);
  if (csp.kind != CspKind::Csp)
    throw PreconditionError("derivative bound audit needs a csp distance set (verdict: " +
                            to_string(csp.kind) + ")");
  const ExactScalar m_value = csp.m_estimate->value;
  Prop54Report rep;
  rep.bound = m_value.reciprocal();

  std::vector<SpaceUnderAudit> spaces;
  ExtremalConstruction bounded = extremal_normal_scaling(set, csp, window, s);
  spaces.push_back(SpaceUnderAudit{"bounded_extremal", bounded.scaling,
                                   {bounded.t_seed, bounded.s_witness}, bounded.build_window});
  ExtremalConstruction discrete = extremal_discrete_scaling(set, csp, window, s);
  spaces.push_back(SpaceUnderAudit{"discrete_extremal", discrete.scaling,
                                   {discrete.t_seed, discrete.s_witness}, discrete.build_window});
  {
    ScalingSequence plain = ScalingSequence::make(set.tails.front(), window, s);
    spaces.push_back(SpaceUnderAudit{
        "first_tail", plain,
        {PointSequence::from_spec(set.tails.front(), window.end, "tail")}, window});
  }

  const std::vector<MapUnderAudit> maps = {
      {"identity", ExactScalar(1), ExactScalar(1)},
      {"dilation_2", ExactScalar(2), ExactScalar(1)},
      {"dilation_2_rescaled", ExactScalar(2), ExactScalar(2)},
      {"dilation_1_3", ExactScalar(1, 3), ExactScalar(1)},
      {"constant", ExactScalar(0), ExactScalar(1)},
  };

  rep.all_ok = true;
  for (const auto& sp : spaces) {
    for (const auto& mp : maps) {
      MapAudit audit;
      audit.map = mp.name;
      audit.space = sp.name;
      DistanceSet codomain_set =
          mp.slope.is_zero() ? set : scale_set(set, mp.slope);
      MapSpec f = MapSpec::make(space, PointedSpaceSpec::line_set(std::move(codomain_set)),
                                MapRule::linear(mp.slope));
      ScalingSequence r2 = mp.r2_factor == ExactScalar(1)
                               ? sp.scaling
                               : ScalingSequence::make(
                                     SequenceSpec::scaled(mp.r2_factor, sp.scaling.spec),
                                     sp.window, s);
      DerivativeResult d = metric_derivative(f, sp.seeds, sp.scaling, {}, r2, sp.window, s);
      audit.status = d.status;
      if (d.status == DiffStatus::Differentiable) {
        const DerivativeMap& dm = *d.derivative;
        audit.c_alpha = local_constancy_radius(dm.source, dm.class_map, dm.source.marked);
        audit.ok = !audit.c_alpha.is_finite() ||
                   audit.c_alpha.value() + s.audit_tol >= rep.bound;
      } else {
        audit.ok = false;
      }
      rep.all_ok = rep.all_ok && audit.ok;
      rep.audits.push_back(std::move(audit));
    }
  }

  // sharpness: on the discrete extremal space the identity's radius equals
  // rho_* which sits at 1/M
  {
    MapSpec ident = MapSpec::make(space, space, MapRule::linear(ExactScalar(1)));
    DerivativeResult d =
        metric_derivative(ident, spaces[1].seeds, spaces[1].scaling, {}, spaces[1].scaling,
                          spaces[1].window, s);
    if (d.status == DiffStatus::Differentiable) {
      const DerivativeMap& dm = *d.derivative;
      ExtendedScalar c = local_constancy_radius(dm.source, dm.class_map, dm.source.marked);
      ExtendedScalar rl = rho_lower(dm.source);
      if (c.is_finite() && rl.is_finite()) {
        rep.sharpness.c_alpha_identity = c.value();
        rep.sharpness.rho_lower_value = rl.value();
        rep.sharpness.achieved =
            c.value() == rl.value() &&
            abs_diff(c.value(), rep.bound) <= s.audit_tol * max(ExactScalar(1), rep.bound);
        rep.sharpness.note = rep.sharpness.achieved
                                 ? "identity radius equals rho_* at 1/M"
                                 : "identity radius " + c.value().str() + " vs bound " +
                                       rep.bound.str();
      } else {
        rep.sharpness.note = "discrete extremal space degenerated to the marked class";
      }
    } else {
      rep.sharpness.note = "identity on the discrete extremal space: " + d.note;
    }
    rep.all_ok = rep.all_ok && rep.sharpness.achieved;
  }
  return rep;
}

}  // namespace portan
