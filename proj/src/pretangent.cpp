#include "portan/pretangent.hpp"

#include <algorithm>
#include <random>

namespace portan {

// ---------------------------------------------------------------------------
// spaces and point sequences
// ---------------------------------------------------------------------------

OracleSpace::OracleSpace(int families, DistFn fn, TailWindow check_window,
                         std::int64_t triangle_samples)
    : families_(families), fn_(std::move(fn)) {
  if (families_ < 1) throw ValidationError("oracle space needs at least one family");
  check_window.validate();
  std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> fam(-1, families_ - 1);
  std::uniform_int_distribution<std::int64_t> idx(check_window.start, check_window.end);
  for (std::int64_t t = 0; t < triangle_samples; ++t) {
    int i = fam(rng), j = fam(rng), k = fam(rng);
    std::int64_t n = idx(rng);
    if (!fn_(i, i, n).is_zero() || !fn_(j, j, n).is_zero())
      throw ValidationError("oracle distance rule is nonzero on the diagonal");
    if (fn_(i, j, n) != fn_(j, i, n))
      throw ValidationError("oracle distance rule is not symmetric");
    if (fn_(i, j, n) > fn_(i, k, n) + fn_(k, j, n))
      throw ValidationError("oracle distance rule fails the triangle inequality on a sample");
  }
}

ExactScalar OracleSpace::distance(int i, int j, std::int64_t n) const {
  if (i < -1 || i >= families_ || j < -1 || j >= families_)
    throw ConfigError("oracle space: family id out of range");
  return fn_(i, j, n);
}

PointedSpaceSpec PointedSpaceSpec::line_set(DistanceSet set) {
  PointedSpaceSpec sp;
  sp.line = std::move(set);
  return sp;
}

PointedSpaceSpec PointedSpaceSpec::oracle_space(std::shared_ptr<const OracleSpace> o) {
  PointedSpaceSpec sp;
  sp.oracle = std::move(o);
  return sp;
}

const DistanceSet& PointedSpaceSpec::set() const {
  if (!line) throw PreconditionError("this operation needs a line-set space");
  return *line;
}

PointSequence PointSequence::marked() { return PointSequence{}; }

PointSequence PointSequence::from_spec(SequenceSpec s, std::int64_t upto, std::string label) {
  PointSequence p;
  p.kind = Kind::Positions;
  p.label = label.empty() ? s.describe() : std::move(label);
  p.values = s.evaluate_range(1, upto);
  p.spec = std::move(s);
  return p;
}

PointSequence PointSequence::from_values(std::vector<ExactScalar> vals, std::string label) {
  PointSequence p;
  p.kind = Kind::Positions;
  p.label = std::move(label);
  p.values = std::move(vals);
  return p;
}

PointSequence PointSequence::oracle_family(int id, std::string label) {
  PointSequence p;
  p.kind = Kind::OracleFamily;
  p.family = id;
  p.label = label.empty() ? "family[" + std::to_string(id) + "]" : std::move(label);
  return p;
}

ExactScalar PointSequence::position(std::int64_t n) const {
  if (kind == Kind::Marked) return ExactScalar(0);
  if (kind != Kind::Positions) throw PreconditionError("oracle families carry no position");
  if (n < 1 || n > static_cast<std::int64_t>(values.size()))
    throw ConfigError("point sequence: index " + std::to_string(n) + " not materialized");
  return values[static_cast<size_t>(n - 1)];
}

namespace {

ExactScalar point_distance(const PointedSpaceSpec& space, const PointSequence& x,
                           const PointSequence& y, std::int64_t n) {
  if (space.is_line()) return abs_diff(x.position(n), y.position(n));
  int i = x.kind == PointSequence::Kind::Marked ? -1 : x.family;
  int j = y.kind == PointSequence::Kind::Marked ? -1 : y.family;
  return space.oracle->distance(i, j, n);
}

void validate_seed(const PointedSpaceSpec& space, const PointSequence& seed, TailWindow window,
                   const Settings& s) {
  if (space.is_line()) {
    if (seed.kind == PointSequence::Kind::OracleFamily)
      throw PreconditionError("oracle family sequence in a line-set space");
    if (seed.kind == PointSequence::Kind::Positions) {
      if (static_cast<std::int64_t>(seed.values.size()) < window.end)
        throw ConfigError("seed '" + seed.label + "' is not materialized through the window");
      for (std::int64_t n = 1; n <= window.end; ++n) {
        ExactScalar v = seed.position(n);
        if (!v.is_zero() && !contains(space.set(), v, s))
          throw ValidationError("seed '" + seed.label + "' leaves the space at n=" +
                                std::to_string(n) + " (position " + v.str() + ")");
      }
    }
  } else if (seed.kind == PointSequence::Kind::Positions) {
    throw PreconditionError("position sequence in an oracle space");
  }
}

}  // namespace

StabilityVerdict mutual_stability(const PointedSpaceSpec& space, const PointSequence& x,
                                  const PointSequence& y, const ScalingSequence& r,
                                  TailWindow window, const Settings& s) {
  window.validate();
  std::vector<ExactScalar> rv = r.spec.evaluate_range(window.start, window.end);
  std::vector<ExactScalar> ratios;
  ratios.reserve(rv.size());
  for (std::int64_t n = window.start; n <= window.end; ++n)
    ratios.push_back(point_distance(space, x, y, n) / rv[static_cast<size_t>(n - window.start)]);
  return StabilityVerdict{x.label, y.label, tail_stats_values(ratios, window, s)};
}

// ---------------------------------------------------------------------------
// pretangent construction
// ---------------------------------------------------------------------------

Json RefinementLog::to_json() const {
  Json steps_json = Json::array();
  for (const auto& st : steps)
    steps_json.push_back(Json{{"x", st.x_label},
                              {"y", st.y_label},
                              {"band_lo", st.band_lo.str()},
                              {"band_hi", st.band_hi.str()},
                              {"kept", st.kept}});
  Json idx = Json::array();
  for (auto i : final_indices) idx.push_back(i);
  return Json{{"steps", steps_json}, {"final_indices", idx}};
}

int PretangentSpace::class_of(int seed) const {
  for (size_t c = 0; c < classes.size(); ++c)
    for (int m : classes[c])
      if (m == seed) return static_cast<int>(c);
  throw ConfigError("seed id not present in the space");
}

Json PretangentSpace::to_json() const {
  Json classes_json = Json::array();
  for (const auto& cls : classes) {
    Json members = Json::array();
    for (int m : cls) members.push_back(seed_labels[static_cast<size_t>(m)]);
    classes_json.push_back(std::move(members));
  }
  Json matrix = Json::array();
  for (const auto& row : dist) {
    Json r = Json::array();
    for (const auto& d : row)
      r.push_back(Json{{"exact", d.exact()},
                       {"value", d.rep().str()},
                       {"lo", d.lo.str()},
                       {"hi", d.hi.str()}});
    matrix.push_back(std::move(r));
  }
  return Json{{"classes", classes_json}, {"marked", marked},      {"dist", matrix},
              {"normal", normal},        {"log", log.to_json()}};
}

namespace {

struct PairKey {
  size_t i, j;  // i < j
};

// largest index cluster whose values fit in a band of width tol*max(1, hi);
// deterministic: the earliest widest run after sorting by value
std::vector<std::int64_t> largest_cluster(const std::vector<ExactScalar>& vals,
                                          const std::vector<std::int64_t>& indices,
                                          const ExactScalar& tol, ExactScalar* lo_out,
                                          ExactScalar* hi_out) {
  std::vector<size_t> order(vals.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return vals[a] < vals[b]; });
  size_t best_begin = 0, best_len = 1, begin = 0;
  for (size_t end = 0; end < order.size(); ++end) {
    while (vals[order[end]] - vals[order[begin]] >
           tol * max(ExactScalar(1), vals[order[end]]))
      ++begin;
    if (end - begin + 1 > best_len) {
      best_len = end - begin + 1;
      best_begin = begin;
    }
  }
  std::vector<std::int64_t> kept;
  kept.reserve(best_len);
  for (size_t k = best_begin; k < best_begin + best_len; ++k)
    kept.push_back(indices[order[k]]);
  std::sort(kept.begin(), kept.end());
  *lo_out = vals[order[best_begin]];
  *hi_out = vals[order[best_begin + best_len - 1]];
  return kept;
}

}  // namespace

BuildResult build_pretangent(const PointedSpaceSpec& space, std::vector<PointSequence> seeds,
                             const ScalingSequence& r, TailWindow window, const Settings& s) {
  window.validate();
  BuildResult res;
  std::vector<PointSequence> family;
  family.push_back(PointSequence::marked());
  for (auto& seed : seeds) family.push_back(std::move(seed));

  std::vector<ExactScalar> rv = r.spec.evaluate_range(1, window.end);
  for (const auto& v : rv)
    if (v.is_zero()) throw ValidationError("scaling sequence vanishes inside the window");

  // seed screen: positions must live in the space and d(x,p)/r must not blow up
  std::vector<PointSequence> kept_seeds;
  for (size_t i = 0; i < family.size(); ++i) {
    validate_seed(space, family[i], window, s);
    if (i == 0) {
      kept_seeds.push_back(family[i]);
      continue;
    }
    std::vector<ExactScalar> to_marked;
    for (std::int64_t n = window.start; n <= window.end; ++n)
      to_marked.push_back(point_distance(space, family[i], family[0], n) /
                          rv[static_cast<size_t>(n - 1)]);
    if (growth_trend(to_marked))
      res.rejected_seeds.push_back(family[i].label +
                                   ": d(x,p)/r shows a doubling growth trend");
    else
      kept_seeds.push_back(family[i]);
  }
  family = std::move(kept_seeds);
  const size_t count = family.size();

  // pairwise ratio table over the window
  std::vector<std::vector<std::vector<ExactScalar>>> ratio(
      count, std::vector<std::vector<ExactScalar>>(count));
  for (size_t i = 0; i < count; ++i)
    for (size_t j = i + 1; j < count; ++j) {
      std::vector<ExactScalar>& rr = ratio[i][j];
      rr.reserve(static_cast<size_t>(window.length()));
      for (std::int64_t n = window.start; n <= window.end; ++n)
        rr.push_back(point_distance(space, family[i], family[j], n) /
                     rv[static_cast<size_t>(n - 1)]);
    }

  // greedy refinement: keep a common index subsequence on which every pair's
  // ratios sit inside a tol band
  std::vector<std::int64_t> indices;
  for (std::int64_t n = window.start; n <= window.end; ++n) indices.push_back(n);
  RefinementLog log;
  auto band_of = [&](const std::vector<ExactScalar>& rr,
                     const std::vector<std::int64_t>& idx) {
    ExactScalar lo = rr[static_cast<size_t>(idx.front() - window.start)];
    ExactScalar hi = lo;
    for (auto n : idx) {
      const ExactScalar& v = rr[static_cast<size_t>(n - window.start)];
      lo = min(lo, v);
      hi = max(hi, v);
    }
    return std::pair<ExactScalar, ExactScalar>(lo, hi);
  };
  for (int pass = 0; pass < 4; ++pass) {
    bool changed = false;
    for (size_t i = 0; i < count && !indices.empty(); ++i) {
      for (size_t j = i + 1; j < count; ++j) {
        auto [lo, hi] = band_of(ratio[i][j], indices);
        if (hi - lo <= s.tol * max(ExactScalar(1), hi)) continue;
        std::vector<ExactScalar> vals;
        vals.reserve(indices.size());
        for (auto n : indices)
          vals.push_back(ratio[i][j][static_cast<size_t>(n - window.start)]);
        ExactScalar blo, bhi;
        std::vector<std::int64_t> kept = largest_cluster(vals, indices, s.tol, &blo, &bhi);
        log.steps.push_back(RefinementStep{family[i].label, family[j].label, blo, bhi,
                                           static_cast<std::int64_t>(kept.size())});
        if (static_cast<std::int64_t>(kept.size()) < s.min_refined) {
          res.status = BuildStatus::Inconclusive;
          res.offending = "pair (" + family[i].label + ", " + family[j].label +
                          ") cannot be stabilized: only " + std::to_string(kept.size()) +
                          " indices share a band";
          return res;
        }
        indices = std::move(kept);
        changed = true;
      }
    }
    if (!changed) break;
  }
  // verify every pair is stable on the final index set
  for (size_t i = 0; i < count; ++i)
    for (size_t j = i + 1; j < count; ++j) {
      auto [lo, hi] = band_of(ratio[i][j], indices);
      if (hi - lo > s.tol * max(ExactScalar(1), hi)) {
        res.status = BuildStatus::Inconclusive;
        res.offending = "pair (" + family[i].label + ", " + family[j].label +
                        ") still oscillates after refinement";
        return res;
      }
    }
  log.final_indices = indices;

  // distance bands on the final set; zero vs separated classification
  std::vector<std::vector<DistVal>> seed_dist(count, std::vector<DistVal>(count));
  for (size_t i = 0; i < count; ++i) seed_dist[i][i] = DistVal{ExactScalar(0), ExactScalar(0)};
  std::vector<size_t> uf(count);
  for (size_t i = 0; i < count; ++i) uf[i] = i;
  std::function<size_t(size_t)> find = [&](size_t x) {
    while (uf[x] != x) x = uf[x] = uf[uf[x]];
    return x;
  };
  for (size_t i = 0; i < count; ++i)
    for (size_t j = i + 1; j < count; ++j) {
      auto [lo, hi] = band_of(ratio[i][j], indices);
      seed_dist[i][j] = seed_dist[j][i] = DistVal{lo, hi};
      if (hi <= s.tol) {
        uf[find(i)] = find(j);
      } else if (lo <= s.tol) {
        res.status = BuildStatus::Inconclusive;
        res.offending = "pair (" + family[i].label + ", " + family[j].label +
                        ") is neither zero nor separated at this window";
        return res;
      }
    }

  PretangentSpace omega;
  std::vector<int> class_of(count, -1);
  for (size_t i = 0; i < count; ++i) {
    size_t root = find(i);
    if (class_of[root] == -1) {
      class_of[root] = static_cast<int>(omega.classes.size());
      omega.classes.emplace_back();
    }
    class_of[i] = class_of[root];
    omega.classes[static_cast<size_t>(class_of[i])].push_back(static_cast<int>(i));
  }
  omega.marked = class_of[0];
  for (const auto& f : family) omega.seed_labels.push_back(f.label);

  const size_t nclasses = omega.classes.size();
  omega.dist.assign(nclasses, std::vector<DistVal>(nclasses, DistVal{ExactScalar(0), ExactScalar(0)}));
  for (size_t a = 0; a < nclasses; ++a)
    for (size_t b = a + 1; b < nclasses; ++b) {
      std::optional<DistVal> agg;
      for (int x : omega.classes[a])
        for (int y : omega.classes[b]) {
          const DistVal& d = seed_dist[static_cast<size_t>(x)][static_cast<size_t>(y)];
          if (!agg)
            agg = d;
          else
            agg = DistVal{min(agg->lo, d.lo), max(agg->hi, d.hi)};
        }
      if (agg->lo <= s.tol) {
        res.status = BuildStatus::Inconclusive;
        res.offending = "classes merged inconsistently: a cross-class pair sits at zero";
        return res;
      }
      omega.dist[a][b] = omega.dist[b][a] = *agg;
    }
  // triangle screen with band slack (exact entries have zero slack)
  for (size_t a = 0; a < nclasses; ++a)
    for (size_t b = 0; b < nclasses; ++b)
      for (size_t c = 0; c < nclasses; ++c) {
        if (a == b || b == c || a == c) continue;
        ExactScalar slack = (omega.dist[a][b].hi - omega.dist[a][b].lo) +
                            (omega.dist[a][c].hi - omega.dist[a][c].lo) +
                            (omega.dist[c][b].hi - omega.dist[c][b].lo);
        if (omega.dist[a][b].rep() > omega.dist[a][c].rep() + omega.dist[c][b].rep() + slack) {
          res.status = BuildStatus::Inconclusive;
          res.offending = "triangle inequality fails between quotient classes";
          return res;
        }
      }

  omega.normal = space.is_line() && is_normal_scaling(space.set(), r.spec, window, s).normal;
  omega.log = std::move(log);
  res.space = std::move(omega);
  res.status = BuildStatus::Built;
  return res;
}

ExactScalar rho_star(const PretangentSpace& omega) {
  ExactScalar best(0);
  for (size_t c = 0; c < omega.classes.size(); ++c)
    best = max(best, omega.dist[static_cast<size_t>(omega.marked)][c].rep());
  return best;
}

ExtendedScalar rho_lower(const PretangentSpace& omega) {
  std::optional<ExactScalar> best;
  for (size_t c = 0; c < omega.classes.size(); ++c) {
    if (static_cast<int>(c) == omega.marked) continue;
    ExactScalar d = omega.dist[static_cast<size_t>(omega.marked)][c].rep();
    if (!best || d < *best) best = d;
  }
  return best ? ExtendedScalar(*best) : ExtendedScalar::infinity();
}

// ---------------------------------------------------------------------------
// extremal constructions
// ---------------------------------------------------------------------------

namespace {

struct ExtremalData {
  std::vector<std::int64_t> picked;
  std::vector<ExactScalar> lefts, next_rights;
};

ExtremalData pick_extremal(const CspReport& csp, const Settings& s) {
  if (csp.kind != CspKind::Csp || !csp.universal || !csp.m_estimate ||
      !csp.m_estimate->converged())
    throw PreconditionError("extremal construction needs a csp verdict with stabilized M");
  const IntervalSequence& L = *csp.universal;
  // keep the gap indices whose ratio attains the stabilized suffix sup
  const ExactScalar threshold = csp.m_estimate->tail_min;
  ExtremalData out;
  for (std::int64_t n = L.first_index; n + 1 <= L.last_index(); ++n) {
    ExactScalar ratio = L.at(n).a / L.at(n + 1).b;
    if (ratio + s.tol * max(ExactScalar(1), ratio) >= threshold) {
      out.picked.push_back(n);
      out.lefts.push_back(L.at(n).a);
      out.next_rights.push_back(L.at(n + 1).b);
    }
  }
  if (static_cast<std::int64_t>(out.picked.size()) < 2 * s.min_window)
    throw PreconditionError("too few limsup-attaining gaps for an extremal construction");
  return out;
}

ScalingSequence materialized_scaling(std::vector<ExactScalar> values, TailWindow window,
                                     const Settings& s) {
  // explicit prefix with a harmless geometric continuation below the window
  SequenceSpec filler = SequenceSpec::geometric(values.back(), ExactScalar(1, 2));
  SequenceSpec spec = SequenceSpec::explicit_prefix(std::move(values), std::move(filler));
  return ScalingSequence::make(std::move(spec), window, s);
}

ExtremalConstruction build_construction(std::vector<ExactScalar> r_vals,
                                        std::vector<ExactScalar> t_vals,
                                        std::vector<std::int64_t> picked, TailWindow window,
                                        const Settings& s) {
  std::int64_t k = static_cast<std::int64_t>(r_vals.size());
  TailWindow build_window = window;
  if (k < window.end) build_window = TailWindow{std::max<std::int64_t>(1, k / 4), k};
  if (k > window.end) {
    r_vals.resize(static_cast<size_t>(window.end));
    t_vals.resize(static_cast<size_t>(window.end));
  }
  ExtremalConstruction out{materialized_scaling(r_vals, build_window, s),
                           PointSequence::from_values(t_vals, "t"),
                           PointSequence::from_values(r_vals, "s"), build_window,
                           std::move(picked)};
  return out;
}

}  // namespace

ExtremalConstruction extremal_normal_scaling(const DistanceSet& set, const CspReport& csp,
                                             TailWindow window, const Settings& s) {
  (void)set;
  ExtremalData data = pick_extremal(csp, s);
  // scale by the next gap's right endpoint; the left endpoint sits at ratio M
  return build_construction(data.next_rights, data.lefts, data.picked, window, s);
}

ExtremalConstruction extremal_discrete_scaling(const DistanceSet& set, const CspReport& csp,
                                               TailWindow window, const Settings& s) {
  (void)set;
  ExtremalData data = pick_extremal(csp, s);
  // scale by the left endpoints; the next right endpoint sits at ratio 1/M
  return build_construction(data.lefts, data.next_rights, data.picked, window, s);
}

// ---------------------------------------------------------------------------
// boundedness / discreteness audit
// ---------------------------------------------------------------------------

Json BoundednessAudit::to_json() const {
  Json j{{"kind", to_string(kind)},
         {"r_star",
          Json{{"verdict", to_string(r_star.verdict)},
               {"value", r_star.converged() ? r_star.value.str() : ""},
               {"note", r_star.note}}},
         {"r_lower",
          Json{{"verdict", to_string(r_lower.verdict)},
               {"value", r_lower.converged() ? r_lower.value.str() : ""},
               {"note", r_lower.note}}},
         {"cross_check_ok", cross_check_ok},
         {"note", note}};
  if (extremal_rho_star) j["extremal_rho_star"] = extremal_rho_star->str();
  if (extremal_rho_lower) j["extremal_rho_lower"] = extremal_rho_lower->str();
  return j;
}

BoundednessAudit boundedness_audit(const PointedSpaceSpec& space, TailWindow window,
                                   const Settings& s) {
  window.validate();
  if (!space.is_line())
    throw PreconditionError("boundedness audit reduces through the distance set of a line space");
  const DistanceSet& set = space.set();
  BoundednessAudit audit;
  if (!set.zero_accumulation()) {
    audit.kind = CspKind::Vacuous;
    audit.r_star = LimitEstimate::converged_exact(
        ExactScalar(0), window, "0 isolated: every pretangent space is the singleton marked class");
    audit.r_lower = LimitEstimate::diverged(window, s, "+infinity: all spaces are singletons");
    audit.cross_check_ok = true;
    audit.note = "no normal scaling sequences exist";
    return audit;
  }
  CspReport csp = csp_verdict(set, window, s);
  audit.kind = csp.kind;
  if (csp.kind == CspKind::NotCsp) {
    audit.r_star = LimitEstimate::diverged(window, s, "not uniformly bounded: " + csp.note);
    audit.r_lower = LimitEstimate::converged_exact(ExactScalar(0), window,
                                                   "not uniformly discrete: " + csp.note);
    audit.cross_check_ok = true;
    audit.note = csp.note;
    return audit;
  }
  if (csp.kind != CspKind::Csp) {
    LimitEstimate open;
    open.verdict = Verdict::Oscillates;
    open.window = window;
    open.note = csp.note;
    audit.r_star = open;
    audit.r_lower = open;
    audit.note = csp.note;
    return audit;
  }
  const LimitEstimate& m = *csp.m_estimate;
  audit.r_star = m;
  audit.r_star.note = "M of the universal candidate";
  LimitEstimate rl;
  rl.verdict = Verdict::Converges;
  rl.value = m.value.reciprocal();
  rl.tail_min = m.tail_max.reciprocal();
  rl.tail_max = m.tail_min.reciprocal();
  rl.window = window;
  rl.note = "reciprocal of M";
  audit.r_lower = rl;

  // cross-validate against the extremal spaces
  audit.cross_check_ok = true;
  try {
    ExtremalConstruction bounded = extremal_normal_scaling(set, csp, window, s);
    BuildResult br = build_pretangent(space, {bounded.t_seed, bounded.s_witness},
                                      bounded.scaling, bounded.build_window, s);
    if (br.built()) {
      audit.extremal_rho_star = rho_star(*br.space);
      if (abs_diff(*audit.extremal_rho_star, m.value) >
          s.audit_tol * max(ExactScalar(1), m.value)) {
        audit.cross_check_ok = false;
        audit.note += "extremal rho* = " + audit.extremal_rho_star->str() +
                      " strays from M = " + m.value.str() + "; ";
      }
    } else {
      audit.cross_check_ok = false;
      audit.note += "bounded extremal build: " + br.offending + "; ";
    }
    ExtremalConstruction discrete = extremal_discrete_scaling(set, csp, window, s);
    BuildResult dr = build_pretangent(space, {discrete.t_seed, discrete.s_witness},
                                      discrete.scaling, discrete.build_window, s);
    if (dr.built()) {
      audit.extremal_rho_lower = rho_lower(*dr.space);
      ExactScalar target = m.value.reciprocal();
      if (!audit.extremal_rho_lower->is_finite() ||
          abs_diff(audit.extremal_rho_lower->value(), target) >
              s.audit_tol * max(ExactScalar(1), target)) {
        audit.cross_check_ok = false;
        audit.note += "extremal rho_* = " + audit.extremal_rho_lower->str() +
                      " strays from 1/M = " + target.str() + "; ";
      }
    } else {
      audit.cross_check_ok = false;
      audit.note += "discrete extremal build: " + dr.offending + "; ";
    }
  } catch (const PreconditionError& e) {
    audit.cross_check_ok = false;
    audit.note += e.what();
  }
  if (audit.note.empty()) audit.note = "extremal spaces confirm M and 1/M";
  return audit;
}

LimitEstimate R_star_estimate(const PointedSpaceSpec& space, TailWindow window,
                              const Settings& s) {
  return boundedness_audit(space, window, s).r_star;
}

LimitEstimate R_lower_estimate(const PointedSpaceSpec& space, TailWindow window,
                               const Settings& s) {
  return boundedness_audit(space, window, s).r_lower;
}

// ---------------------------------------------------------------------------
// weak self-similarity
// ---------------------------------------------------------------------------

Json WeakSelfSimilarityReport::to_json() const {
  Json probes_json = Json::array();
  for (const auto& p : probes)
    probes_json.push_back(Json{{"t", p.t.str()},
                               {"unit_sphere_ok", p.unit_sphere_ok},
                               {"rho_star", p.rho_star_value.str()},
                               {"rho_lower", p.rho_lower_value.str()}});
  Json j{{"probes", probes_json},
         {"sup_rho_star", sup_rho_star.str()},
         {"inf_rho_lower", inf_rho_lower.str()},
         {"consistent", consistent}};
  if (product) j["product"] = product->str();
  return j;
}

WeakSelfSimilarityReport weak_self_similarity_probe(const PointedSpaceSpec& space,
                                                    const std::vector<ExactScalar>& samples,
                                                    TailWindow window, const Settings& s) {
  window.validate();
  const DistanceSet& set = space.set();
  WeakSelfSimilarityReport rep;
  rep.sup_rho_star = ExactScalar(0);
  rep.inf_rho_lower = ExtendedScalar::infinity();
  for (const auto& t : samples) {
    if (t.is_zero() || !contains(set, t, s))
      throw PreconditionError("weak self-similarity probe: t = " + t.str() + " is not in E");
    DistanceSet scaled = scale_set(set, t.reciprocal());
    ScalingProbeReport probe;
    probe.t = t;
    probe.unit_sphere_ok = contains(scaled, ExactScalar(1), s);
    PointedSpaceSpec scaled_space = PointedSpaceSpec::line_set(scaled);
    BoundednessAudit audit = boundedness_audit(scaled_space, window, s);
    if (audit.kind != CspKind::Csp || !audit.extremal_rho_star || !audit.extremal_rho_lower)
      throw PreconditionError("weak self-similarity probe needs csp rescalings (t = " + t.str() +
                              ")");
    probe.rho_star_value = *audit.extremal_rho_star;
    probe.rho_lower_value = *audit.extremal_rho_lower;
    rep.sup_rho_star = max(rep.sup_rho_star, probe.rho_star_value);
    if (probe.rho_lower_value < rep.inf_rho_lower) rep.inf_rho_lower = probe.rho_lower_value;
    rep.probes.push_back(std::move(probe));
  }
  if (rep.inf_rho_lower.is_finite() && !rep.sup_rho_star.is_zero()) {
    rep.product = rep.sup_rho_star * rep.inf_rho_lower.value();
    rep.consistent = abs_diff(*rep.product, ExactScalar(1)) <= s.audit_tol;
  }
  return rep;
}

}  // namespace portan
