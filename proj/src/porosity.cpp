#include "portan/porosity.hpp"

#include <algorithm>

namespace portan {

// ---------------------------------------------------------------------------
// IntervalSequence
// ---------------------------------------------------------------------------

const GapComponent& IntervalSequence::at(std::int64_t n) const {
  if (n < first_index || n > last_index())
    throw ConfigError("interval sequence: index " + std::to_string(n) + " outside [" +
                      std::to_string(first_index) + ", " + std::to_string(last_index()) + "]");
  return gaps[static_cast<size_t>(n - first_index)];
}

Json IntervalSequence::to_json() const {
  Json arr = Json::array();
  for (const auto& g : gaps)
    arr.push_back(Json{{"a", rational_to_json(g.a)}, {"b", rational_to_json(g.b)}});
  return Json{{"first_index", first_index}, {"gaps", arr}};
}

namespace {

// last 1-based position i violating ok(v[i], v[i+1]), or 0 when none
template <typename Pred>
std::int64_t last_violation(const std::vector<ExactScalar>& v, Pred ok) {
  std::int64_t bad = 0;
  for (size_t i = 0; i + 1 < v.size(); ++i)
    if (!ok(v[i], v[i + 1])) bad = static_cast<std::int64_t>(i + 1);
  return bad;
}

std::vector<ExactScalar> window_slice(const std::vector<ExactScalar>& full, TailWindow w) {
  // full[i] carries index i+1; slice out [w.start, w.end]
  if (static_cast<std::int64_t>(full.size()) < w.end)
    throw ConfigError("window slice: not enough values");
  return std::vector<ExactScalar>(full.begin() + (w.start - 1), full.begin() + w.end);
}

// growth evidence that has cleared 1: values at or below 1 can never witness
// an unbounded ratio
bool ratio_explodes(const std::vector<ExactScalar>& values) {
  if (!growth_trend(values)) return false;
  ExactScalar deep_max(0);
  for (size_t i = values.size() / 2; i < values.size(); ++i) deep_max = max(deep_max, values[i]);
  return deep_max > ExactScalar(1);
}

}  // namespace

MembershipReport interval_sequence_membership(const IntervalSequence& seq, const DistanceSet& set,
                                              TailWindow window, bool verify_maximality,
                                              const Settings& s) {
  window.validate();
  MembershipReport rep;
  if (seq.first_index > window.start) {
    rep.failure =
        "gaps start at index " + std::to_string(seq.first_index) + ", after the window start";
    return rep;
  }
  if (seq.last_index() < window.end) {
    rep.failure =
        "gaps end at index " + std::to_string(seq.last_index()) + ", before the window end";
    return rep;
  }
  std::vector<ExactScalar> lefts, rel;
  for (std::int64_t n = seq.first_index; n <= seq.last_index(); ++n) {
    const GapComponent& g = seq.at(n);
    if (g.a.is_zero() || g.kind != GapComponent::Kind::Interior) {
      rep.failure = "gap at index " + std::to_string(n) + " is not an interior component";
      return rep;
    }
    lefts.push_back(g.a);
    rel.push_back(g.a / g.b);
  }
  std::int64_t bad =
      last_violation(lefts, [](const ExactScalar& x, const ExactScalar& y) { return y <= x; });
  if (bad + seq.first_index > window.start) {
    rep.failure =
        "left endpoints still increase at index " + std::to_string(bad + seq.first_index - 1);
    return rep;
  }
  TailWindow local{window.start - seq.first_index + 1, window.end - seq.first_index + 1};
  if (!vanishing_certificate(window_slice(lefts, local), s.tol)) {
    rep.failure = "left endpoints do not certify decay to zero on the window";
    return rep;
  }
  if (!vanishing_certificate(window_slice(rel, local), s.tol)) {
    rep.failure = "relative gap length does not certify convergence to 1 on the window";
    return rep;
  }
  if (verify_maximality) {
    for (std::int64_t n = window.start; n <= window.end; ++n) {
      const GapComponent& g = seq.at(n);
      MemberList inside = members_in(set, g.a, g.b, 3, s);
      if (!inside.complete || inside.values.size() != 2 || inside.values[0] != g.a ||
          inside.values[1] != g.b) {
        rep.failure = "gap at index " + std::to_string(n) + " is not a maximal component";
        return rep;
      }
    }
  }
  rep.ok = true;
  return rep;
}

// ---------------------------------------------------------------------------
// asymptotic equivalence
// ---------------------------------------------------------------------------

EquivalenceCertificate EquivalenceCertificate::inverse() const {
  return EquivalenceCertificate{c2.reciprocal(), c1.reciprocal(), valid_from};
}

EquivalenceCertificate EquivalenceCertificate::compose(const EquivalenceCertificate& inner) const {
  return EquivalenceCertificate{c1 * inner.c1, c2 * inner.c2,
                                std::max(valid_from, inner.valid_from)};
}

Json EquivalenceCertificate::to_json() const {
  return Json{
      {"c1", rational_to_json(c1)}, {"c2", rational_to_json(c2)}, {"valid_from", valid_from}};
}

EquivalenceResult asymp_equivalent_values(const std::vector<ExactScalar>& a,
                                          const std::vector<ExactScalar>& gamma, TailWindow window,
                                          const Settings& s) {
  window.validate();
  if (window.length() < s.min_window)
    throw ConfigError("asymp_equivalent: window shorter than " + std::to_string(s.min_window));
  if (a.size() < static_cast<size_t>(window.end) || gamma.size() < static_cast<size_t>(window.end))
    throw ConfigError("asymp_equivalent: need values through the window end");
  std::vector<ExactScalar> fwd, bwd;
  for (std::int64_t n = window.start; n <= window.end; ++n) {
    const ExactScalar& an = a[static_cast<size_t>(n - 1)];
    const ExactScalar& gn = gamma[static_cast<size_t>(n - 1)];
    if (an.is_zero() || gn.is_zero())
      throw PreconditionError("asymp_equivalent: sequences must be strictly positive");
    fwd.push_back(gn / an);
    bwd.push_back(an / gn);
  }
  EquivalenceResult res;
  if (ratio_explodes(bwd)) {
    res.failure = EquivalenceFailure::NoLowerConstant;
    res.detail = "a/gamma shows a doubling growth trend: no positive c1";
    return res;
  }
  if (ratio_explodes(fwd)) {
    res.failure = EquivalenceFailure::NoUpperConstant;
    res.detail = "gamma/a shows a doubling growth trend: no finite c2";
    return res;
  }
  ExactScalar lo = fwd.front(), hi = fwd.front();
  for (const auto& r : fwd) {
    lo = min(lo, r);
    hi = max(hi, r);
  }
  res.certificate = EquivalenceCertificate{lo / ExactScalar(2), ExactScalar(2) * hi, window.start};
  return res;
}

EquivalenceResult asymp_equivalent(const SequenceSpec& a, const SequenceSpec& gamma,
                                   TailWindow window, const Settings& s) {
  return asymp_equivalent_values(a.evaluate_range(1, window.end),
                                 gamma.evaluate_range(1, window.end), window, s);
}

bool lemma_one_sided_equivalent(const std::vector<ExactScalar>& a,
                                const std::vector<ExactScalar>& gamma, TailWindow window,
                                const Settings& s) {
  window.validate();
  (void)s;
  std::vector<ExactScalar> bwd;
  for (std::int64_t n = window.start; n <= window.end; ++n) {
    const ExactScalar& an = a[static_cast<size_t>(n - 1)];
    const ExactScalar& gn = gamma[static_cast<size_t>(n - 1)];
    if (gn > an) throw PreconditionError("one-sided criterion needs gamma <= a on the window");
    bwd.push_back(an / gn);
  }
  return !ratio_explodes(bwd);
}

bool certificate_holds(const EquivalenceCertificate& cert, const std::vector<ExactScalar>& a,
                       const std::vector<ExactScalar>& gamma, TailWindow window) {
  for (std::int64_t n = std::max(window.start, cert.valid_from); n <= window.end; ++n) {
    const ExactScalar& an = a[static_cast<size_t>(n - 1)];
    const ExactScalar& gn = gamma[static_cast<size_t>(n - 1)];
    if (!(cert.c1 * an < gn && gn < cert.c2 * an)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// witness search
// ---------------------------------------------------------------------------

std::string to_string(WitnessStatus st) {
  switch (st) {
    case WitnessStatus::Accepted: return "accepted";
    case WitnessStatus::NoWitness: return "no_witness";
    case WitnessStatus::RefutedUnbounded: return "refuted_unbounded";
  }
  return "?";
}

TauSeq TauSeq::from_spec(const SequenceSpec& spec, std::int64_t upto, std::string label) {
  TauSeq t;
  t.label = label.empty() ? spec.describe() : std::move(label);
  t.values = spec.evaluate_range(1, upto);
  t.spec = spec;
  return t;
}

void validate_tau(const TauSeq& tau, const DistanceSet& set, TailWindow window, const Settings& s) {
  window.validate();
  if (tau.count() < window.end)
    throw ConfigError("tau sequence must be materialized through the window end");
  for (const auto& v : tau.values)
    if (v.is_zero()) throw PreconditionError("tau sequence must be strictly positive");
  std::int64_t bad =
      last_violation(tau.values, [](const ExactScalar& x, const ExactScalar& y) { return y <= x; });
  if (bad + 1 > window.start)
    throw PreconditionError("tau '" + tau.label + "' is not eventually nonincreasing: rises at " +
                            std::to_string(bad));
  if (!vanishing_certificate(window_slice(tau.values, window), s.tol))
    throw PreconditionError("tau '" + tau.label + "' has no decay-to-zero certificate");
  for (std::int64_t n = 1; n <= tau.count(); ++n)
    if (!contains(set, tau.at(n), s))
      throw PreconditionError("tau '" + tau.label + "' leaves E at index " + std::to_string(n) +
                              " (value " + tau.at(n).str() + ")");
}

namespace {

// members of E from the top down to (strictly below) floor_val, descending
std::vector<ExactScalar> member_catalog(const DistanceSet& set, const ExactScalar& floor_val,
                                        const Settings& s) {
  std::vector<ExactScalar> members;
  MemberCursor cursor(set, s);
  while (true) {
    std::optional<ExactScalar> m = cursor.next();
    if (!m) break;
    bool done = *m < floor_val;
    members.push_back(std::move(*m));
    if (done) break;
  }
  return members;
}

// first index with members[i] <= v in a descending catalog; size() when none
size_t first_at_most(const std::vector<ExactScalar>& members, const ExactScalar& v) {
  size_t lo = 0, hi = members.size();
  while (lo < hi) {
    size_t mid = lo + (hi - lo) / 2;
    if (members[mid] <= v)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo;
}

}  // namespace

Json WitnessSearchResult::to_json() const {
  Json diag_arr = Json::array();
  for (const auto& d : diags) {
    Json row{{"n", d.n}, {"tau", rational_to_json(d.tau)}, {"found", d.found}};
    if (d.found) {
      row["a"] = rational_to_json(d.a);
      row["b"] = rational_to_json(d.b);
      row["a_over_tau"] = rational_to_json(d.a_over_tau);
    }
    diag_arr.push_back(std::move(row));
  }
  Json j{{"status", to_string(status)}, {"reason", reason}, {"diagnostics", diag_arr}};
  if (witness) j["witness"] = witness->to_json();
  if (c_estimate)
    j["c_estimate"] = Json{{"verdict", to_string(c_estimate->verdict)},
                           {"value", c_estimate->converged() ? c_estimate->value.str() : ""},
                           {"tail_max", c_estimate->tail_max.str()}};
  return j;
}

WitnessSearchResult find_interval_sequence(const DistanceSet& set, const TauSeq& tau,
                                           TailWindow window, std::optional<ExactScalar> search_cap,
                                           const Settings& s) {
  validate_tau(tau, set, window, s);
  const ExactScalar cmax = search_cap.value_or(s.witness_search_cap);
  if (cmax <= ExactScalar(1)) throw ConfigError("witness search cap must exceed 1");
  const std::int64_t upto = std::min<std::int64_t>(tau.count(), window.end + 2);

  ExactScalar tau_min = tau.at(1);
  for (std::int64_t n = 1; n <= upto; ++n) tau_min = min(tau_min, tau.at(n));
  std::vector<ExactScalar> members = member_catalog(set, tau_min, s);

  WitnessSearchResult res;
  std::vector<GapComponent> selected;
  std::int64_t first_found = 0;  // start of the trailing all-found run
  for (std::int64_t n = 1; n <= upto; ++n) {
    WitnessDiag d;
    d.n = n;
    d.tau = tau.at(n);
    ExactScalar hi_val = cmax * d.tau;
    size_t best = members.size();
    for (size_t i = std::max<size_t>(first_at_most(members, hi_val), 1);
         i < members.size() && members[i] >= d.tau; ++i) {
      // maximize b/a = members[i-1]/members[i]; ties keep the larger left
      if (best == members.size() || members[i - 1] * members[best] > members[best - 1] * members[i])
        best = i;
    }
    if (best != members.size()) {
      d.found = true;
      d.a = members[best];
      d.b = members[best - 1];
      d.a_over_tau = d.a / d.tau;
      if (first_found == 0) first_found = n;
      selected.push_back(GapComponent{d.a, d.b, GapComponent::Kind::Interior});
    } else {
      selected.clear();
      first_found = 0;
    }
    res.diags.push_back(std::move(d));
  }
  if (first_found == 0 || first_found > window.start) {
    res.status = WitnessStatus::NoWitness;
    res.reason = first_found == 0 ? "no admissible gap at the window end"
                                  : "admissible gaps only from index " +
                                        std::to_string(first_found) + ", after the window start";
    return res;
  }
  IntervalSequence witness{std::move(selected), first_found};

  std::vector<ExactScalar> q;  // selection ratios a_n / tau_n from window.start on
  for (std::int64_t n = window.start; n <= upto; ++n) q.push_back(witness.at(n).a / tau.at(n));
  if (ratio_explodes(q)) {
    res.status = WitnessStatus::RefutedUnbounded;
    res.reason = "selection ratio a/tau shows a doubling growth trend on the window";
    res.witness = std::move(witness);
    return res;
  }
  MembershipReport membership = interval_sequence_membership(witness, set, window, false, s);
  if (!membership.ok) {
    res.status = WitnessStatus::NoWitness;
    res.reason = membership.failure;
    res.witness = std::move(witness);
    return res;
  }
  res.status = WitnessStatus::Accepted;
  res.c_estimate = limsup_stats_values(q, window, s);
  res.witness = std::move(witness);
  return res;
}

WitnessSearchResult find_interval_sequence(const DistanceSet& set, const SequenceSpec& tau,
                                           TailWindow window, std::optional<ExactScalar> search_cap,
                                           const Settings& s) {
  return find_interval_sequence(set, TauSeq::from_spec(tau, window.end + 2), window, search_cap, s);
}

// ---------------------------------------------------------------------------
// porosity witness (k, K, N1)
// ---------------------------------------------------------------------------

Json PorosityWitness::to_json() const {
  return Json{{"k", rational_to_json(k)},
              {"K", rational_to_json(K)},
              {"n1", n1},
              {"intervals", intervals.to_json()}};
}

PorosityWitnessResult porosity_witness(const DistanceSet& set, const SequenceSpec& tau_spec,
                                       const ExactScalar& K, TailWindow window, const Settings& s) {
  TauSeq tau = TauSeq::from_spec(tau_spec, window.end + 2);
  WitnessSearchResult found = find_interval_sequence(set, tau, window, std::nullopt, s);
  PorosityWitnessResult out;
  if (found.status != WitnessStatus::Accepted) {
    out.refutation = std::move(found);
    return out;
  }
  ExactScalar k = found.c_estimate->tail_max + s.witness_margin;
  if (K <= k) throw ConfigError("porosity witness: K = " + K.str() + " must exceed k = " + k.str());
  const IntervalSequence& seq = *found.witness;
  std::int64_t n1 = 0;
  for (std::int64_t n = seq.last_index(); n >= seq.first_index; --n) {
    const GapComponent& g = seq.at(n);
    if (g.a <= k * tau.at(n) && K * tau.at(n) <= g.b)
      n1 = n;
    else
      break;
  }
  if (n1 == 0 || n1 > window.end) {
    found.reason =
        "no suffix where (k tau, K tau) stays inside the witness gaps for K = " + K.str();
    out.refutation = std::move(found);
    return out;
  }
  out.witness = PorosityWitness{std::move(k), K, n1, *found.witness};
  return out;
}

// ---------------------------------------------------------------------------
// universal candidates and M(L)
// ---------------------------------------------------------------------------

CandidateResult universal_candidate(const DistanceSet& set, const ExactScalar& h0,
                                    const ExactScalar& theta, TailWindow window,
                                    const Settings& s) {
  window.validate();
  if (!set.zero_accumulation())
    throw PreconditionError("universal candidate needs 0 to be an accumulation point of E");
  if (h0.is_zero()) throw ConfigError("universal candidate: h0 must be positive");
  const std::int64_t needed = window.end + 2;
  CandidateResult out;
  std::vector<GapComponent> kept;
  MemberCursor cursor(set, s);
  try {
    std::optional<ExactScalar> m = cursor.next_at_most(h0);
    std::int64_t walked = 0;
    ExactScalar prev;
    bool have_prev = false;
    while (m && static_cast<std::int64_t>(kept.size()) < needed) {
      if (++walked > s.gap_cap) {
        out.note = "gap cap exhausted after " + std::to_string(kept.size()) + " qualifying gaps";
        break;
      }
      if (have_prev && prev >= theta * *m)
        kept.push_back(GapComponent{*m, prev, GapComponent::Kind::Interior});
      prev = *m;
      have_prev = true;
      m = cursor.next();
    }
  } catch (const ResourceError& e) {
    out.note = e.what();
  }
  out.gaps_found = static_cast<std::int64_t>(kept.size());
  if (out.gaps_found < needed) {
    if (out.note.empty())
      out.note = "only " + std::to_string(kept.size()) + " qualifying gaps below h0 = " + h0.str();
    out.membership.failure = out.note;
    return out;
  }
  IntervalSequence cand{std::move(kept), 1};
  out.membership = interval_sequence_membership(cand, set, window, false, s);
  out.candidate = std::move(cand);
  return out;
}

UniversalSearch find_universal_candidate(const DistanceSet& set, TailWindow window,
                                         const Settings& s) {
  UniversalSearch out;
  out.theta = ExactScalar(2);
  {
    MemberCursor cursor(set, s);
    std::optional<ExactScalar> top = cursor.next_at_most(ExactScalar(1));
    if (!top) throw PreconditionError("universal candidate: no member at or below 1");
    out.h0 = *top;
  }
  for (long long theta : {2LL, 4LL, 16LL, 256LL}) {
    CandidateResult r = universal_candidate(set, out.h0, ExactScalar(theta), window, s);
    if (r.candidate && r.membership.ok) {
      out.candidate = std::move(r.candidate);
      out.theta = ExactScalar(theta);
      return out;
    }
    if (!out.note.empty()) out.note += "; ";
    out.note += "theta=" + std::to_string(theta) + ": " +
                (r.membership.failure.empty() ? r.note : r.membership.failure);
  }
  return out;
}

UniversalityCheck is_universal(const IntervalSequence& L,
                               const std::vector<IntervalSequence>& candidates,
                               TailWindow window) {
  window.validate();
  std::vector<ExactScalar> lefts;
  lefts.reserve(L.gaps.size());
  for (const auto& g : L.gaps) lefts.push_back(g.a);
  std::sort(lefts.begin(), lefts.end());
  UniversalityCheck out;
  for (size_t c = 0; c < candidates.size(); ++c) {
    const IntervalSequence& B = candidates[c];
    for (std::int64_t n = std::max(window.start, B.first_index);
         n <= std::min(window.end, B.last_index()); ++n) {
      if (!std::binary_search(lefts.begin(), lefts.end(), B.at(n).a)) {
        out.universal = false;
        out.exhibit = "candidate " + std::to_string(c) + " has left endpoint " + B.at(n).a.str() +
                      " at index " + std::to_string(n) + " outside L";
        return out;
      }
    }
  }
  return out;
}

LimitEstimate M_of_L(const IntervalSequence& L, TailWindow window, const Settings& s) {
  window.validate();
  const std::int64_t available = L.last_index() - 1;  // needs the gap below each index
  if (L.first_index > window.start || available < window.end) {
    LimitEstimate e;
    e.verdict = Verdict::Oscillates;
    e.window = window;
    e.note = "insufficient gap data for the window (have indices " +
             std::to_string(L.first_index) + ".." + std::to_string(L.last_index()) + ")";
    return e;
  }
  std::vector<ExactScalar> ratios;
  for (std::int64_t n = window.start; n <= available; ++n)
    ratios.push_back(L.at(n).a / L.at(n + 1).b);
  return limsup_stats_values(ratios, window, s);
}

// ---------------------------------------------------------------------------
// probe battery, C_E, csp verdict
// ---------------------------------------------------------------------------

std::vector<TauSeq> probe_battery(const DistanceSet& set, std::int64_t upto, const Settings& s) {
  (void)s;
  std::vector<TauSeq> probes;
  const auto& tails = set.tails;
  for (size_t i = 0; i < tails.size(); ++i) {
    std::string base = "tail[" + std::to_string(i) + "]";
    probes.push_back(TauSeq::from_spec(tails[i], upto, base));
    probes.push_back(
        TauSeq::from_spec(SequenceSpec::subsequence(1, 2, tails[i]), upto, base + ":odd"));
    probes.push_back(
        TauSeq::from_spec(SequenceSpec::subsequence(2, 2, tails[i]), upto, base + ":even"));
  }
  for (size_t i = 0; i < tails.size(); ++i) {
    for (size_t j = i + 1; j < tails.size(); ++j) {
      // sorted merge of two tails, deduplicated: the adversarial probe
      TauSeq merged;
      merged.label = "merge[" + std::to_string(i) + "," + std::to_string(j) + "]";
      std::vector<ExactScalar> a = tails[i].evaluate_range(1, upto);
      std::vector<ExactScalar> b = tails[j].evaluate_range(1, upto);
      size_t pa = 0, pb = 0;
      while (static_cast<std::int64_t>(merged.values.size()) < upto &&
             (pa < a.size() || pb < b.size())) {
        ExactScalar v;
        if (pa < a.size() && (pb >= b.size() || a[pa] >= b[pb]))
          v = a[pa++];
        else
          v = b[pb++];
        if (!merged.values.empty() && merged.values.back() == v) continue;
        merged.values.push_back(std::move(v));
      }
      probes.push_back(std::move(merged));
    }
  }
  return probes;
}

namespace {

ProbeResult run_probe(const DistanceSet& set, const TauSeq& tau, TailWindow window,
                      const Settings& s) {
  ProbeResult pr;
  pr.label = tau.label;
  WitnessSearchResult found = find_interval_sequence(set, tau, window, std::nullopt, s);
  pr.status = found.status;
  pr.c_estimate = found.c_estimate;
  pr.detail = found.reason;
  pr.diags = std::move(found.diags);
  return pr;
}

Json probe_to_json(const ProbeResult& p) {
  Json j{{"label", p.label}, {"status", to_string(p.status)}};
  if (p.c_estimate) {
    j["c_limsup"] = p.c_estimate->tail_max.str();
    if (p.c_estimate->converged()) j["c_value"] = p.c_estimate->value.str();
  }
  if (!p.detail.empty()) j["detail"] = p.detail;
  return j;
}

}  // namespace

Json CEReport::to_json() const {
  Json probes_json = Json::array();
  for (const auto& p : probes) probes_json.push_back(probe_to_json(p));
  Json j{{"verdict", to_string(c_e.verdict)},
         {"c_e", c_e.converged() ? c_e.value.str() : c_e.tail_max.str()},
         {"consistent_with_m", consistent_with_m},
         {"probes", probes_json}};
  if (m_estimate && m_estimate->converged()) j["m"] = m_estimate->value.str();
  return j;
}

CEReport C_E_estimate(const DistanceSet& set, const std::vector<SequenceSpec>& tau_family,
                      TailWindow window, const Settings& s) {
  window.validate();
  UniversalSearch search = find_universal_candidate(set, window, s);
  if (tau_family.empty() && !search.candidate)
    throw PreconditionError("C_E: empty tau family and no universal candidate");
  CEReport rep;
  if (search.candidate) rep.m_estimate = M_of_L(*search.candidate, window, s);

  std::vector<TauSeq> probes;
  for (const auto& spec : tau_family) probes.push_back(TauSeq::from_spec(spec, window.end + 2));
  if (probes.empty()) probes = probe_battery(set, window.end + 2, s);

  bool all_accepted = true;
  std::optional<LimitEstimate> best;
  for (const auto& tau : probes) {
    ProbeResult pr = run_probe(set, tau, window, s);
    if (pr.status != WitnessStatus::Accepted) {
      all_accepted = false;
      rep.c_e = LimitEstimate::diverged(window, s, "probe " + pr.label + ": " + pr.detail);
    } else if (!best || pr.c_estimate->tail_max > best->tail_max) {
      best = pr.c_estimate;
    }
    rep.probes.push_back(std::move(pr));
  }
  if (all_accepted && best) rep.c_e = *best;
  if (rep.m_estimate && rep.m_estimate->converged() && rep.c_e.converged())
    rep.consistent_with_m = abs_diff(rep.c_e.value, rep.m_estimate->value) <=
                            s.tol * max(ExactScalar(1), rep.m_estimate->value);
  return rep;
}

std::string to_string(CspKind k) {
  switch (k) {
    case CspKind::Csp: return "csp";
    case CspKind::NotCsp: return "not_csp";
    case CspKind::Vacuous: return "vacuous";
    case CspKind::Inconclusive: return "inconclusive";
  }
  return "?";
}

Json CspReport::to_json() const {
  Json probes_json = Json::array();
  for (const auto& p : probes) probes_json.push_back(probe_to_json(p));
  Json j{{"kind", to_string(kind)},
         {"porosity", Json{{"verdict", to_string(porosity.estimate.verdict)},
                           {"limsup", porosity.estimate.tail_max.str()},
                           {"liminf", porosity.estimate.tail_min.str()},
                           {"strongly_porous_certificate", porosity.porous_certificate}}},
         {"probes", probes_json},
         {"note", note}};
  if (m_estimate)
    j["m"] = Json{{"verdict", to_string(m_estimate->verdict)},
                  {"value", m_estimate->converged() ? m_estimate->value.str() : ""},
                  {"limsup", m_estimate->tail_max.str()}};
  if (universal) {
    j["theta"] = theta_used.str();
    j["h0"] = h0_used.str();
    Json sample = Json::array();
    for (std::int64_t n = universal->first_index;
         n <= std::min<std::int64_t>(universal->last_index(), universal->first_index + 7); ++n)
      sample.push_back(Json{{"a", universal->at(n).a.str()}, {"b", universal->at(n).b.str()}});
    j["universal_sample"] = sample;
  }
  if (refuting_probe) j["refuting_probe"] = *refuting_probe;
  if (c_e) j["c_e"] = c_e->converged() ? c_e->value.str() : c_e->tail_max.str();
  return j;
}

CspReport csp_verdict(const DistanceSet& set, TailWindow window, const Settings& s) {
  window.validate();
  CspReport rep;
  rep.theta_used = ExactScalar(0);
  rep.h0_used = ExactScalar(0);
  if (!set.zero_accumulation()) {
    rep.kind = CspKind::Vacuous;
    rep.porosity = porosity_report(set, std::nullopt, window, s);
    rep.note = "0 is isolated in E: the test family is empty and E is trivially in the class";
    return rep;
  }
  rep.porosity = porosity_report(set, std::nullopt, window, s);
  if (!rep.porosity.porous_certificate) {
    rep.kind = CspKind::NotCsp;
    rep.refuting_probe = "porosity";
    rep.note = "no strong-porosity certificate: gap-to-h deficit stays at " +
               rep.porosity.deficit_deep.str() + " on the deep half window";
    return rep;
  }
  UniversalSearch search = find_universal_candidate(set, window, s);
  if (!search.candidate) {
    rep.kind = CspKind::Inconclusive;
    rep.note = "strongly porous at window scale, but no universal candidate: " + search.note;
    return rep;
  }
  rep.universal = search.candidate;
  rep.theta_used = search.theta;
  rep.h0_used = search.h0;
  LimitEstimate m = M_of_L(*search.candidate, window, s);
  rep.m_estimate = m;
  if (!m.converged()) {
    rep.kind = CspKind::Inconclusive;
    rep.note =
        "universal candidate's gap ratio limsup did not stabilize (" + to_string(m.verdict) + ")";
    return rep;
  }
  std::vector<TauSeq> probes = probe_battery(set, window.end + 2, s);
  std::optional<size_t> refuted, no_witness;
  std::optional<LimitEstimate> best_c;
  for (const auto& tau : probes) {
    ProbeResult pr = run_probe(set, tau, window, s);
    if (pr.status == WitnessStatus::RefutedUnbounded && !refuted) refuted = rep.probes.size();
    if (pr.status == WitnessStatus::NoWitness && !no_witness) no_witness = rep.probes.size();
    if (pr.status == WitnessStatus::Accepted &&
        (!best_c || pr.c_estimate->tail_max > best_c->tail_max))
      best_c = pr.c_estimate;
    rep.probes.push_back(std::move(pr));
  }
  if (refuted) {
    rep.kind = CspKind::NotCsp;
    rep.refuting_probe = rep.probes[*refuted].label;
    rep.note = "probe " + rep.probes[*refuted].label + ": " + rep.probes[*refuted].detail;
    return rep;
  }
  if (no_witness) {
    rep.kind = CspKind::Inconclusive;
    rep.note = "probe " + rep.probes[*no_witness].label +
               " found no witness: " + rep.probes[*no_witness].detail;
    return rep;
  }
  rep.c_e = best_c;
  if (best_c && best_c->converged() &&
      abs_diff(best_c->value, m.value) > s.tol * max(ExactScalar(1), m.value)) {
    rep.kind = CspKind::Inconclusive;
    rep.note = "battery C_E = " + best_c->value.str() + " disagrees with M = " + m.value.str();
    return rep;
  }
  rep.kind = CspKind::Csp;
  rep.note = "universal candidate with stabilized M and a fully accepted probe battery";
  return rep;
}

// ---------------------------------------------------------------------------
// normal scaling sequences
// ---------------------------------------------------------------------------

std::optional<ExactScalar> nearest_member(const DistanceSet& set, const ExactScalar& v,
                                          const Settings& s) {
  if (v.is_zero()) throw ConfigError("nearest_member: v must be positive");
  std::optional<ExactScalar> best;
  auto ratio_dist = [&](const ExactScalar& m) { return max(m / v, v / m); };
  auto consider = [&](const ExactScalar& m) {
    if (m.is_zero()) return;
    if (!best || ratio_dist(m) < ratio_dist(*best)) best = m;
  };
  for (const auto& f : set.finite_part) consider(f);
  for (const auto& tail : set.tails) {
    ExactScalar first = tail.evaluate(1);
    if (first <= v) {
      consider(first);
      continue;
    }
    std::int64_t lo = 1, hi = 1;
    bool found = true;
    while (tail.evaluate(hi) > v) {
      lo = hi;
      if (hi >= s.member_cap) {
        found = false;
        break;
      }
      hi = std::min(hi * 2, s.member_cap);
    }
    if (!found) {
      consider(tail.evaluate(s.member_cap));
      continue;
    }
    while (lo + 1 < hi) {
      std::int64_t mid = lo + (hi - lo) / 2;
      (tail.evaluate(mid) > v ? lo : hi) = mid;
    }
    consider(tail.evaluate(hi));
    if (hi > 1) consider(tail.evaluate(hi - 1));
  }
  return best;
}

Json NormalityReport::to_json() const {
  Json j{{"normal", normal}, {"reason", reason}};
  if (ratio_stats)
    j["ratio"] = Json{{"verdict", to_string(ratio_stats->verdict)},
                      {"value", ratio_stats->converged() ? ratio_stats->value.str() : ""}};
  return j;
}

NormalityReport is_normal_scaling(const DistanceSet& set, const SequenceSpec& r, TailWindow window,
                                  const Settings& s) {
  window.validate();
  NormalityReport rep;
  auto from = certify_eventually_decreasing(r, window);
  if (!from || *from > window.start) {
    rep.reason = "scaling sequence is not eventually decreasing by the window start";
    return rep;
  }
  std::vector<ExactScalar> rv = r.evaluate_range(1, window.end);
  std::vector<ExactScalar> ratios;
  for (std::int64_t n = window.start; n <= window.end; ++n) {
    const ExactScalar& rn = rv[static_cast<size_t>(n - 1)];
    if (rn.is_zero()) {
      rep.reason = "scaling sequence vanishes at n=" + std::to_string(n);
      return rep;
    }
    std::optional<ExactScalar> m = nearest_member(set, rn, s);
    if (!m) {
      rep.reason = "E has no members to track the scaling sequence";
      return rep;
    }
    rep.witness.push_back(*m);
    ratios.push_back(*m / rn);
  }
  std::int64_t bad = last_violation(
      rep.witness, [](const ExactScalar& x, const ExactScalar& y) { return y <= x; });
  if (bad > 0) {
    rep.reason = "nearest-member witness is not nonincreasing across the window";
    return rep;
  }
  LimitEstimate stats = tail_stats_values(ratios, window, s);
  rep.ratio_stats = stats;
  if (!stats.converged() || abs_diff(stats.value, ExactScalar(1)) > s.tol) {
    rep.reason = "nearest-member ratio does not converge to 1 (verdict " +
                 to_string(stats.verdict) +
                 (stats.converged() ? ", value " + stats.value.str() : "") + ")";
    return rep;
  }
  rep.normal = true;
  rep.reason = "eventually decreasing with a member sequence tracking it at ratio 1";
  return rep;
}

}  // namespace portan
