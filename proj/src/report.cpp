#include "portan/report.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <future>

namespace portan {

const std::vector<std::string> kKnownAnalyses = {"gaps",       "porosity", "csp",
                                                 "pretangent", "theorems", "derivative-audit"};

namespace {

ExactScalar field_rational(const Json& j, const std::string& key, const std::string& path) {
  try {
    return rational_from_json(j.at(key));
  } catch (const std::exception& e) {
    throw ConfigError("config field '" + path + "': " + e.what());
  }
}

std::string csv_number(const ExactScalar& v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v.to_double());
  return buf;
}

std::string csv_row(const std::string& analysis, std::int64_t n, const std::string& value,
                    const std::string& ratio, const std::string& verdict) {
  return analysis + "," + std::to_string(n) + "," + value + "," + ratio + "," + verdict + "\n";
}

Json estimate_json(const LimitEstimate& e) {
  Json j{{"verdict", to_string(e.verdict)},
         {"tail_min", e.tail_min.str()},
         {"tail_max", e.tail_max.str()},
         {"window", Json{{"start", e.window.start}, {"end", e.window.end}}}};
  if (e.converged()) j["value"] = e.value.str();
  if (!e.note.empty()) j["note"] = e.note;
  return j;
}

struct AnalysisOutput {
  Json json;
  std::string csv;
  bool conclusive = true;
};

AnalysisOutput run_gaps(const AnalysisConfig& cfg) {
  AnalysisOutput out;
  ExactScalar h = cfg.gaps_h.value_or(ExactScalar(0));
  if (!cfg.gaps_h) {
    auto m = cfg.set.max_member();
    h = m ? min(*m, ExactScalar(1)) : ExactScalar(1);
  }
  GapList gl = gap_components(cfg.set, h, cfg.gaps_eps, cfg.gaps_rows, cfg.settings);
  Json rows = Json::array();
  std::int64_t n = 0;
  for (const auto& g : gl.gaps) {
    ++n;
    ExactScalar rel = g.length() / g.b;
    rows.push_back(Json{{"n", n},
                        {"a", g.a.str()},
                        {"b", g.b.str()},
                        {"length", g.length().str()},
                        {"relative_length", rel.str()},
                        {"kind", to_string(g.kind)}});
    out.csv += csv_row("gaps", n, csv_number(g.a), csv_number(rel), to_string(g.kind));
  }
  out.json = Json{{"h", h.str()},
                  {"eps", cfg.gaps_eps.str()},
                  {"complete", gl.complete},
                  {"note", gl.note},
                  {"lambda", lambda(cfg.set, h, cfg.settings).str()},
                  {"components", rows}};
  return out;
}

AnalysisOutput run_porosity(const AnalysisConfig& cfg) {
  AnalysisOutput out;
  PorosityReport rep = porosity_report(cfg.set, std::nullopt, cfg.window, cfg.settings);
  out.json = Json{{"estimate", estimate_json(rep.estimate)},
                  {"strongly_porous_certificate", rep.porous_certificate},
                  {"deficit_shallow", rep.deficit_shallow.str()},
                  {"deficit_deep", rep.deficit_deep.str()},
                  {"grid_size", rep.grid_size}};
  std::int64_t n = cfg.window.start;
  for (const auto& [anchor, ratio] : rep.samples) {
    out.csv += csv_row("porosity", n, csv_number(anchor), csv_number(ratio),
                       to_string(rep.estimate.verdict));
    ++n;
  }
  out.conclusive = rep.estimate.verdict != Verdict::Oscillates || rep.porous_certificate ||
                   rep.estimate.tail_max <= ExactScalar(1) - ExactScalar::pow2(-5);
  return out;
}

AnalysisOutput run_csp(const AnalysisConfig& cfg) {
  AnalysisOutput out;
  CspReport rep = csp_verdict(cfg.set, cfg.window, cfg.settings);
  out.json = rep.to_json();
  out.conclusive = rep.kind != CspKind::Inconclusive;
  if (rep.universal) {
    std::int64_t shown = 0;
    for (std::int64_t n = rep.universal->first_index;
         n + 1 <= rep.universal->last_index() && shown < 64; ++n, ++shown) {
      ExactScalar ratio = rep.universal->at(n).a / rep.universal->at(n + 1).b;
      out.csv += csv_row("csp", n, csv_number(rep.universal->at(n).a), csv_number(ratio),
                         "candidate");
    }
  }
  for (const auto& p : rep.probes) {
    out.csv += csv_row("csp:" + p.label, 0,
                       p.c_estimate ? csv_number(p.c_estimate->tail_max) : "", "",
                       to_string(p.status));
  }
  return out;
}

AnalysisOutput run_pretangent(const AnalysisConfig& cfg) {
  AnalysisOutput out;
  PointedSpaceSpec space = PointedSpaceSpec::line_set(cfg.set);
  Json j;
  if (!cfg.set.zero_accumulation()) {
    j["note"] = "0 is isolated: every pretangent space is the singleton marked class";
    out.json = std::move(j);
    return out;
  }
  // unbounded demonstration: scaling d(x_n, 0)/t puts a class at distance exactly t
  {
    const ExactScalar t(2);
    SequenceSpec tail = cfg.set.tails.front();
    ScalingSequence r = ScalingSequence::make(SequenceSpec::scaled(t.reciprocal(), tail),
                                              cfg.window, cfg.settings);
    BuildResult br = build_pretangent(
        space, {PointSequence::from_spec(tail, cfg.window.end, "x")}, r, cfg.window, cfg.settings);
    if (br.built()) {
      j["unbounded_demo"] = Json{{"t", t.str()},
                                 {"distance", rho_star(*br.space).str()},
                                 {"space", br.space->to_json()}};
    }
  }
  CspReport csp = csp_verdict(cfg.set, cfg.window, cfg.settings);
  j["csp"] = to_string(csp.kind);
  if (csp.kind == CspKind::Csp) {
    ExtremalConstruction bounded =
        extremal_normal_scaling(cfg.set, csp, cfg.window, cfg.settings);
    BuildResult br = build_pretangent(space, {bounded.t_seed, bounded.s_witness}, bounded.scaling,
                                      bounded.build_window, cfg.settings);
    if (br.built()) {
      j["extremal"] = br.space->to_json();
      int cls = 0;
      for (size_t c = 0; c < br.space->classes.size(); ++c) {
        out.csv += csv_row("pretangent", cls++,
                           csv_number(br.space->dist[static_cast<size_t>(br.space->marked)][c].rep()),
                           "", static_cast<int>(c) == br.space->marked ? "marked" : "class");
      }
    } else {
      j["extremal_note"] = br.offending;
      out.conclusive = false;
    }
  } else if (csp.kind == CspKind::Inconclusive) {
    out.conclusive = false;
    j["note"] = csp.note;
  }
  out.json = std::move(j);
  return out;
}

AnalysisOutput run_theorems(const AnalysisConfig& cfg) {
  AnalysisOutput out;
  bool conclusive = true;
  out.json = theorems_table(cfg.set, cfg.window, cfg.settings, &conclusive);
  out.conclusive = conclusive;
  std::int64_t n = 0;
  for (const auto& row : out.json.at("rows"))
    out.csv += csv_row("theorems", ++n, row.at("check").get<std::string>(), "",
                       row.at("verdict").get<std::string>());
  return out;
}

AnalysisOutput run_derivative_audit(const AnalysisConfig& cfg) {
  AnalysisOutput out;
  PointedSpaceSpec space = PointedSpaceSpec::line_set(cfg.set);
  Prop54Report rep = derivative_bound_audit(space, cfg.window, cfg.settings);
  out.json = rep.to_json();
  out.conclusive = rep.all_ok;
  std::int64_t n = 0;
  for (const auto& a : rep.audits)
    out.csv += csv_row("derivative-audit", ++n, a.map + "@" + a.space,
                       a.c_alpha.is_finite() ? csv_number(a.c_alpha.value()) : "inf",
                       a.ok ? "pass" : "fail");
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// theorems table
// ---------------------------------------------------------------------------

Json theorems_table(const DistanceSet& set, TailWindow window, const Settings& s,
                    bool* conclusive) {
  Json rows = Json::array();
  bool ok = true;
  auto push = [&rows](const std::string& check, const std::string& lhs, const std::string& rhs,
                      const std::string& tolerance, const std::string& verdict) {
    rows.push_back(Json{{"check", check},
                        {"lhs", lhs},
                        {"rhs", rhs},
                        {"tolerance", tolerance},
                        {"verdict", verdict}});
  };
  PointedSpaceSpec space = PointedSpaceSpec::line_set(set);
  BoundednessAudit audit = boundedness_audit(space, window, s);
  const std::string tol_str = s.audit_tol.str();

  // uniform boundedness happens exactly on the porosity class
  {
    std::string lhs = "R* " + to_string(audit.r_star.verdict);
    std::string rhs = "class verdict " + to_string(audit.kind);
    bool pass = (audit.kind == CspKind::Csp && audit.r_star.converged()) ||
                (audit.kind == CspKind::NotCsp && audit.r_star.verdict == Verdict::Diverges) ||
                audit.kind == CspKind::Vacuous;
    if (audit.kind == CspKind::Inconclusive) {
      push("bounded_iff_porosity_class", lhs, rhs, "-", "inconclusive");
      ok = false;
    } else {
      push("bounded_iff_porosity_class", lhs, rhs, "-", pass ? "pass" : "fail");
      ok = ok && pass;
    }
  }
  if (audit.kind == CspKind::Csp) {
    // R* equals M, read off the extremal space
    {
      bool pass = audit.extremal_rho_star &&
                  abs_diff(*audit.extremal_rho_star, audit.r_star.value) <=
                      s.audit_tol * max(ExactScalar(1), audit.r_star.value);
      push("r_star_equals_m", audit.extremal_rho_star ? audit.extremal_rho_star->str() : "-",
           audit.r_star.converged() ? audit.r_star.value.str() : "-", tol_str,
           pass ? "pass" : "fail");
      ok = ok && pass;
    }
    // discreteness is the reciprocal of boundedness
    {
      bool pass = audit.extremal_rho_lower && audit.extremal_rho_lower->is_finite() &&
                  audit.r_lower.converged() &&
                  abs_diff(audit.extremal_rho_lower->value(), audit.r_lower.value) <=
                      s.audit_tol * max(ExactScalar(1), audit.r_lower.value);
      push("r_lower_equals_reciprocal_m",
           audit.extremal_rho_lower ? audit.extremal_rho_lower->str() : "-",
           audit.r_lower.converged() ? audit.r_lower.value.str() : "-", tol_str,
           pass ? "pass" : "fail");
      ok = ok && pass;
    }
    // product check on the independently built extremal spaces
    {
      bool pass = false;
      std::string lhs = "-";
      if (audit.extremal_rho_star && audit.extremal_rho_lower &&
          audit.extremal_rho_lower->is_finite()) {
        ExactScalar product = *audit.extremal_rho_star * audit.extremal_rho_lower->value();
        lhs = product.str();
        pass = abs_diff(product, ExactScalar(1)) <= s.audit_tol;
      }
      push("bounded_discrete_product", lhs, "1", tol_str, pass ? "pass" : "fail");
      ok = ok && pass;
    }
    // derivative local-constancy bound and its sharpness
    {
      Prop54Report d = derivative_bound_audit(space, window, s);
      push("derivative_constancy_bound", d.all_ok ? "all maps clear 1/M" : "a map dips below",
           d.bound.str(), tol_str, d.all_ok ? "pass" : "fail");
      push("derivative_bound_sharp", d.sharpness.c_alpha_identity.str(), d.bound.str(), tol_str,
           d.sharpness.achieved ? "pass" : "fail");
      ok = ok && d.all_ok && d.sharpness.achieved;
    }
  } else if (audit.kind == CspKind::NotCsp) {
    bool pass = audit.r_star.verdict == Verdict::Diverges && audit.r_lower.converged() &&
                audit.r_lower.value.is_zero();
    push("unbounded_and_not_discrete", "R* " + to_string(audit.r_star.verdict),
         "R_* " + (audit.r_lower.converged() ? audit.r_lower.value.str() : "-"), "-",
         pass ? "pass" : "fail");
    push("derivative_constancy_bound", "-", "-", "-", "not_applicable");
    ok = ok && pass;
  }
  if (conclusive) *conclusive = ok && audit.kind != CspKind::Inconclusive;
  return Json{{"kind", to_string(audit.kind)}, {"rows", rows}, {"audit", audit.to_json()}};
}

// ---------------------------------------------------------------------------
// config and orchestration
// ---------------------------------------------------------------------------

AnalysisConfig AnalysisConfig::from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: expected a JSON object");
  AnalysisConfig cfg;
  cfg.raw = j;
  if (!j.contains("set")) throw ConfigError("config field 'set': missing (a distance set object)");
  if (j.contains("window")) {
    const Json& w = j.at("window");
    if (!w.is_object() || !w.contains("start") || !w.contains("end"))
      throw ConfigError("config field 'window': expected {start, end}");
    cfg.window = TailWindow{w.at("start").get<std::int64_t>(), w.at("end").get<std::int64_t>()};
  }
  try {
    cfg.window.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config field 'window': ") + e.what());
  }
  if (j.contains("tolerance")) cfg.settings.tol = field_rational(j, "tolerance", "tolerance");
  if (j.contains("audit_tolerance"))
    cfg.settings.audit_tol = field_rational(j, "audit_tolerance", "audit_tolerance");
  if (j.contains("caps")) {
    const Json& caps = j.at("caps");
    if (caps.contains("members")) cfg.settings.member_cap = caps.at("members").get<std::int64_t>();
    if (caps.contains("gaps")) cfg.settings.gap_cap = caps.at("gaps").get<std::int64_t>();
    if (caps.contains("search"))
      cfg.settings.witness_search_cap = field_rational(caps, "search", "caps.search");
  }
  try {
    cfg.set = DistanceSet::from_json(j.at("set"), cfg.window, cfg.settings);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("config field 'set': ") + e.what());
  } catch (const ValidationError& e) {
    throw ConfigError(std::string("config field 'set': ") + e.what());
  }
  if (j.contains("analyses")) {
    for (const auto& a : j.at("analyses")) cfg.analyses.push_back(a.get<std::string>());
  }
  if (j.contains("gaps")) {
    const Json& g = j.at("gaps");
    if (g.contains("h")) cfg.gaps_h = field_rational(g, "h", "gaps.h");
    if (g.contains("eps")) cfg.gaps_eps = field_rational(g, "eps", "gaps.eps");
    if (g.contains("rows")) cfg.gaps_rows = g.at("rows").get<std::int64_t>();
  }
  if (j.contains("self_similarity_samples"))
    for (const auto& t : j.at("self_similarity_samples"))
      cfg.self_similarity_samples.push_back(rational_from_json(t));
  for (const auto& a : cfg.analyses)
    if (std::find(kKnownAnalyses.begin(), kKnownAnalyses.end(), a) == kKnownAnalyses.end())
      throw ConfigError("config field 'analyses': unknown analysis '" + a + "'");
  return cfg;
}

std::string config_hash(const Json& canonical) {
  const std::string dump = canonical.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

Report run_analyses(const AnalysisConfig& cfg) {
  if (cfg.analyses.empty())
    throw ConfigError("no analyses requested (choose from gaps, porosity, csp, pretangent, "
                      "theorems, derivative-audit)");
  Report rep;
  auto dispatch = [&cfg](const std::string& name) -> AnalysisOutput {
    if (name == "gaps") return run_gaps(cfg);
    if (name == "porosity") return run_porosity(cfg);
    if (name == "csp") return run_csp(cfg);
    if (name == "pretangent") return run_pretangent(cfg);
    if (name == "theorems") return run_theorems(cfg);
    if (name == "derivative-audit") return run_derivative_audit(cfg);
    throw ConfigError("unknown analysis '" + name + "'");
  };
  std::vector<AnalysisOutput> outputs(cfg.analyses.size());
  if (cfg.threads > 1) {
    std::vector<std::future<AnalysisOutput>> futures;
    futures.reserve(cfg.analyses.size());
    for (const auto& name : cfg.analyses)
      futures.push_back(std::async(std::launch::async, dispatch, name));
    for (size_t i = 0; i < futures.size(); ++i) outputs[i] = futures[i].get();
  } else {
    for (size_t i = 0; i < cfg.analyses.size(); ++i) outputs[i] = dispatch(cfg.analyses[i]);
  }
  Json analyses = Json::object();
  rep.csv = "analysis,n,value,ratio,verdict\n";
  for (size_t i = 0; i < outputs.size(); ++i) {
    analyses[cfg.analyses[i]] = std::move(outputs[i].json);
    rep.csv += outputs[i].csv;
    rep.all_conclusive = rep.all_conclusive && outputs[i].conclusive;
  }
  rep.document = Json{{"tool", "portan"},
                      {"version", "0.1.0"},
                      {"config_hash", config_hash(cfg.raw)},
                      {"window", Json{{"start", cfg.window.start}, {"end", cfg.window.end}}},
                      {"conclusive", rep.all_conclusive},
                      {"analyses", std::move(analyses)}};
  return rep;
}

}  // namespace portan
