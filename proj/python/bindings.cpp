#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "portan/report.hpp"

namespace py = pybind11;
using namespace portan;

namespace {

TailWindow window_of(std::int64_t start, std::int64_t end) {
  TailWindow w{start, end};
  w.validate();
  return w;
}

DistanceSet set_of(const std::string& set_json) {
  return DistanceSet::from_json(Json::parse(set_json));
}

std::string evaluate_spec(const std::string& spec_json, std::int64_t n) {
  return SequenceSpec::from_json(Json::parse(spec_json)).evaluate(n).str();
}

std::string spec_tail_stats(const std::string& spec_json, std::int64_t start, std::int64_t end) {
  SequenceSpec spec = SequenceSpec::from_json(Json::parse(spec_json));
  TailWindow w = window_of(start, end);
  LimitEstimate e = tail_stats([&](std::int64_t n) { return spec.evaluate(n); }, w);
  Json j{{"verdict", to_string(e.verdict)},
         {"tail_min", e.tail_min.str()},
         {"tail_max", e.tail_max.str()}};
  if (e.converged()) j["value"] = e.value.str();
  return j.dump();
}

std::string lambda_of(const std::string& set_json, const std::string& h) {
  return lambda(set_of(set_json), ExactScalar::parse(h)).str();
}

std::string gaps_of(const std::string& set_json, const std::string& h, const std::string& eps,
                    std::int64_t cap) {
  GapList gl = gap_components(set_of(set_json), ExactScalar::parse(h), ExactScalar::parse(eps),
                              cap > 0 ? std::optional<std::int64_t>(cap) : std::nullopt);
  Json arr = Json::array();
  for (const auto& g : gl.gaps)
    arr.push_back(Json{{"a", g.a.str()}, {"b", g.b.str()}, {"kind", to_string(g.kind)}});
  return Json{{"gaps", arr}, {"complete", gl.complete}, {"note", gl.note}}.dump();
}

std::string porosity_of(const std::string& set_json, std::int64_t start, std::int64_t end) {
  PorosityReport rep = porosity_report(set_of(set_json), std::nullopt, window_of(start, end));
  Json j{{"verdict", to_string(rep.estimate.verdict)},
         {"limsup", rep.estimate.tail_max.str()},
         {"liminf", rep.estimate.tail_min.str()},
         {"strongly_porous_certificate", rep.porous_certificate}};
  if (rep.estimate.converged()) j["value"] = rep.estimate.value.str();
  return j.dump();
}

std::string csp_of(const std::string& set_json, std::int64_t start, std::int64_t end) {
  return csp_verdict(set_of(set_json), window_of(start, end)).to_json().dump();
}

std::string boundedness_of(const std::string& set_json, std::int64_t start, std::int64_t end) {
  PointedSpaceSpec space = PointedSpaceSpec::line_set(set_of(set_json));
  return boundedness_audit(space, window_of(start, end)).to_json().dump();
}

std::string derivative_audit_of(const std::string& set_json, std::int64_t start,
                                std::int64_t end) {
  PointedSpaceSpec space = PointedSpaceSpec::line_set(set_of(set_json));
  return derivative_bound_audit(space, window_of(start, end)).to_json().dump();
}

std::string equivalence_of(const std::string& a_json, const std::string& g_json,
                           std::int64_t start, std::int64_t end) {
  SequenceSpec a = SequenceSpec::from_json(Json::parse(a_json));
  SequenceSpec g = SequenceSpec::from_json(Json::parse(g_json));
  EquivalenceResult r = asymp_equivalent(a, g, window_of(start, end));
  Json j{{"equivalent", r.equivalent()}, {"detail", r.detail}};
  if (r.certificate) j["certificate"] = r.certificate->to_json();
  return j.dump();
}

std::string analyze_config(const std::string& config_json) {
  AnalysisConfig cfg = AnalysisConfig::from_json(Json::parse(config_json));
  Report rep = run_analyses(cfg);
  return rep.document.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "exact porosity and pretangent-space analysis (JSON-string surface)";
  m.attr("__version__") = "0.1.0";
  m.def("evaluate", &evaluate_spec, py::arg("spec_json"), py::arg("n"),
        "exact n-th term of a sequence spec, as a rational string");
  m.def("tail_stats", &spec_tail_stats, py::arg("spec_json"), py::arg("start"), py::arg("end"));
  m.def("lambda_of", &lambda_of, py::arg("set_json"), py::arg("h"),
        "largest E-free open subinterval length of (0, h)");
  m.def("gap_components", &gaps_of, py::arg("set_json"), py::arg("h"), py::arg("eps"),
        py::arg("cap") = 0);
  m.def("porosity_upper", &porosity_of, py::arg("set_json"), py::arg("start") = 32,
        py::arg("end") = 256);
  m.def("csp_verdict", &csp_of, py::arg("set_json"), py::arg("start") = 32, py::arg("end") = 256);
  m.def("boundedness_audit", &boundedness_of, py::arg("set_json"), py::arg("start") = 32,
        py::arg("end") = 256);
  m.def("derivative_bound_audit", &derivative_audit_of, py::arg("set_json"), py::arg("start") = 32,
        py::arg("end") = 256);
  m.def("asymp_equivalent", &equivalence_of, py::arg("a_json"), py::arg("gamma_json"),
        py::arg("start") = 32, py::arg("end") = 256);
  m.def("analyze", &analyze_config, py::arg("config_json"),
        "run a full analysis config; returns the report document as JSON");

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<PreconditionError>(m, "PreconditionError");
  py::register_exception<ValidationError>(m, "SpecValidationError");
  py::register_exception<ResourceError>(m, "ResourceError");
}
