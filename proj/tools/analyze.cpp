// analyze: batch front door over distance-set configs. Reads a JSON config,
// runs the requested analyses, and writes report.json / report.csv.
#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "portan/report.hpp"

namespace {

int parse_threads_env() {
  const char* env = std::getenv("ANALYZE_THREADS");
  if (!env || !*env) return 1;
  char* end = nullptr;
  long v = std::strtol(env, &end, 10);
  if (!end || *end != '\0' || v < 1)
    throw portan::ConfigError("ANALYZE_THREADS must be an integer >= 1, got '" +
                              std::string(env) + "'");
  return static_cast<int>(v);
}

std::pair<std::int64_t, std::int64_t> parse_window(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos)
    throw portan::ConfigError("--window expects N0:N, got '" + text + "'");
  return {std::stoll(text.substr(0, colon)), std::stoll(text.substr(colon + 1))};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact porosity and pretangent-space analysis on the half-line"};
  std::string config_path;
  std::string window_text;
  std::string tol_text;
  std::string out_dir = ".";
  std::int64_t cap = 0;
  bool timings = false;
  std::vector<std::string> analyses;
  app.add_option("--config", config_path, "path to the analysis config (JSON)")->required();
  app.add_option("--window", window_text, "tail window as N0:N");
  app.add_option("--tol", tol_text, "convergence tolerance (rational, e.g. 2^-20 or 1/1048576)");
  app.add_option("--cap", cap, "member and gap enumeration cap");
  app.add_option("--out", out_dir, "directory for report.json and report.csv");
  app.add_flag("--timings", timings, "include wall time in report.json (breaks byte stability)");
  app.add_option("analyses", analyses,
                 "analyses to run: gaps porosity csp pretangent theorems derivative-audit");
  CLI11_PARSE(app, argc, argv);

  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot read config '" << config_path << "'\n";
      return 1;
    }
    portan::Json raw = portan::Json::parse(in, nullptr, true);
    portan::AnalysisConfig cfg = portan::AnalysisConfig::from_json(raw);
    if (!analyses.empty()) cfg.analyses = analyses;
    if (!window_text.empty()) {
      auto [s, e] = parse_window(window_text);
      cfg.window = portan::TailWindow{s, e};
      cfg.window.validate();
    }
    if (!tol_text.empty()) cfg.settings.tol = portan::ExactScalar::parse(tol_text);
    if (cap > 0) {
      cfg.settings.member_cap = cap;
      cfg.settings.gap_cap = cap;
    }
    cfg.threads = parse_threads_env();

    portan::Report rep = portan::run_analyses(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(t1 - t0).count();
    if (timings) rep.document["wall_time_ms"] = ms;

    std::ofstream json_out(out_dir + "/report.json");
    json_out << rep.document.dump(2) << "\n";
    std::ofstream csv_out(out_dir + "/report.csv");
    csv_out << rep.csv;
    if (!json_out || !csv_out) {
      std::cerr << "error: cannot write reports into '" << out_dir << "'\n";
      return 1;
    }
    std::cerr << "analyze: " << (rep.all_conclusive ? "all conclusive" : "some inconclusive")
              << " in " << ms << " ms; reports in " << out_dir << "\n";
    return rep.exit_code();
  } catch (const portan::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
