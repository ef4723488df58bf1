#pragma once

#include "portan/derivative.hpp"

namespace portan {

// Parsed analysis configuration. All rationals parse exactly from "p/q",
// integers, decimal strings, or {num, den} objects.
struct AnalysisConfig {
  DistanceSet set;
  TailWindow window{32, 256};
  Settings settings;
  std::vector<std::string> analyses;
  std::optional<ExactScalar> gaps_h;    // upper bound for the gaps table
  ExactScalar gaps_eps = ExactScalar(0);
  std::int64_t gaps_rows = 64;
  std::vector<ExactScalar> self_similarity_samples;
  int threads = 1;
  Json raw;  // canonical form, hashed for provenance

  static AnalysisConfig from_json(const Json& j);
};

extern const std::vector<std::string> kKnownAnalyses;

struct Report {
  Json document;
  std::string csv;
  bool all_conclusive = true;

  int exit_code() const { return all_conclusive ? 0 : 2; }
};

// Runs the requested analyses (concurrently when cfg.threads > 1; assembly
// order is fixed, so reports are byte-stable for identical configs).
Report run_analyses(const AnalysisConfig& cfg);

// Consolidated equality table: uniform boundedness vs the porosity class,
// boundedness vs discreteness with the product check, and the derivative
// local-constancy bound with its sharpness witness.
Json theorems_table(const DistanceSet& set, TailWindow window,
                    const Settings& s = default_settings(), bool* conclusive = nullptr);

// FNV-1a over the canonical config dump.
std::string config_hash(const Json& canonical);

}  // namespace portan
