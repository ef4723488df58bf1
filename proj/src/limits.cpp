#include "portan/limits.hpp"

#include <algorithm>

namespace portan {

void TailWindow::validate() const {
  if (start < 1 || start >= end)
    throw ConfigError("TailWindow: need 1 <= start < end, got [" + std::to_string(start) + ", " +
                      std::to_string(end) + "]");
}

const Settings& default_settings() {
  static const Settings s{};
  return s;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Converges: return "converges";
    case Verdict::Diverges: return "diverges";
    case Verdict::Oscillates: return "oscillates";
  }
  return "?";
}

LimitEstimate LimitEstimate::diverged(TailWindow w, const Settings& s, std::string note) {
  LimitEstimate e;
  e.verdict = Verdict::Diverges;
  e.tail_min = s.divergence_cap + ExactScalar(1);
  e.tail_max = e.tail_min;
  e.window = w;
  e.note = std::move(note);
  return e;
}

LimitEstimate LimitEstimate::converged_exact(ExactScalar v, TailWindow w, std::string note) {
  LimitEstimate e;
  e.verdict = Verdict::Converges;
  e.value = v;
  e.tail_min = v;
  e.tail_max = std::move(v);
  e.window = w;
  e.note = std::move(note);
  return e;
}

LimitEstimate tail_stats_values(const std::vector<ExactScalar>& values, TailWindow window,
                                const Settings& s) {
  window.validate();
  if (values.size() != static_cast<size_t>(window.length()))
    throw ConfigError("tail_stats: value count does not match window length");
  LimitEstimate e;
  e.window = window;
  e.tail_min = values.front();
  e.tail_max = values.front();
  for (const auto& v : values) {
    if (v < e.tail_min) e.tail_min = v;
    if (v > e.tail_max) e.tail_max = v;
  }
  ExactScalar band = e.tail_max - e.tail_min;
  if (band <= s.tol * max(ExactScalar(1), e.tail_max)) {
    e.verdict = Verdict::Converges;
    e.value = simplest_in_interval(e.tail_min, e.tail_max);
  } else if (e.tail_min > s.divergence_cap) {
    e.verdict = Verdict::Diverges;
  } else {
    e.verdict = Verdict::Oscillates;
  }
  return e;
}

LimitEstimate tail_stats(const TermFn& seq, TailWindow window, const Settings& s) {
  window.validate();
  std::vector<ExactScalar> values;
  values.reserve(static_cast<size_t>(window.length()));
  for (std::int64_t n = window.start; n <= window.end; ++n) values.push_back(seq(n));
  return tail_stats_values(values, window, s);
}

LimitEstimate limsup_stats_values(const std::vector<ExactScalar>& values, TailWindow window,
                                  const Settings& s) {
  window.validate();
  // entries past window.end serve as lookahead so the suffix sup near the
  // window edge is not an artifact of where the window was cut
  if (values.size() < static_cast<size_t>(window.length()))
    throw ConfigError("limsup_stats: need at least window-length values");
  std::vector<ExactScalar> suffix(values.size());
  ExactScalar running = values.back();
  for (size_t i = values.size(); i-- > 0;) {
    running = max(running, values[i]);
    suffix[i] = running;
  }
  suffix.resize(static_cast<size_t>(window.length()));
  return tail_stats_values(suffix, window, s);
}

namespace {

// max over [0, half) and [half, size)
std::pair<ExactScalar, ExactScalar> half_maxima(const std::vector<ExactScalar>& values) {
  size_t half = values.size() / 2;
  ExactScalar shallow = values.front();
  ExactScalar deep = values[half];
  for (size_t i = 0; i < half; ++i) shallow = max(shallow, values[i]);
  for (size_t i = half; i < values.size(); ++i) deep = max(deep, values[i]);
  return {shallow, deep};
}

}  // namespace

bool growth_trend(const std::vector<ExactScalar>& values) {
  if (values.size() < 4) return false;
  auto [shallow, deep] = half_maxima(values);
  return !deep.is_zero() && deep >= ExactScalar(2) * shallow;
}

bool vanishing_certificate(const std::vector<ExactScalar>& values, const ExactScalar& floor_tol) {
  if (values.size() < 4) return false;
  auto [shallow, deep] = half_maxima(values);
  return deep <= max(floor_tol, shallow / ExactScalar(2));
}

}  // namespace portan
