#pragma once

#include <json.hpp>

#include "portan/rational.hpp"

namespace portan {

// All reports use ordered_json so that identical inputs serialize to
// identical bytes.
using Json = nlohmann::ordered_json;

inline Json rational_to_json(const ExactScalar& v) {
  return Json{{"num", v.numerator().str()}, {"den", v.denominator().str()}};
}

inline ExactScalar rational_from_json(const Json& j) {
  if (j.is_string()) return ExactScalar::parse(j.get<std::string>());
  if (j.is_number_integer()) {
    long long n = j.get<long long>();
    return ExactScalar(n);
  }
  if (j.is_object() && j.contains("num") && j.contains("den"))
    return ExactScalar::parse(j.at("num").get<std::string>() + "/" +
                              j.at("den").get<std::string>());
  throw ConfigError("expected a rational (string, integer, or {num, den}), got: " + j.dump());
}

}  // namespace portan
