#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "portan/json_util.hpp"
#include "portan/limits.hpp"
#include "portan/rational.hpp"

namespace portan {

// Small expression grammar over n with exact rational evaluation: integer
// constants, n, +, -, *, integer powers, and 2^-(expr) with an integer-valued
// exponent expression. Intermediates are signed; only the final rule value is
// constrained to (0,1).
class RatioExpr {
 public:
  static RatioExpr parse(std::string_view text);

  BigRational eval_raw(std::int64_t n) const;
  // the recurrence factor x_{n+1}/x_n; throws ValidationError outside (0,1)
  ExactScalar eval_ratio(std::int64_t n) const;
  const std::string& text() const { return text_; }

  struct ExprNode;

 private:
  std::shared_ptr<const ExprNode> root_;
  std::string text_;
};

// 2-adic valuation of n, plus one. This is the fixed partition index m(n)
// used by the starred perturbation: m(n) = k iff n is in M_k = {n : v2(n) = k-1}.
std::int64_t partition_index(std::int64_t n);

// Symbolic positive sequence tending to zero. Values are immutable and all
// evaluation is exact.
class SequenceSpec {
 public:
  struct Geometric;
  struct DyadicGaussian;
  struct RatioRule;
  struct Starred;
  struct ExplicitSeq;
  struct Scaled;
  struct Subseq;
  struct Node;

  static SequenceSpec geometric(ExactScalar a0, ExactScalar q);
  static SequenceSpec dyadic_gaussian(ExactScalar a0);
  static SequenceSpec ratio_rule(ExactScalar a0, RatioExpr ratio);
  static SequenceSpec ratio_rule(ExactScalar a0, std::string_view ratio_text);
  static SequenceSpec starred(SequenceSpec base);
  static SequenceSpec explicit_prefix(std::vector<ExactScalar> prefix, SequenceSpec tail);
  static SequenceSpec scaled(ExactScalar c, SequenceSpec base);  // canonicalizes where it can
  static SequenceSpec subsequence(std::int64_t start, std::int64_t stride, SequenceSpec base);

  ExactScalar evaluate(std::int64_t n) const;
  // inclusive, values for n = lo..hi
  std::vector<ExactScalar> evaluate_range(std::int64_t lo, std::int64_t hi) const;

  const Node& node() const { return *node_; }
  std::string describe() const;

  Json to_json() const;
  static SequenceSpec from_json(const Json& j);

 private:
  explicit SequenceSpec(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct SequenceSpec::Geometric {
  ExactScalar a0, q;  // x_n = a0 * q^n
};
struct SequenceSpec::DyadicGaussian {
  ExactScalar a0;  // x_n = a0 * 2^(-n^2)
};
struct SequenceSpec::RatioRule {
  ExactScalar a0;  // x_1 = a0, x_{n+1} = x_n * ratio(n)
  RatioExpr ratio;
};
struct SequenceSpec::Starred {
  SequenceSpec base;  // x_n = 2^(-m(n)) * base(n)
};
struct SequenceSpec::ExplicitSeq {
  std::vector<ExactScalar> prefix;  // x_n = prefix[n-1] for n <= len
  SequenceSpec tail;                // x_{len+k} = tail(k)
};
struct SequenceSpec::Scaled {
  ExactScalar c;
  SequenceSpec base;
};
struct SequenceSpec::Subseq {
  std::int64_t start, stride;  // x_k = base(start + stride*(k-1))
  SequenceSpec base;
};
struct SequenceSpec::Node {
  using Variant = std::variant<Geometric, DyadicGaussian, RatioRule, Starred, ExplicitSeq, Scaled, Subseq>;
  Variant v;
};

// Smallest index i (1-based) such that terms strictly decrease on [i, window.end];
// nullopt when even the final pair does not decrease.
std::optional<std::int64_t> certify_eventually_decreasing(const SequenceSpec& spec, TailWindow window);

// Greedy running-minimum extraction over [1, window.end]: strictly increasing
// indices along which values strictly decrease. Fails (nullopt) when fewer
// than 3 indices qualify.
std::optional<std::vector<std::int64_t>> decreasing_subsequence(const SequenceSpec& spec,
                                                                TailWindow window);

// Positive, eventually decreasing, certified to head to zero on the window.
struct ScalingSequence {
  SequenceSpec spec;
  std::int64_t decreasing_from = 1;

  static ScalingSequence make(SequenceSpec spec, TailWindow window,
                              const Settings& s = default_settings());
};

}  // namespace portan
