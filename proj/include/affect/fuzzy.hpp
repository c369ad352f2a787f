#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "affect/core.hpp"

namespace affect::fuzzy {

class InvalidRuleBase : public Error {
 public:
  using Error::Error;
};

/// No output set carries any activation, so the centroid is undefined.
class ZeroActivation : public Error {
 public:
  ZeroActivation() : Error("fuzzy output has zero activation") {}
};

/// Trapezoid (a, b, c, d): 0 outside [a, d], 1 on [b, c], linear between.
/// b == c gives a triangle; a == b or c == d gives a shoulder.
struct MembershipFunction {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;

  /// Throws InvalidRuleBase unless a <= b <= c <= d and all are finite.
  static MembershipFunction make(double a, double b, double c, double d);

  double operator()(double x) const noexcept;
};

double membership(const MembershipFunction& mf, double x) noexcept;

struct FuzzySet {
  std::string label;
  MembershipFunction mf;
};

struct LinguisticVariable {
  std::string name;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<FuzzySet> sets;

  const FuzzySet* find(std::string_view label) const noexcept;
  double clamp(double x) const noexcept;
};

enum class OutputLevel : std::uint8_t { low, mid, high };
inline constexpr std::array<OutputLevel, 3> kOutputLevels{OutputLevel::low, OutputLevel::mid, OutputLevel::high};
std::string_view to_string(OutputLevel level) noexcept;

struct Condition {
  std::string variable;
  std::string set;

  std::string text() const { return variable + " is " + set; }
};

struct FuzzyRule {
  std::vector<Condition> antecedents;
  OutputLevel consequent = OutputLevel::mid;
};

/// Versioned rule base. Input variables are drawn from {asr_conf, arousal,
/// valence}; the output variable w_text defines the sets low, mid and high.
struct RuleBase {
  std::string id;
  std::vector<LinguisticVariable> inputs;
  LinguisticVariable output;
  std::vector<FuzzyRule> rules;

  const LinguisticVariable* input(std::string_view name) const noexcept;

  /// Throws InvalidRuleBase naming the first problem found.
  void validate() const;

  static RuleBase parse_yaml(std::string_view yaml);
  static RuleBase load_yaml(const std::filesystem::path& path);
};

inline constexpr std::array<std::string_view, 3> kInputNames{"asr_conf", "arousal", "valence"};

struct FuzzyInputs {
  double asr_conf = 0.0;
  double arousal = 0.0;
  double valence = 0.0;

  std::optional<double> get(std::string_view name) const noexcept;
};

struct FiredRule {
  std::vector<std::string> conditions;  // "var is set"
  std::string consequent;               // "w_text is set"
  OutputLevel level = OutputLevel::mid;
  double strength = 0.0;
};

/// Indexed by OutputLevel.
using OutSets = std::array<double, 3>;

struct FuzzyTrace {
  std::string rule_base_id;
  FuzzyInputs inputs;
  /// Degree of every set of every input variable at the (clamped) inputs.
  std::map<std::string, std::map<std::string, double>> memberships;
  std::vector<FiredRule> fired_rules;
  OutSets out_sets{};
  double w_text = 0.0;
};

inline constexpr std::size_t kCentroidGrid = 1001;

/// Clamps inputs to their variable domains.
FuzzyInputs clamp_inputs(const RuleBase& rule_base, FuzzyInputs inputs) noexcept;

/// Every rule, in declaration order, with min-t-norm strength (zeros included).
std::vector<FiredRule> evaluate_rules(const RuleBase& rule_base, const FuzzyInputs& inputs);

/// Max-aggregation per output level.
OutSets aggregate_outputs(std::span<const FiredRule> fired) noexcept;

/// Discrete centroid of max_s min(mu_s(x), out_s) over a uniform grid on the
/// output domain. Throws ZeroActivation when the aggregate is identically 0.
double defuzzify_centroid(const OutSets& out_sets, const LinguisticVariable& output,
                          std::size_t grid_points = kCentroidGrid);

FuzzyTrace infer_w_text(const RuleBase& rule_base, double asr_conf, double arousal, double valence);

}  // namespace affect::fuzzy
