#include <algorithm>

#include "affect/fuzzy.hpp"

namespace affect::fuzzy {

std::optional<double> FuzzyInputs::get(std::string_view name) const noexcept {
  if (name == "asr_conf") return asr_conf;
  if (name == "arousal") return arousal;
  if (name == "valence") return valence;
  return std::nullopt;
}

FuzzyInputs clamp_inputs(const RuleBase& rule_base, FuzzyInputs inputs) noexcept {
  if (const auto* v = rule_base.input("asr_conf")) inputs.asr_conf = v->clamp(inputs.asr_conf);
  if (const auto* v = rule_base.input("arousal")) inputs.arousal = v->clamp(inputs.arousal);
  if (const auto* v = rule_base.input("valence")) inputs.valence = v->clamp(inputs.valence);
  return inputs;
}

std::vector<FiredRule> evaluate_rules(const RuleBase& rule_base, const FuzzyInputs& raw) {
  const FuzzyInputs inputs = clamp_inputs(rule_base, raw);
  std::vector<FiredRule> fired;
  fired.reserve(rule_base.rules.size());
  for (const auto& rule : rule_base.rules) {
    FiredRule out;
    out.level = rule.consequent;
    out.consequent = "w_text is " + std::string(to_string(rule.consequent));
    double strength = 1.0;
    for (const auto& cond : rule.antecedents) {
      // Names were resolved by RuleBase::validate.
      const auto* var = rule_base.input(cond.variable);
      const auto* set = var->find(cond.set);
      strength = std::min(strength, set->mf(*inputs.get(cond.variable)));
      out.conditions.push_back(cond.text());
    }
    out.strength = strength;
    fired.push_back(std::move(out));
  }
  return fired;
}

OutSets aggregate_outputs(std::span<const FiredRule> fired) noexcept {
  OutSets out{};
  for (const auto& rule : fired) {
    auto& slot = out[static_cast<std::size_t>(rule.level)];
    slot = std::max(slot, rule.strength);
  }
  return out;
}

double defuzzify_centroid(const OutSets& out_sets, const LinguisticVariable& output, std::size_t grid_points) {
  if (grid_points < 2) throw Error("centroid grid needs at least 2 points");
  std::array<const MembershipFunction*, 3> mfs{};
  for (auto level : kOutputLevels) {
    const auto* set = output.find(to_string(level));
    if (!set) throw InvalidRuleBase("output variable lacks set '" + std::string(to_string(level)) + "'");
    mfs[static_cast<std::size_t>(level)] = &set->mf;
  }

  const double step = (output.hi - output.lo) / static_cast<double>(grid_points - 1);
  double area = 0.0;
  double moment = 0.0;
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = output.lo + step * static_cast<double>(i);
    double a = 0.0;
    for (std::size_t s = 0; s < 3; ++s) a = std::max(a, std::min((*mfs[s])(x), out_sets[s]));
    area += a;
    moment += x * a;
  }
  if (area <= 0.0) throw ZeroActivation();
  return std::clamp(moment / area, output.lo, output.hi);
}

FuzzyTrace infer_w_text(const RuleBase& rule_base, double asr_conf, double arousal, double valence) {
  FuzzyTrace trace;
  trace.rule_base_id = rule_base.id;
  trace.inputs = clamp_inputs(rule_base, {asr_conf, arousal, valence});
  for (const auto& var : rule_base.inputs) {
    auto& degrees = trace.memberships[var.name];
    const double x = *trace.inputs.get(var.name);
    for (const auto& set : var.sets) degrees[set.label] = set.mf(x);
  }
  trace.fired_rules = evaluate_rules(rule_base, trace.inputs);
  trace.out_sets = aggregate_outputs(trace.fired_rules);
  trace.w_text = defuzzify_centroid(trace.out_sets, rule_base.output);
  return trace;
}

}  // namespace affect::fuzzy
