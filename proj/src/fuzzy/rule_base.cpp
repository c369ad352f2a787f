#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "affect/fuzzy.hpp"

namespace affect::fuzzy {

namespace {

std::string trim(std::string s) {
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

/// "var is set" -> {var, set}
Condition parse_condition(const std::string& text) {
  const std::string s = trim(text);
  const auto pos = s.find(" is ");
  if (pos == std::string::npos) throw InvalidRuleBase("condition must read '<variable> is <set>': '" + s + "'");
  return {trim(s.substr(0, pos)), trim(s.substr(pos + 4))};
}

OutputLevel parse_level(const std::string& text) {
  std::string s = trim(text);
  if (const auto pos = s.find(" is "); pos != std::string::npos) {
    if (trim(s.substr(0, pos)) != "w_text") throw InvalidRuleBase("rule consequent must target w_text: '" + s + "'");
    s = trim(s.substr(pos + 4));
  }
  for (auto level : kOutputLevels) {
    if (s == to_string(level)) return level;
  }
  throw InvalidRuleBase("unknown output set '" + s + "'");
}

LinguisticVariable parse_variable(const YAML::Node& node, const std::string& fallback_name) {
  LinguisticVariable var;
  var.name = node["name"] ? node["name"].as<std::string>() : fallback_name;
  if (const auto domain = node["domain"]) {
    if (!domain.IsSequence() || domain.size() != 2) throw InvalidRuleBase(var.name + ": domain must be [lo, hi]");
    var.lo = domain[0].as<double>();
    var.hi = domain[1].as<double>();
  }
  const auto sets = node["sets"];
  if (!sets || !sets.IsMap()) throw InvalidRuleBase(var.name + ": sets must be a mapping label -> [a, b, c, d]");
  for (const auto& kv : sets) {
    const auto label = kv.first.as<std::string>();
    const auto& pts = kv.second;
    if (!pts.IsSequence() || pts.size() != 4) throw InvalidRuleBase(var.name + "." + label + ": expected 4 points");
    var.sets.push_back({label, MembershipFunction::make(pts[0].as<double>(), pts[1].as<double>(),
                                                        pts[2].as<double>(), pts[3].as<double>())});
  }
  return var;
}

}  // namespace

const LinguisticVariable* RuleBase::input(std::string_view name) const noexcept {
  auto it = std::find_if(inputs.begin(), inputs.end(), [&](const LinguisticVariable& v) { return v.name == name; });
  return it == inputs.end() ? nullptr : &*it;
}

void RuleBase::validate() const {
  if (id.empty()) throw InvalidRuleBase("rule base id must be non-empty");

  auto check_variable = [](const LinguisticVariable& v) {
    if (!(v.lo < v.hi)) throw InvalidRuleBase(v.name + ": empty domain");
    std::set<std::string> labels;
    for (const auto& s : v.sets) {
      if (!labels.insert(s.label).second) throw InvalidRuleBase(v.name + ": duplicate set '" + s.label + "'");
      if (s.mf.a < v.lo || s.mf.d > v.hi) throw InvalidRuleBase(v.name + "." + s.label + ": support outside domain");
    }
  };

  std::set<std::string> seen;
  for (const auto& v : inputs) {
    if (std::find(kInputNames.begin(), kInputNames.end(), v.name) == kInputNames.end()) {
      throw InvalidRuleBase("unknown input variable '" + v.name + "'");
    }
    if (!seen.insert(v.name).second) throw InvalidRuleBase("duplicate input variable '" + v.name + "'");
    check_variable(v);
  }

  if (output.name != "w_text") throw InvalidRuleBase("output variable must be named w_text");
  check_variable(output);
  for (auto level : kOutputLevels) {
    if (!output.find(to_string(level))) {
      throw InvalidRuleBase("output variable lacks set '" + std::string(to_string(level)) + "'");
    }
  }

  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& rule = rules[i];
    if (rule.antecedents.empty()) throw InvalidRuleBase("rule " + std::to_string(i + 1) + " has no antecedents");
    for (const auto& cond : rule.antecedents) {
      const auto* var = input(cond.variable);
      if (!var) throw InvalidRuleBase("rule " + std::to_string(i + 1) + ": unknown variable '" + cond.variable + "'");
      if (!var->find(cond.set)) {
        throw InvalidRuleBase("rule " + std::to_string(i + 1) + ": unknown set '" + cond.text() + "'");
      }
    }
  }
}

RuleBase RuleBase::parse_yaml(std::string_view yaml) {
  RuleBase rb;
  try {
    const YAML::Node root = YAML::Load(std::string(yaml));
    if (!root.IsMap()) throw InvalidRuleBase("rule base must be a YAML mapping");
    rb.id = root["id"] ? root["id"].as<std::string>() : std::string{};

    if (const auto vars = root["variables"]) {
      if (vars.IsSequence()) {
        for (const auto& v : vars) rb.inputs.push_back(parse_variable(v, ""));
      } else if (vars.IsMap()) {
        for (const auto& kv : vars) rb.inputs.push_back(parse_variable(kv.second, kv.first.as<std::string>()));
      } else {
        throw InvalidRuleBase("variables must be a list or mapping");
      }
    }
    if (!root["output"]) throw InvalidRuleBase("missing output section");
    rb.output = parse_variable(root["output"], "w_text");

    if (const auto rules = root["rules"]) {
      if (!rules.IsSequence()) throw InvalidRuleBase("rules must be a list");
      for (const auto& r : rules) {
        FuzzyRule rule;
        const auto antecedents = r["if"];
        if (!antecedents) throw InvalidRuleBase("rule without 'if'");
        if (antecedents.IsSequence()) {
          for (const auto& a : antecedents) rule.antecedents.push_back(parse_condition(a.as<std::string>()));
        } else {
          rule.antecedents.push_back(parse_condition(antecedents.as<std::string>()));
        }
        if (!r["then"]) throw InvalidRuleBase("rule without 'then'");
        rule.consequent = parse_level(r["then"].as<std::string>());
        rb.rules.push_back(std::move(rule));
      }
    }
  } catch (const YAML::Exception& e) {
    throw InvalidRuleBase(std::string("rule base YAML: ") + e.what());
  }
  rb.validate();
  return rb;
}

RuleBase RuleBase::load_yaml(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidRuleBase("cannot open rule base " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_yaml(ss.str());
}

}  // namespace affect::fuzzy
