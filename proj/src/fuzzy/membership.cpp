#include <algorithm>
#include <cmath>

#include "affect/fuzzy.hpp"

namespace affect::fuzzy {

MembershipFunction MembershipFunction::make(double a, double b, double c, double d) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(d)) {
    throw InvalidRuleBase("membership points must be finite");
  }
  if (!(a <= b && b <= c && c <= d)) throw InvalidRuleBase("membership points must satisfy a <= b <= c <= d");
  return {a, b, c, d};
}

double MembershipFunction::operator()(double x) const noexcept {
  if (x >= b && x <= c) return 1.0;
  if (x > a && x < b) return (x - a) / (b - a);
  if (x > c && x < d) return (d - x) / (d - c);
  return 0.0;
}

double membership(const MembershipFunction& mf, double x) noexcept { return mf(x); }

const FuzzySet* LinguisticVariable::find(std::string_view label) const noexcept {
  auto it = std::find_if(sets.begin(), sets.end(), [&](const FuzzySet& s) { return s.label == label; });
  return it == sets.end() ? nullptr : &*it;
}

double LinguisticVariable::clamp(double x) const noexcept {
  if (std::isnan(x)) return lo;
  return std::clamp(x, lo, hi);
}

std::string_view to_string(OutputLevel level) noexcept {
  switch (level) {
    case OutputLevel::low:
      return "low";
    case OutputLevel::mid:
      return "mid";
    case OutputLevel::high:
      return "high";
  }
  return "mid";
}

}  // namespace affect::fuzzy
