#include "affect/audit.hpp"

namespace affect::audit {

std::size_t RedactionResult::total() const noexcept {
  std::size_t n = 0;
  for (const auto& [_, count] : report) n += count;
  return n;
}

PiiRedactor::PiiRedactor() {
  const auto flags = std::regex::ECMAScript | std::regex::optimize;
  patterns_.push_back({"EMAIL", std::regex(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(?:\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})", flags)});
  // International prefix with grouped digits, or three separated digit groups.
  patterns_.push_back(
      {"PHONE", std::regex(R"(\+\d{1,3}(?:[ .-]?\(?\d{1,4}\)?){2,5}|\b\d{2,4}[ .-]\d{3,4}[ .-]\d{3,4}\b)", flags)});
  patterns_.push_back({"ID", std::regex(R"(\b\d{7,9}\b)", flags)});
}

RedactionResult PiiRedactor::redact(std::string_view text) const {
  RedactionResult result{std::string(text), {}};
  for (const auto& p : patterns_) {
    std::string out;
    std::size_t count = 0;
    auto begin = std::sregex_iterator(result.text.begin(), result.text.end(), p.pattern);
    std::size_t last = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) {
      const auto& m = *it;
      const auto pos = static_cast<std::size_t>(m.position(0));
      out.append(result.text, last, pos - last);
      out += "[REDACTED:" + p.name + "]";
      last = pos + static_cast<std::size_t>(m.length(0));
      ++count;
    }
    if (count == 0) continue;
    out.append(result.text, last, std::string::npos);
    result.text = std::move(out);
    result.report[p.name] += count;
  }
  return result;
}

void merge_into(RedactionReport& into, const RedactionReport& from) {
  for (const auto& [name, count] : from) into[name] += count;
}

}  // namespace affect::audit
