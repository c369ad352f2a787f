#include <fstream>
#include <sstream>

#include "affect/guardrails.hpp"
#include "affect/text.hpp"

namespace affect::guardrails {

namespace {

std::string trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return std::string(s.substr(first, s.find_last_not_of(ws) - first + 1));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_threshold(double v) {
  std::ostringstream ss;
  ss << v;
  return ss.str();
}

/// Lowercase, diacritic-free, whitespace runs collapsed to single spaces.
std::string normalize_for_match(std::string_view s) {
  const std::string folded = text::fold_diacritics(s);
  std::string out;
  bool space = false;
  for (char c : folded) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      space = !out.empty();
      continue;
    }
    if (space) out.push_back(' ');
    space = false;
    out.push_back(c);
  }
  return out;
}

}  // namespace

Escalation evaluate_guardrails(const fusion::FusionOutcome& fused, std::string_view transcript,
                               const GuardrailConfig& config, std::string timestamp) {
  Escalation esc;
  esc.timestamp = std::move(timestamp);
  for (const auto& t : config.thresholds) {
    if (fused.distribution[t.emotion] > t.threshold) {
      esc.reasons.push_back(std::string(to_string(t.emotion)) + ">" + format_threshold(t.threshold));
    }
  }
  const std::string haystack = normalize_for_match(transcript);
  for (const auto& keyword : config.keywords) {
    const std::string needle = normalize_for_match(keyword);
    if (!needle.empty() && haystack.find(needle) != std::string::npos) esc.reasons.push_back("keyword:" + keyword);
  }
  esc.triggered = !esc.reasons.empty();
  return esc;
}

std::vector<std::string> load_keywords(const std::filesystem::path& path) {
  std::vector<std::string> keywords;
  std::istringstream in(read_file(path));
  for (std::string line; std::getline(in, line);) {
    auto kw = trim(line);
    if (kw.empty() || kw.front() == '#') continue;
    keywords.push_back(std::move(kw));
  }
  return keywords;
}

ResponseTemplates::ResponseTemplates() {
  plain_ = {
      "¡Qué bueno escuchar eso! Me alegra que te sientas así.",
      "Siento que estés pasando por esto. Estoy aquí para escucharte.",
      "Entiendo que esto te moleste. Tomemos un momento para verlo con calma.",
      "Parece que algo te preocupa. Estás en un lugar seguro para contarlo.",
      "Entiendo que eso te resulte desagradable. ¿Quieres contarme más?",
      "Gracias por contármelo. ¿En qué más puedo ayudarte?",
  };
  hedged_ = {
      "Me parece que te sientes bien, ¿es así?",
      "Quizá estés un poco triste; si quieres, podemos hablarlo.",
      "Puede que algo te haya incomodado. ¿Quieres contarme qué pasó?",
      "Tal vez algo te inquiete. Cuéntame si te apetece.",
      "Quizá algo no te ha gustado. ¿Me cuentas un poco más?",
      "Te escucho. Cuéntame lo que quieras.",
  };
  safe_handoff_ =
      "Lo que me cuentas es importante. Voy a ponerte en contacto con una persona que pueda ayudarte ahora mismo.";
}

ResponseTemplates ResponseTemplates::parse(std::string_view content) {
  ResponseTemplates t;
  std::istringstream in{std::string(content)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    const auto stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) throw Error("templates line " + std::to_string(line_no) + ": expected key = text");
    const auto key = trim(std::string_view(stripped).substr(0, eq));
    auto value = trim(std::string_view(stripped).substr(eq + 1));
    if (value.empty()) throw Error("templates line " + std::to_string(line_no) + ": empty template");
    if (key == "safe_handoff") {
      t.safe_handoff_ = std::move(value);
      continue;
    }
    const auto dot = key.rfind('.');
    if (dot == std::string::npos) throw Error("templates line " + std::to_string(line_no) + ": unknown key " + key);
    const auto emotion = parse_emotion(key.substr(0, dot));
    const auto variant = key.substr(dot + 1);
    if (!emotion || (variant != "plain" && variant != "hedged")) {
      throw Error("templates line " + std::to_string(line_no) + ": unknown key " + key);
    }
    (variant == "plain" ? t.plain_ : t.hedged_)[index_of(*emotion)] = std::move(value);
  }
  return t;
}

ResponseTemplates ResponseTemplates::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::string plan_response(const fusion::FusionOutcome& fused, const Escalation& escalation,
                          const ResponseTemplates& templates, const GuardrailConfig& config) {
  if (escalation.triggered) return templates.safe_handoff();
  const auto dominant = dominant_emotion(fused.distribution);
  const bool hedge = dominant.probability < config.hedge_probability || fused.coherence < config.hedge_coherence;
  return hedge ? templates.hedged(dominant.label) : templates.plain(dominant.label);
}

}  // namespace affect::guardrails
