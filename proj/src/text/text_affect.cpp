#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include "affect/text.hpp"

namespace affect::text {

namespace {

bool is_sentence_break(char c) {
  return c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?';
}

bool is_ascii_separator(unsigned char c) {
  return c <= 0x20 || (c < 0x80 && !std::isalnum(c) && c != '\'' ) || c == 0x7F;
}

/// Width of a non-ASCII separator sequence at s[i] (inverted marks, guillemets,
/// dashes, curly quotes, ellipsis), or 0 when s[i] starts a word character.
/// Sets `is_break` for the ellipsis.
std::size_t unicode_separator(std::string_view s, std::size_t i, bool& is_break) {
  is_break = false;
  auto at = [&](std::size_t k) { return k < s.size() ? static_cast<unsigned char>(s[k]) : 0U; };
  if (at(i) == 0xC2) {
    switch (at(i + 1)) {
      case 0xA1: case 0xBF: case 0xAB: case 0xBB: case 0xA0:
        return 2;
      default:
        return 0;
    }
  }
  if (at(i) == 0xE2 && at(i + 1) == 0x80) {
    switch (at(i + 2)) {
      case 0x93: case 0x94: case 0x98: case 0x99: case 0x9C: case 0x9D:
        return 3;
      case 0xA6:
        is_break = true;
        return 3;
      default:
        return 0;
    }
  }
  return 0;
}

/// Lowercased words grouped into segments separated by sentence punctuation.
std::vector<std::vector<std::string>> segment(std::string_view raw) {
  const std::string text = to_lower(raw);
  std::vector<std::vector<std::string>> segments(1);
  std::string word;
  auto flush = [&] {
    if (!word.empty()) segments.back().push_back(std::move(word));
    word.clear();
  };
  auto sentence_break = [&] {
    flush();
    if (!segments.back().empty()) segments.emplace_back();
  };

  for (std::size_t i = 0; i < text.size();) {
    const char c = text[i];
    if (is_sentence_break(c)) {
      sentence_break();
      ++i;
      continue;
    }
    bool uni_break = false;
    if (std::size_t width = unicode_separator(text, i, uni_break)) {
      if (uni_break) {
        sentence_break();
      } else {
        flush();
      }
      i += width;
      continue;
    }
    if (is_ascii_separator(static_cast<unsigned char>(c))) {
      flush();
      ++i;
      continue;
    }
    word.push_back(c);
    ++i;
  }
  flush();
  if (segments.back().empty()) segments.pop_back();
  return segments;
}

std::string format_multiplier(double m) {
  std::ostringstream ss;
  ss << m;
  return ss.str();
}

}  // namespace

TextAnalysis preprocess(std::string_view text, const TextResources& resources) {
  TextAnalysis analysis;
  for (const auto& words : segment(text)) {
    std::vector<std::size_t> scopes;  // remaining content tokens per open negation
    double pending = 1.0;
    std::vector<const Intensifier*> pending_phrases;

    for (std::size_t i = 0; i < words.size();) {
      if (const Intensifier* hit = resources.intensifiers.match(words, i)) {
        pending *= hit->multiplier;
        pending_phrases.push_back(hit);
        i += hit->words.size();
        continue;
      }
      if (resources.negation_markers.contains(words[i])) {
        ++analysis.negations_detected;
        if (resources.negation_scope > 0) scopes.push_back(resources.negation_scope);
        ++i;
        continue;
      }

      Token token;
      token.surface = words[i];
      token.lemma = resources.lemmas.lemma_of(words[i]);
      token.multiplier = pending;
      // Overlapping scopes toggle, so "no no feliz" is un-negated.
      token.negated = scopes.size() % 2 == 1;
      for (const auto* p : pending_phrases) analysis.intensifiers_applied.push_back({p->phrase, p->multiplier, token.surface});
      analysis.tokens.push_back(std::move(token));

      for (auto& remaining : scopes) --remaining;
      std::erase(scopes, std::size_t{0});
      pending = 1.0;
      pending_phrases.clear();
      ++i;
    }
  }
  return analysis;
}

Emotion negate(Emotion e) noexcept {
  switch (e) {
    case Emotion::joy:
      return Emotion::sadness;
    case Emotion::sadness:
      return Emotion::joy;
    default:
      return Emotion::neutral;
  }
}

TextScores score_text(const TextAnalysis& analysis, const Lexicon& lexicon) {
  TextScores out;
  double valence_sum = 0.0;
  for (const auto& token : analysis.tokens) {
    const LexiconEntry* entry = lexicon.find(token.lemma);
    if (!entry) continue;
    ++out.matched;
    double contribution = entry->weight * token.multiplier;
    double valence = entry->valence * token.multiplier;
    Emotion target = entry->emotion;
    if (token.negated) {
      target = negate(target);
      contribution *= 0.5;
      valence *= -0.5;
    }
    out.scores[index_of(target)] += contribution;
    valence_sum += valence;
  }
  out.valence = std::clamp(valence_sum / std::max<double>(1.0, static_cast<double>(out.matched)), -1.0, 1.0);
  return out;
}

EmotionResult text_emotion(std::string_view text, const TextResources& resources) {
  const TextAnalysis analysis = preprocess(text, resources);
  const TextScores scores = score_text(analysis, resources.lexicon);

  EmotionResult result;
  result.distribution = normalize_distribution(scores.scores);
  result.confidence = std::min(1.0, static_cast<double>(scores.matched) / 5.0);
  result.vad = VadState::clamped(scores.valence, 0.5 * std::abs(scores.valence) + 0.1, 0.5);

  // Only lexicon hits are listed, so free-text tokens never reach the record.
  std::string lemmas;
  std::size_t negated = 0;
  for (const auto& t : analysis.tokens) {
    negated += t.negated ? 1 : 0;
    if (!resources.lexicon.find(t.lemma)) continue;
    if (!lemmas.empty()) lemmas.push_back(' ');
    if (t.negated) lemmas.push_back('~');
    lemmas += t.lemma;
  }
  std::string intensifiers;
  for (const auto& applied : analysis.intensifiers_applied) {
    if (!intensifiers.empty()) intensifiers.push_back(';');
    intensifiers += applied.phrase + "=" + format_multiplier(applied.multiplier) + ">" + applied.target;
  }
  result.metadata = {
      {"matched_lemmas", lemmas},
      {"token_count", static_cast<std::int64_t>(analysis.tokens.size())},
      {"matched_tokens", static_cast<std::int64_t>(scores.matched)},
      {"negations_detected", static_cast<std::int64_t>(analysis.negations_detected)},
      {"negated_tokens", static_cast<std::int64_t>(negated)},
      {"intensifiers_applied", intensifiers},
      {"dominance", result.vad.dominance},
  };
  return result;
}

}  // namespace affect::text
