#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "affect/core.hpp"

namespace affect::text {

// ---- UTF-8 helpers ------------------------------------------------------

/// Lowercases ASCII and the Latin-1 supplement (Á, É, Ñ, ...).
std::string to_lower(std::string_view s);

/// Lowercase plus removal of Spanish diacritics (á -> a, ñ -> n, ü -> u).
std::string fold_diacritics(std::string_view s);

// ---- Resources ----------------------------------------------------------

class ResourceError : public Error {
 public:
  using Error::Error;
};

struct LexiconEntry {
  std::string lemma;
  Emotion emotion = Emotion::neutral;
  double weight = 1.0;   // (0, 1]
  double valence = 0.0;  // [-1, 1]
};

class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<LexiconEntry> entries);

  /// TSV columns: lemma, emotion, weight, valence. '#' starts a comment line;
  /// a header row beginning with "lemma" is skipped.
  static Lexicon load_tsv(const std::filesystem::path& path);
  static Lexicon parse_tsv(std::string_view content);

  const LexiconEntry* find(std::string_view lemma) const;
  const std::vector<LexiconEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<LexiconEntry> entries_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

class LemmaDictionary {
 public:
  LemmaDictionary() = default;
  explicit LemmaDictionary(std::map<std::string, std::string, std::less<>> forms) : forms_(std::move(forms)) {}

  /// TSV columns: surface, lemma.
  static LemmaDictionary load_tsv(const std::filesystem::path& path);
  static LemmaDictionary parse_tsv(std::string_view content);

  /// Identity fallback for unknown surfaces.
  std::string lemma_of(std::string_view surface) const;
  std::size_t size() const noexcept { return forms_.size(); }

 private:
  std::map<std::string, std::string, std::less<>> forms_;
};

struct Intensifier {
  std::string phrase;
  std::vector<std::string> words;
  double multiplier = 1.0;
};

/// Phrases are matched longest-first, so "un poco" wins over "poco".
class IntensifierTable {
 public:
  IntensifierTable() = default;
  explicit IntensifierTable(const std::vector<std::pair<std::string, double>>& phrases);

  static IntensifierTable defaults();

  /// Longest phrase starting at words[at], or nullptr.
  const Intensifier* match(const std::vector<std::string>& words, std::size_t at) const;
  const std::vector<Intensifier>& entries() const noexcept { return entries_; }

 private:
  std::vector<Intensifier> entries_;
};

std::set<std::string, std::less<>> default_negation_markers();

struct TextResources {
  Lexicon lexicon;
  LemmaDictionary lemmas;
  std::set<std::string, std::less<>> negation_markers = default_negation_markers();
  IntensifierTable intensifiers = IntensifierTable::defaults();
  std::size_t negation_scope = 3;
};

// ---- Analysis -----------------------------------------------------------

struct Token {
  std::string surface;
  std::string lemma;
  double multiplier = 1.0;
  bool negated = false;
};

struct AppliedIntensifier {
  std::string phrase;
  double multiplier = 1.0;
  std::string target;
};

struct TextAnalysis {
  std::vector<Token> tokens;  // content tokens only
  std::size_t negations_detected = 0;
  std::vector<AppliedIntensifier> intensifiers_applied;
};

TextAnalysis preprocess(std::string_view text, const TextResources& resources);

struct TextScores {
  EmotionScores scores{};
  double valence = 0.0;
  std::size_t matched = 0;
};

/// Negation involution: joy <-> sadness, every other label -> neutral.
Emotion negate(Emotion e) noexcept;

TextScores score_text(const TextAnalysis& analysis, const Lexicon& lexicon);

EmotionResult text_emotion(std::string_view text, const TextResources& resources);

}  // namespace affect::text
