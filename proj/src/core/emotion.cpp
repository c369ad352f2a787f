#include "affect/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace affect {

namespace {

constexpr std::array<std::string_view, kEmotionCount> kNames{"joy", "sadness", "anger", "fear", "disgust", "neutral"};

struct Alias {
  std::string_view name;
  Emotion emotion;
};

// Lowercase forms; accented variants are written as UTF-8.
constexpr std::array<Alias, 11> kAliases{{
    {"alegría", Emotion::joy},
    {"alegria", Emotion::joy},
    {"tristeza", Emotion::sadness},
    {"ira", Emotion::anger},
    {"miedo", Emotion::fear},
    {"asco", Emotion::disgust},
    {"neutro", Emotion::neutral},
    {"neutra", Emotion::neutral},
    {"happiness", Emotion::joy},
    {"sad", Emotion::sadness},
    {"angry", Emotion::anger},
}};

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) {
    if (ch >= 'A' && ch <= 'Z') ch = static_cast<char>(ch - 'A' + 'a');
  }
  // "ALEGRÍA": uppercase I-acute (C3 8D) -> lowercase (C3 AD).
  for (std::size_t i = 0; i + 1 < out.size(); ++i) {
    auto lead = static_cast<unsigned char>(out[i]);
    auto cont = static_cast<unsigned char>(out[i + 1]);
    if (lead == 0xC3 && cont >= 0x80 && cont <= 0x9E && cont != 0x97) out[i + 1] = static_cast<char>(cont + 0x20);
  }
  return out;
}

}  // namespace

std::string_view to_string(Emotion e) noexcept { return kNames[index_of(e)]; }

std::optional<Emotion> parse_emotion(std::string_view name) {
  const std::string lower = ascii_lower(name);
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    if (lower == kNames[i]) return kEmotions[i];
  }
  for (const auto& alias : kAliases) {
    if (lower == alias.name) return alias.emotion;
  }
  return std::nullopt;
}

Emotion emotion_from_string(std::string_view name) {
  if (auto e = parse_emotion(name)) return *e;
  throw Error("unknown emotion label: '" + std::string(name) + "'");
}

EmotionDistribution::EmotionDistribution() { p_[index_of(Emotion::neutral)] = 1.0; }

EmotionDistribution EmotionDistribution::one_hot(Emotion e) {
  EmotionScores p{};
  p[index_of(e)] = 1.0;
  return EmotionDistribution(p);
}

EmotionDistribution EmotionDistribution::from_probabilities(const EmotionScores& p) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) throw InvalidScore("probability outside [0,1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidScore("probabilities do not sum to 1");
  return EmotionDistribution(p);
}

EmotionDistribution normalize_distribution(const EmotionScores& raw) {
  double largest = 0.0;
  for (double v : raw) {
    if (!std::isfinite(v)) throw InvalidScore("non-finite emotion score");
    if (v < 0.0) throw InvalidScore("negative emotion score");
    largest = std::max(largest, v);
  }
  if (largest == 0.0) return EmotionDistribution{};

  // Pre-scaling by the maximum keeps the sum finite for inputs near DBL_MAX.
  EmotionScores p{};
  double sum = 0.0;
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    p[i] = raw[i] / largest;
    sum += p[i];
  }
  for (auto& v : p) v /= sum;
  return EmotionDistribution(p);
}

DominantEmotion dominant_emotion(const EmotionDistribution& dist) noexcept {
  const auto& p = dist.probabilities();
  std::size_t best = 0;
  for (std::size_t i = 1; i < kEmotionCount; ++i) {
    if (p[i] > p[best]) best = i;
  }
  return {kEmotions[best], p[best]};
}

VadState VadState::clamped(double valence, double arousal, double dominance) noexcept {
  return {std::clamp(valence, -1.0, 1.0), std::clamp(arousal, 0.0, 1.0), std::clamp(dominance, 0.0, 1.0)};
}

}  // namespace affect
