#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace affect {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidScore : public Error {
 public:
  using Error::Error;
};

/// Canonical emotion ontology. The enumerator order is the canonical order
/// used for tie-breaking and serialization.
enum class Emotion : std::uint8_t { joy, sadness, anger, fear, disgust, neutral };

inline constexpr std::size_t kEmotionCount = 6;
inline constexpr std::array<Emotion, kEmotionCount> kEmotions{
    Emotion::joy, Emotion::sadness, Emotion::anger, Emotion::fear, Emotion::disgust, Emotion::neutral};

constexpr std::size_t index_of(Emotion e) noexcept { return static_cast<std::size_t>(e); }

std::string_view to_string(Emotion e) noexcept;

/// Accepts canonical English labels and the Spanish aliases (with or without
/// diacritics), case-insensitively.
std::optional<Emotion> parse_emotion(std::string_view name);

/// Like parse_emotion but throws affect::Error on unknown labels.
Emotion emotion_from_string(std::string_view name);

using EmotionScores = std::array<double, kEmotionCount>;

/// Probability mass over the six canonical labels. Always sums to 1.
class EmotionDistribution {
 public:
  /// One-hot neutral.
  EmotionDistribution();

  static EmotionDistribution one_hot(Emotion e);

  /// Validates an already-normalized vector: components in [0,1], sum within
  /// 1e-9 of one. Throws InvalidScore otherwise.
  static EmotionDistribution from_probabilities(const EmotionScores& p);

  double operator[](Emotion e) const noexcept { return p_[index_of(e)]; }
  const EmotionScores& probabilities() const noexcept { return p_; }

  friend bool operator==(const EmotionDistribution&, const EmotionDistribution&) = default;

 private:
  explicit EmotionDistribution(const EmotionScores& p) : p_(p) {}

  EmotionScores p_{};

  friend EmotionDistribution normalize_distribution(const EmotionScores& raw);
};

/// Divides nonnegative scores by their sum. All-zero evidence yields one-hot
/// neutral. Throws InvalidScore on negative or non-finite input.
EmotionDistribution normalize_distribution(const EmotionScores& raw);

struct DominantEmotion {
  Emotion label = Emotion::neutral;
  double probability = 1.0;
};

/// Argmax; ties resolve to the earliest label in canonical order.
DominantEmotion dominant_emotion(const EmotionDistribution& dist) noexcept;

struct VadState {
  double valence = 0.0;    // [-1, 1]
  double arousal = 0.0;    // [0, 1]
  double dominance = 0.5;  // [0, 1]

  static VadState clamped(double valence, double arousal, double dominance = 0.5) noexcept;

  friend bool operator==(const VadState&, const VadState&) = default;
};

using MetadataValue = std::variant<bool, std::int64_t, double, std::string>;
using Metadata = std::map<std::string, MetadataValue, std::less<>>;

/// Output contract shared by every modality backend.
struct EmotionResult {
  EmotionDistribution distribution;
  VadState vad;
  double confidence = 0.0;
  Metadata metadata;
};

}  // namespace affect
