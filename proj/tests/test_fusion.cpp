#include <doctest.h>

#include <random>

#include "affect/fusion.hpp"
#include "support.hpp"

using namespace affect;
using namespace affect::fusion;

namespace {

const fuzzy::RuleBase& base(const char* name) {
  static std::map<std::string, fuzzy::RuleBase> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    it = cache.emplace(name, fuzzy::RuleBase::load_yaml(testing::data_dir() / "rules" / (std::string(name) + ".yaml")))
             .first;
  }
  return it->second;
}

EmotionResult result(EmotionScores p, double valence, double arousal) {
  EmotionResult r;
  r.distribution = normalize_distribution(p);
  r.vad = VadState::clamped(valence, arousal);
  r.confidence = 0.8;
  return r;
}

EmotionDistribution random_distribution(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EmotionScores s{};
  for (auto& v : s) v = unit(rng);
  return normalize_distribution(s);
}

}  // namespace

TEST_CASE("SNR bands scale ASR confidence") {
  CHECK(adjust_asr_confidence(0.9, 20.0) == 0.9);
  CHECK(adjust_asr_confidence(0.9, 8.0) == doctest::Approx(0.765));
  CHECK(adjust_asr_confidence(0.9, 3.0) == doctest::Approx(0.54));
  CHECK(adjust_asr_confidence(0.9, 5.0) == doctest::Approx(0.765));
  CHECK(adjust_asr_confidence(0.9, 12.0) == 0.9);
  SnrPenalty custom{10.0, 20.0, 0.5, 0.9};
  CHECK(adjust_asr_confidence(0.8, 15.0, custom) == doctest::Approx(0.72));
}

TEST_CASE("coherence as printed") {
  const VadState a{0.3, 0.6, 0.5};
  CHECK(coherence_index(a, a) == 1.0);
  CHECK(coherence_index({-1, 0, 0.5}, {1, 1, 0.5}) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(coherence_index({0, 0, 0.5}, {1, 0.5, 0.5}) == doctest::Approx(0.625).epsilon(1e-12));
}

TEST_CASE("range-normalized coherence reaches zero") {
  CHECK(coherence_index({-1, 0, 0.5}, {1, 1, 0.5}, CoherenceVariant::range_normalized) == 0.0);
  CHECK(coherence_index({0, 0, 0.5}, {1, 0.5, 0.5}, CoherenceVariant::range_normalized) == doctest::Approx(0.5));
}

TEST_CASE("coherence is symmetric and 1 only on coincidence") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> v(-1.0, 1.0);
  std::uniform_real_distribution<double> a(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const VadState x{v(rng), a(rng), 0.5};
    const VadState y{v(rng), a(rng), 0.5};
    CHECK(coherence_index(x, y) == coherence_index(y, x));
    CHECK(coherence_index(x, y) < 1.0);
    CHECK(coherence_index(x, y) >= 0.25);
    CHECK(coherence_index(x, {x.valence, x.arousal, 0.1}) == 1.0);
  }
}

TEST_CASE("convex mixture endpoints and arithmetic") {
  std::mt19937_64 rng(19);
  const auto t = random_distribution(rng);
  const auto a = random_distribution(rng);
  CHECK(fuse_distributions(t, a, 1.0) == t);
  CHECK(fuse_distributions(t, a, 0.0) == a);
  const auto m = fuse_distributions(EmotionDistribution::one_hot(Emotion::joy),
                                    EmotionDistribution::one_hot(Emotion::anger), 0.6);
  CHECK(m[Emotion::joy] == doctest::Approx(0.6));
  CHECK(m[Emotion::anger] == doctest::Approx(0.4));
}

TEST_CASE("fused components lie between the channel components") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const auto t = random_distribution(rng);
    const auto a = random_distribution(rng);
    const auto f = fuse_distributions(t, a, unit(rng));
    for (auto e : kEmotions) {
      CHECK(f[e] >= std::min(t[e], a[e]) - 1e-12);
      CHECK(f[e] <= std::max(t[e], a[e]) + 1e-12);
    }
  }
}

TEST_CASE("VAD fusion: audio arousal, mean valence, fixed dominance") {
  CHECK(fuse_vad({0.4, 0.2, 0.9}, {-0.4, 0.8, 0.1}).valence == 0.0);
  const auto v = fuse_vad({0.6, 0.919, 0.5}, {0.2, 0.1, 0.5});
  CHECK(v.arousal == 0.919);
  CHECK(v.valence == doctest::Approx(0.4));
  CHECK(v.dominance == 0.5);
}

TEST_CASE("reference trace inputs fuse in fuzzy mode") {
  // Channel valences average to 0.02 and audio arousal is 0.12.
  const auto text = result({0, 0, 0, 0, 0, 1}, 0.04, 0.12);
  const auto audio = result({0, 0, 0, 0, 0, 1}, 0.0, 0.12);
  const auto out = fuse(text, audio, 0.9582073547338185, base("trace"));
  CHECK(out.mode == FusionMode::fuzzy);
  REQUIRE(out.trace.has_value());
  CHECK(out.trace->inputs.valence == doctest::Approx(0.02));
  CHECK(std::abs(out.w_text - 0.5843812629945782) <= 0.01);
  CHECK(out.w_text + out.w_audio == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("zero coverage falls back to linear fusion on the adjusted confidence") {
  const auto text = result({1, 0, 0, 0, 0, 0}, 0.5, 0.3);
  const auto audio = result({0, 0, 1, 0, 0, 0}, -0.5, 0.8);
  const auto out = fuse(text, audio, 0.7, base("empty"));
  CHECK(out.mode == FusionMode::linear_fallback);
  CHECK_FALSE(out.trace.has_value());
  CHECK(out.w_text == 0.7);
  CHECK(out.distribution[Emotion::joy] == doctest::Approx(0.7));
  CHECK_FALSE(out.fallback_reason.empty());
}

TEST_CASE("reliable transcript keeps text sadness over joyful prosody") {
  // Confident ASR (0.85), high audio arousal (0.919), neutral audio valence.
  const auto text = result({0.05, 0.8, 0, 0, 0, 0.15}, -0.6, 0.4);
  const auto audio = result({0.7, 0, 0, 0, 0, 0.3}, 0.0, 0.919);
  const auto out = fuse(text, audio, 0.85, base("trace"));
  CHECK(out.mode == FusionMode::fuzzy);
  CHECK(out.w_text > 0.5);
  CHECK(dominant_emotion(out.distribution).label == Emotion::sadness);
}

TEST_CASE("soft gating: low confidence lowers w_text under high arousal") {
  const auto text = result({0, 0, 0, 0, 0, 1}, 0.0, 0.1);
  const auto audio = result({0, 0, 0, 0, 0, 1}, 0.0, 0.9);
  const double low = fuse(text, audio, 0.3, base("default")).w_text;
  const double high = fuse(text, audio, 0.9, base("default")).w_text;
  CHECK(low < high);
  CHECK(low < 0.5);
}

TEST_CASE("fixed-weight fusion reports linear mode without a trace") {
  const auto text = result({1, 0, 0, 0, 0, 0}, 0.8, 0.5);
  const auto audio = result({0, 0, 0, 0, 0, 1}, 0.0, 0.3);
  const auto out = fuse_with_weight(text, audio, 0.25, {CoherenceVariant::range_normalized});
  CHECK(out.mode == FusionMode::linear_fallback);
  CHECK(out.w_audio == 0.75);
  CHECK(out.coherence == doctest::Approx(1.0 - (0.4 + 0.2) / 2.0));
}
