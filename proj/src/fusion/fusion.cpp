#include "affect/fusion.hpp"

#include <algorithm>
#include <cmath>

namespace affect::fusion {

double adjust_asr_confidence(double asr_conf, double snr_db, const SnrPenalty& penalty) {
  const double conf = std::clamp(asr_conf, 0.0, 1.0);
  if (snr_db < penalty.low_band_db) return conf * penalty.low_factor;
  if (snr_db < penalty.moderate_band_db) return conf * penalty.moderate_factor;
  return conf;
}

double coherence_index(const VadState& audio, const VadState& text, CoherenceVariant variant) noexcept {
  const double dv = std::abs(audio.valence - text.valence) / 2.0;
  const double arousal_range = variant == CoherenceVariant::as_printed ? 2.0 : 1.0;
  const double da = std::abs(audio.arousal - text.arousal) / arousal_range;
  return std::clamp(1.0 - (dv + da) / 2.0, 0.0, 1.0);
}

EmotionDistribution fuse_distributions(const EmotionDistribution& text, const EmotionDistribution& audio,
                                       double w_text) {
  const double w = std::clamp(w_text, 0.0, 1.0);
  if (w == 1.0) return text;
  if (w == 0.0) return audio;
  EmotionScores mixed{};
  for (std::size_t i = 0; i < kEmotionCount; ++i) {
    mixed[i] = w * text.probabilities()[i] + (1.0 - w) * audio.probabilities()[i];
  }
  return normalize_distribution(mixed);
}

VadState fuse_vad(const VadState& audio, const VadState& text) noexcept {
  return VadState::clamped((audio.valence + text.valence) / 2.0, audio.arousal, 0.5);
}

std::string_view to_string(FusionMode mode) noexcept {
  return mode == FusionMode::fuzzy ? "fuzzy" : "linear_fallback";
}

FusionOutcome fuse_with_weight(const EmotionResult& text, const EmotionResult& audio, double w_text,
                               const FusionOptions& options) {
  FusionOutcome out;
  out.w_text = std::clamp(w_text, 0.0, 1.0);
  out.w_audio = 1.0 - out.w_text;
  out.mode = FusionMode::linear_fallback;
  out.distribution = fuse_distributions(text.distribution, audio.distribution, out.w_text);
  out.vad = fuse_vad(audio.vad, text.vad);
  out.coherence = coherence_index(audio.vad, text.vad, options.coherence);
  return out;
}

FusionOutcome fuse(const EmotionResult& text, const EmotionResult& audio, double adjusted_asr_conf,
                   const fuzzy::RuleBase& rule_base, const FusionOptions& options) {
  const double engine_valence = (audio.vad.valence + text.vad.valence) / 2.0;
  try {
    fuzzy::FuzzyTrace trace = fuzzy::infer_w_text(rule_base, adjusted_asr_conf, audio.vad.arousal, engine_valence);
    FusionOutcome out = fuse_with_weight(text, audio, trace.w_text, options);
    out.mode = FusionMode::fuzzy;
    out.w_text = trace.w_text;
    out.w_audio = 1.0 - trace.w_text;
    out.trace = std::move(trace);
    return out;
  } catch (const Error& e) {
    FusionOutcome out = fuse_with_weight(text, audio, adjusted_asr_conf, options);
    out.fallback_reason = e.what();
    return out;
  }
}

}  // namespace affect::fusion
