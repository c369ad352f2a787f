#pragma once

#include <optional>
#include <string>

#include "affect/core.hpp"
#include "affect/fuzzy.hpp"

namespace affect::fusion {

/// Multiplicative ASR-confidence penalty by SNR band.
struct SnrPenalty {
  double low_band_db = 5.0;
  double moderate_band_db = 12.0;
  double low_factor = 0.6;
  double moderate_factor = 0.85;
};

double adjust_asr_confidence(double asr_conf, double snr_db, const SnrPenalty& penalty = {});

enum class CoherenceVariant {
  as_printed,        // arousal difference halved; range [0.25, 1]
  range_normalized,  // arousal difference over its own range; range [0, 1]
};

double coherence_index(const VadState& audio, const VadState& text,
                       CoherenceVariant variant = CoherenceVariant::as_printed) noexcept;

/// w_text * text + (1 - w_text) * audio.
EmotionDistribution fuse_distributions(const EmotionDistribution& text, const EmotionDistribution& audio,
                                       double w_text);

/// Arousal from audio, valence averaged across channels, dominance fixed at 0.5.
VadState fuse_vad(const VadState& audio, const VadState& text) noexcept;

enum class FusionMode { fuzzy, linear_fallback };
std::string_view to_string(FusionMode mode) noexcept;

struct FusionOutcome {
  EmotionDistribution distribution;
  VadState vad;
  double w_text = 0.0;
  double w_audio = 1.0;
  FusionMode mode = FusionMode::linear_fallback;
  double coherence = 1.0;
  std::optional<fuzzy::FuzzyTrace> trace;  // present iff mode == fuzzy
  std::string fallback_reason;
};

struct FusionOptions {
  CoherenceVariant coherence = CoherenceVariant::as_printed;
};

/// Fuzzy-weighted late fusion. Any engine failure (zero activation included)
/// degrades to linear fusion with w_text = adjusted_asr_conf.
FusionOutcome fuse(const EmotionResult& text, const EmotionResult& audio, double adjusted_asr_conf,
                   const fuzzy::RuleBase& rule_base, const FusionOptions& options = {});

/// Fixed-weight fusion used by the baselines and ablations; reported as
/// linear_fallback mode without a trace.
FusionOutcome fuse_with_weight(const EmotionResult& text, const EmotionResult& audio, double w_text,
                               const FusionOptions& options = {});

}  // namespace affect::fusion
