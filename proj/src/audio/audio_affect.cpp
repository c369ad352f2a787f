#include <algorithm>
#include <cmath>
#include <numeric>

#include "affect/audio.hpp"

namespace affect::audio {

namespace {

struct Prototype {
  Emotion emotion;
  double valence;
  double arousal;
};

constexpr std::array<Prototype, kEmotionCount> kPrototypes{{
    {Emotion::joy, 0.8, 0.7},
    {Emotion::sadness, -0.7, 0.25},
    {Emotion::anger, -0.7, 0.8},
    {Emotion::fear, -0.6, 0.7},
    {Emotion::disgust, -0.6, 0.45},
    {Emotion::neutral, 0.0, 0.3},
}};

constexpr double kPrototypeTemperature = 0.15;
constexpr double kRmsHeadroom = 0.92;
constexpr double kTimbreScale = 20.0;

}  // namespace

AudioBuffer::AudioBuffer(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.empty()) throw EmptyAudio();
  for (double s : samples_) {
    if (!std::isfinite(s) || s < -1.0 || s > 1.0) throw InvalidAudio("sample outside [-1, 1]");
  }
}

ArousalSmoother::ArousalSmoother(double alpha, std::optional<double> previous) : alpha_(alpha), previous_(previous) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("EMA alpha must lie in (0, 1]");
}

double ArousalSmoother::smooth(double current) const noexcept {
  if (!previous_) return current;
  return alpha_ * current + (1.0 - alpha_) * *previous_;
}

ArousalSmoother ArousalSmoother::advanced(double current) const { return ArousalSmoother(alpha_, smooth(current)); }

std::size_t zero_crossings(std::span<const double> samples) noexcept {
  std::size_t count = 0;
  int last = 0;
  for (double s : samples) {
    const int sign = (s > 0.0) - (s < 0.0);
    if (sign == 0) continue;
    if (last != 0 && sign != last) ++count;
    last = sign;
  }
  return count;
}

double compute_snr_db(const AudioBuffer& buffer, std::size_t block_size) {
  if (block_size == 0) throw Error("SNR block size must be >= 1");
  const auto samples = buffer.samples();
  if (samples.size() < block_size) return 0.0;

  std::vector<double> energies;
  energies.reserve(samples.size() / block_size + 1);
  std::size_t pos = 0;
  for (; pos + block_size <= samples.size(); pos += block_size) {
    double acc = 0.0;
    for (std::size_t i = pos; i < pos + block_size; ++i) acc += samples[i] * samples[i];
    energies.push_back(acc / static_cast<double>(block_size));
  }
  const std::size_t remainder = samples.size() - pos;
  if (remainder > 0 && 2 * remainder >= block_size) {
    double acc = 0.0;
    for (std::size_t i = pos; i < samples.size(); ++i) acc += samples[i] * samples[i];
    energies.push_back(acc / static_cast<double>(block_size));  // zero padded
  }

  const double mean = std::accumulate(energies.begin(), energies.end(), 0.0) / static_cast<double>(energies.size());
  if (mean <= 0.0) return 0.0;

  // Nearest-rank 10th percentile.
  const std::size_t rank = std::max<std::size_t>(1, (energies.size() + 9) / 10);
  std::nth_element(energies.begin(), energies.begin() + static_cast<std::ptrdiff_t>(rank - 1), energies.end());
  const double noise_floor = energies[rank - 1];

  const double db = 10.0 * std::log10(mean / std::max(noise_floor, 1e-12));
  return std::clamp(db, 0.0, 80.0);
}

std::optional<double> timbre_score(std::span<const double> samples) {
  const bool silent = std::all_of(samples.begin(), samples.end(), [](double s) { return s == 0.0; });
  if (silent) return std::nullopt;
  const auto mfcc = compute_mfcc(samples);
  if (mfcc.empty()) return std::nullopt;
  double acc = 0.0;
  for (const auto& frame : mfcc) {
    double frame_acc = 0.0;
    for (std::size_t k = 1; k < frame.size(); ++k) frame_acc += std::abs(frame[k]);
    acc += frame_acc / static_cast<double>(frame.size() - 1);
  }
  const double mean = acc / static_cast<double>(mfcc.size());
  return std::min(1.0, mean / kTimbreScale);
}

AcousticFeatures extract_acoustic_features(const AudioBuffer& buffer, const AudioConfig& config) {
  if (config.norm_factor <= 0.0) throw Error("norm_factor must be positive");
  const auto samples = buffer.samples();
  const auto n = static_cast<double>(samples.size());

  AcousticFeatures f;
  double energy = 0.0;
  for (double s : samples) energy += s * s;
  f.rms = std::sqrt(energy / n);
  f.rms_norm = std::min(1.0, f.rms / (config.norm_factor * kRmsHeadroom));
  f.zcr_raw = static_cast<double>(zero_crossings(samples)) / n;
  f.zcr_norm = std::min(1.0, 10.0 * f.zcr_raw);
  f.snr_db = compute_snr_db(buffer, config.snr_block_size);
  if (config.use_mfcc) {
    if (auto t = timbre_score(samples)) {
      f.timbre_score = *t;
      f.mfcc_present = true;
    }
  }
  return f;
}

AudioVad derive_audio_vad(const AcousticFeatures& features, const ArousalSmoother& smoother, double base_valence) {
  AcousticFeatures f = features;
  double valence = std::clamp(base_valence, -1.0, 1.0);
  double arousal = std::min(1.0, f.rms_norm * (0.9 + 0.1 * f.zcr_norm));
  if (f.mfcc_present) {
    valence = std::clamp(valence + (f.timbre_score - 0.5) * 0.2, -1.0, 1.0);
    arousal = std::min(1.0, arousal + f.timbre_score * 0.05);
  }
  f.arousal_raw = arousal;
  f.arousal_smoothed = smoother.smooth(arousal);
  return {VadState::clamped(valence, f.arousal_smoothed, 0.5), f, smoother.advanced(arousal)};
}

EmotionDistribution prototype_distribution(double valence, double arousal) {
  std::array<double, kEmotionCount> d2{};
  for (const auto& p : kPrototypes) {
    const double dv = valence - p.valence;
    const double da = arousal - p.arousal;
    d2[index_of(p.emotion)] = dv * dv + da * da;
  }
  const double nearest = *std::min_element(d2.begin(), d2.end());
  EmotionScores weights{};
  for (std::size_t i = 0; i < kEmotionCount; ++i) weights[i] = std::exp(-(d2[i] - nearest) / kPrototypeTemperature);
  return normalize_distribution(weights);
}

AudioEmotion audio_emotion(const AudioBuffer& buffer, const ArousalSmoother& smoother, const AudioConfig& config) {
  const AcousticFeatures raw = extract_acoustic_features(buffer, config);
  AudioVad derived = derive_audio_vad(raw, smoother, config.base_valence);
  const auto& f = derived.features;

  EmotionResult result;
  result.vad = derived.vad;
  result.distribution = prototype_distribution(derived.vad.valence, derived.vad.arousal);
  result.confidence = 0.5 + 0.5 * std::min(1.0, f.snr_db / 30.0);
  result.metadata = {
      {"rms", f.rms},
      {"rms_norm", f.rms_norm},
      {"zcr_raw", f.zcr_raw},
      {"zcr_norm", f.zcr_norm},
      {"timbre_score", f.timbre_score},
      {"mfcc_present", f.mfcc_present},
      {"snr_db", f.snr_db},
      {"arousal_raw", f.arousal_raw},
      {"arousal_smoothed", f.arousal_smoothed},
      {"dominance", derived.vad.dominance},
  };
  return {std::move(result), f, derived.smoother};
}

}  // namespace affect::audio
