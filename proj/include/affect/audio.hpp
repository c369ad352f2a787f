#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "affect/core.hpp"

namespace affect::audio {

class EmptyAudio : public Error {
 public:
  EmptyAudio() : Error("audio buffer is empty") {}
};

class InvalidAudio : public Error {
 public:
  using Error::Error;
};

inline constexpr int kSampleRate = 16000;

/// Mono 16 kHz samples in [-1, 1].
class AudioBuffer {
 public:
  explicit AudioBuffer(std::vector<double> samples);

  std::span<const double> samples() const noexcept { return samples_; }
  std::size_t size() const noexcept { return samples_.size(); }
  int sample_rate() const noexcept { return kSampleRate; }
  double duration_seconds() const noexcept { return static_cast<double>(samples_.size()) / kSampleRate; }

 private:
  std::vector<double> samples_;
};

struct AudioConfig {
  double norm_factor = 0.2;
  bool use_mfcc = true;
  std::size_t snr_block_size = 512;
  double alpha_ema = 0.3;
  double base_valence = 0.0;
};

struct AcousticFeatures {
  double rms = 0.0;
  double rms_norm = 0.0;
  double zcr_raw = 0.0;
  double zcr_norm = 0.0;
  double timbre_score = 0.5;
  bool mfcc_present = false;
  double snr_db = 0.0;
  double arousal_raw = 0.0;
  double arousal_smoothed = 0.0;
};

/// Turn-to-turn exponential moving average of arousal. Value type: smoothing
/// returns the successor state rather than mutating in place.
class ArousalSmoother {
 public:
  explicit ArousalSmoother(double alpha = 0.3, std::optional<double> previous = std::nullopt);

  double alpha() const noexcept { return alpha_; }
  std::optional<double> previous() const noexcept { return previous_; }

  /// First call passes the value through unchanged.
  double smooth(double current) const noexcept;
  ArousalSmoother advanced(double current) const;

 private:
  double alpha_;
  std::optional<double> previous_;
};

/// Sign changes between consecutive samples; zeros inherit the previous sign.
std::size_t zero_crossings(std::span<const double> samples) noexcept;

double compute_snr_db(const AudioBuffer& buffer, std::size_t block_size = 512);

/// Mean |c_k| for k = 1..12 over all frames, mapped through min(1, v/20).
/// Empty when no full frame fits or the signal carries no energy.
std::optional<double> timbre_score(std::span<const double> samples);

AcousticFeatures extract_acoustic_features(const AudioBuffer& buffer, const AudioConfig& config);

struct AudioVad {
  VadState vad;
  AcousticFeatures features;  // arousal_raw / arousal_smoothed filled in
  ArousalSmoother smoother;
};

AudioVad derive_audio_vad(const AcousticFeatures& features, const ArousalSmoother& smoother,
                          double base_valence = 0.0);

/// Valence-arousal prototype softmax, p ~ exp(-d^2 / 0.15).
EmotionDistribution prototype_distribution(double valence, double arousal);

struct AudioEmotion {
  EmotionResult result;
  AcousticFeatures features;
  ArousalSmoother smoother;
};

AudioEmotion audio_emotion(const AudioBuffer& buffer, const ArousalSmoother& smoother, const AudioConfig& config);

// ---- WAV ingest -----------------------------------------------------------

class WavError : public Error {
 public:
  using Error::Error;
};

struct DecodedWav {
  std::vector<double> mono;  // downmixed, original rate
  int sample_rate = 0;
  int channels = 0;
  int bits_per_sample = 0;
};

/// Decodes PCM 8/16/24/32-bit integer or 32-bit float RIFF/WAVE data.
DecodedWav decode_wav(std::span<const unsigned char> bytes);

std::vector<double> resample_linear(std::span<const double> samples, int from_rate, int to_rate);

/// decode_wav + downmix + resample to 16 kHz.
AudioBuffer read_wav(const std::filesystem::path& path);

void write_wav_pcm16(const std::filesystem::path& path, std::span<const double> samples, int sample_rate = kSampleRate);

// ---- MFCC ---------------------------------------------------------------

struct MfccOptions {
  int sample_rate = kSampleRate;
  std::size_t frame_length = 400;  // 25 ms
  std::size_t frame_shift = 160;   // 10 ms
  std::size_t fft_size = 512;
  std::size_t mel_bins = 26;
  std::size_t num_ceps = 13;
};

/// Row-major frames x num_ceps matrix; empty when the signal is shorter than
/// one frame.
std::vector<std::vector<double>> compute_mfcc(std::span<const double> samples, const MfccOptions& options = {});

}  // namespace affect::audio
