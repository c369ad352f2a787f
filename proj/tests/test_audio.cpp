#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <random>

#include "affect/audio.hpp"
#include "support.hpp"

using namespace affect;
using namespace affect::audio;

namespace {

AcousticFeatures features_of(std::vector<double> samples, bool mfcc = false) {
  AudioConfig config;
  config.use_mfcc = mfcc;
  return extract_acoustic_features(AudioBuffer(std::move(samples)), config);
}

// Minimal RIFF writer for decoder tests; payload is raw little-endian frames.
std::vector<unsigned char> riff(std::uint16_t format, int channels, int rate, int bits,
                                const std::vector<unsigned char>& payload) {
  std::vector<unsigned char> out;
  auto put = [&](std::uint32_t v, int n) {
    for (int i = 0; i < n; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
  };
  auto tag = [&](const char* t) { out.insert(out.end(), t, t + 4); };
  tag("RIFF");
  put(static_cast<std::uint32_t>(36 + payload.size()), 4);
  tag("WAVE");
  tag("fmt ");
  put(16, 4);
  put(format, 2);
  put(static_cast<std::uint32_t>(channels), 2);
  put(static_cast<std::uint32_t>(rate), 4);
  put(static_cast<std::uint32_t>(rate * channels * bits / 8), 4);
  put(static_cast<std::uint32_t>(channels * bits / 8), 2);
  put(static_cast<std::uint32_t>(bits), 2);
  tag("data");
  put(static_cast<std::uint32_t>(payload.size()), 4);
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

}  // namespace

TEST_CASE("empty or out-of-range buffers are rejected") {
  CHECK_THROWS_AS(AudioBuffer(std::vector<double>{}), EmptyAudio);
  CHECK_THROWS_AS(AudioBuffer(std::vector<double>{0.1, 1.5}), InvalidAudio);
  CHECK_THROWS_AS(AudioBuffer(std::vector<double>{std::nan("")}), InvalidAudio);
}

TEST_CASE("silence is the neutral degenerate case") {
  AudioConfig config;
  const auto f = extract_acoustic_features(AudioBuffer(std::vector<double>(16000, 0.0)), config);
  CHECK(f.rms_norm == 0.0);
  CHECK(f.zcr_raw == 0.0);
  CHECK(f.zcr_norm == 0.0);
  CHECK(f.timbre_score == 0.5);
  CHECK_FALSE(f.mfcc_present);
  CHECK(f.snr_db == 0.0);

  const auto heard = audio_emotion(AudioBuffer(std::vector<double>(16000, 0.0)), ArousalSmoother(0.3), config);
  CHECK(heard.result.vad.valence == 0.0);
  CHECK(heard.result.vad.arousal == 0.0);
  CHECK(heard.result.vad.dominance == 0.5);
  CHECK(dominant_emotion(heard.result.distribution).label == Emotion::neutral);
}

TEST_CASE("alternating samples saturate the crossing rate") {
  std::vector<double> x(1000);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = i % 2 ? -0.5 : 0.5;
  const auto f = features_of(x);
  CHECK(f.zcr_raw == doctest::Approx(999.0 / 1000.0));
  CHECK(f.zcr_norm == 1.0);
}

TEST_CASE("zero samples inherit the previous sign") {
  const std::vector<double> x{0.5, 0.0, 0.0, 0.4, 0.0, -0.2, 0.0, -0.1, 0.3};
  CHECK(zero_crossings(x) == 2);
  CHECK(zero_crossings(std::vector<double>{0.0, 0.0, -1.0, 0.0, 1.0}) == 1);
}

TEST_CASE("440 Hz sine matches analytic rms and crossing rate") {
  const auto x = testing::sine(440.0, 0.5, 1.0, 16000.0, 0.1);
  const auto f = features_of(x);
  CHECK(f.rms == doctest::Approx(0.5 / std::sqrt(2.0)).epsilon(1e-3));
  CHECK(f.zcr_raw == doctest::Approx(880.0 / 16000.0).epsilon(1e-2));
  CHECK(f.zcr_norm == doctest::Approx(0.55).epsilon(1e-2));
  CHECK(f.rms_norm == doctest::Approx(std::min(1.0, f.rms / (0.2 * 0.92))));
}

TEST_CASE("block-energy SNR uses the nearest-rank 10th percentile") {
  std::vector<double> x;
  const double quiet = std::sqrt(1e-6);
  const double loud = std::sqrt(1e-2);
  for (int b = 0; b < 10; ++b) {
    const double a = b == 3 ? quiet : loud;
    for (int i = 0; i < 512; ++i) x.push_back(i % 2 ? -a : a);
  }
  const double expected = 10.0 * std::log10((9 * 1e-2 + 1e-6) / 10.0 / 1e-6);
  CHECK(expected == doctest::Approx(39.5425).epsilon(1e-4));
  CHECK(compute_snr_db(AudioBuffer(x), 512) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("equal-energy blocks give 0 dB") {
  CHECK(compute_snr_db(AudioBuffer(std::vector<double>(5120, 0.3)), 512) == 0.0);
  CHECK(compute_snr_db(AudioBuffer(std::vector<double>(100, 0.3)), 512) == 0.0);
  CHECK_THROWS(compute_snr_db(AudioBuffer(std::vector<double>(100, 0.3)), 0));
}

TEST_CASE("SNR trailing remainder: short tails dropped, long tails zero padded") {
  const std::vector<double> body(512 * 9, 0.1);  // nine blocks at MSE 0.01

  std::vector<double> short_tail = body;
  short_tail.insert(short_tail.end(), 100, 0.1);  // under half a block: dropped
  CHECK(compute_snr_db(AudioBuffer(short_tail), 512) == 0.0);

  // 300 samples padded to 512: the tenth block has MSE 300 * 0.01 / 512 and is
  // the nearest-rank 10th percentile of ten blocks.
  std::vector<double> long_tail = body;
  long_tail.insert(long_tail.end(), 300, 0.1);
  const double padded = 300 * 0.01 / 512;
  const double mean = (9 * 0.01 + padded) / 10;
  CHECK(compute_snr_db(AudioBuffer(long_tail), 512) == doctest::Approx(10 * std::log10(mean / padded)).epsilon(1e-9));
}

TEST_CASE("arousal and EMA follow the printed equations") {
  AcousticFeatures f;
  f.rms_norm = 0.5;
  f.zcr_norm = 0.0;
  const auto first = derive_audio_vad(f, ArousalSmoother(0.3, 0.0));
  CHECK(first.features.arousal_raw == doctest::Approx(0.45));
  CHECK(first.features.arousal_smoothed == doctest::Approx(0.135));
  CHECK(first.vad.arousal == doctest::Approx(0.135));

  f.rms_norm = 1.0;
  f.zcr_norm = 1.0;
  CHECK(derive_audio_vad(f, ArousalSmoother(0.3)).features.arousal_raw == 1.0);

  f.mfcc_present = true;
  f.timbre_score = 0.5;
  CHECK(derive_audio_vad(f, ArousalSmoother(0.3), 0.2).vad.valence == doctest::Approx(0.2));
  f.timbre_score = 1.0;
  f.rms_norm = 0.2;
  const auto t = derive_audio_vad(f, ArousalSmoother(0.3), 0.0);
  CHECK(t.vad.valence == doctest::Approx(0.1));
  CHECK(t.features.arousal_raw == doctest::Approx(0.2 * 1.0 + 0.05));
}

TEST_CASE("first turn passes arousal through; later turns blend") {
  ArousalSmoother s(0.3);
  CHECK(s.smooth(0.8) == 0.8);
  s = s.advanced(0.8);
  CHECK(s.smooth(0.2) == doctest::Approx(0.3 * 0.2 + 0.7 * 0.8));
  CHECK_THROWS(ArousalSmoother(0.0));
  CHECK_THROWS(ArousalSmoother(1.2));
  CHECK_NOTHROW(ArousalSmoother(1.0));
}

TEST_CASE("EMA converges geometrically to a constant input") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double alpha = 0.05 + 0.95 * unit(rng);
    const double x = unit(rng);
    ArousalSmoother s(alpha, unit(rng));
    double gap = std::abs(*s.previous() - x);
    for (int step = 0; step < 40; ++step) {
      s = s.advanced(x);
      const double next_gap = std::abs(*s.previous() - x);
      CHECK(std::abs(next_gap - gap * (1.0 - alpha)) <= 1e-15);
      gap = next_gap;
    }
  }
}

TEST_CASE("features stay in range for random buffers") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(1, 6000);
  for (int trial = 0; trial < 60; ++trial) {
    const double amp = std::abs(unit(rng));
    std::vector<double> x(len(rng));
    for (auto& s : x) s = amp * unit(rng);
    AudioConfig config;
    const auto heard = audio_emotion(AudioBuffer(x), ArousalSmoother(0.3, std::abs(unit(rng))), config);
    const auto& f = heard.features;
    for (double v : {f.rms_norm, f.zcr_raw, f.zcr_norm, f.timbre_score, f.arousal_raw, f.arousal_smoothed}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
    CHECK(f.snr_db >= 0.0);
    CHECK(f.snr_db <= 80.0);
    CHECK(heard.result.confidence >= 0.5);
    CHECK(heard.result.confidence <= 1.0);
  }
}

TEST_CASE("arousal is monotone in rms_norm") {
  for (double zcr : {0.0, 0.3, 1.0}) {
    double last = -1.0;
    for (int i = 0; i <= 100; ++i) {
      AcousticFeatures f;
      f.rms_norm = i / 100.0;
      f.zcr_norm = zcr;
      const double a = derive_audio_vad(f, ArousalSmoother(0.3)).features.arousal_raw;
      CHECK(a >= last);
      last = a;
    }
  }
}

TEST_CASE("scaling amplitude leaves the crossing rate unchanged") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> noise(0.0, 0.2);
  std::vector<double> x(4000);
  for (auto& s : x) s = std::clamp(noise(rng), -1.0, 1.0);
  const auto base = features_of(x).zcr_raw;
  for (double k : {1.0, 0.5, 0.01, 1e-6}) {
    std::vector<double> y = x;
    for (auto& s : y) s *= k;
    CHECK(features_of(y).zcr_raw == base);
  }
}

TEST_CASE("prototype softmax follows the nearest prototype") {
  CHECK(dominant_emotion(prototype_distribution(-0.6, 0.9)).label == Emotion::anger);
  CHECK(dominant_emotion(prototype_distribution(0.8, 0.9)).label == Emotion::joy);
  CHECK(dominant_emotion(prototype_distribution(0.0, 0.0)).label == Emotion::neutral);

  // exp(-d^2/0.15) by hand at the neutral prototype itself
  const auto d = prototype_distribution(0.0, 0.3);
  const double w_neutral = 1.0;
  const double w_joy = std::exp(-(0.64 + 0.16) / 0.15);
  const double w_sad = std::exp(-(0.49 + 0.0025) / 0.15);
  const double w_anger = std::exp(-(0.49 + 0.25) / 0.15);
  const double w_fear = std::exp(-(0.36 + 0.16) / 0.15);
  const double w_disgust = std::exp(-(0.36 + 0.0225) / 0.15);
  const double z = w_neutral + w_joy + w_sad + w_anger + w_fear + w_disgust;
  CHECK(d[Emotion::neutral] == doctest::Approx(w_neutral / z).epsilon(1e-12));
  CHECK(d[Emotion::disgust] == doctest::Approx(w_disgust / z).epsilon(1e-12));
  CHECK(d[Emotion::joy] == doctest::Approx(w_joy / z).epsilon(1e-12));
}

TEST_CASE("timbre score is bounded and absent for short or silent input") {
  CHECK_FALSE(timbre_score(std::vector<double>(100, 0.3)).has_value());
  CHECK_FALSE(timbre_score(std::vector<double>(4000, 0.0)).has_value());
  const auto t = timbre_score(testing::sine(300.0, 0.4, 0.5));
  REQUIRE(t.has_value());
  CHECK(*t >= 0.0);
  CHECK(*t <= 1.0);
  const auto mfcc = compute_mfcc(testing::sine(300.0, 0.4, 0.5));
  CHECK(mfcc.size() == 1 + (8000 - 400) / 160);
  CHECK(mfcc.front().size() == 13);
}

TEST_CASE("PCM16 round trip through a file") {
  testing::TempDir dir("wav");
  const auto x = testing::sine(250.0, 0.7, 0.25);
  write_wav_pcm16(dir / "a.wav", x);
  const auto back = read_wav(dir / "a.wav");
  REQUIRE(back.size() == x.size());
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back.samples()[i] - x[i]) <= 2.0 / 32768.0);
  CHECK_THROWS_AS(read_wav(dir / "missing.wav"), WavError);
}

TEST_CASE("decoder handles 8/24/32-bit PCM and float, downmixing stereo") {
  SUBCASE("8-bit unsigned") {
    const auto w = decode_wav(riff(1, 1, 16000, 8, {128, 255, 0, 192}));
    REQUIRE(w.mono.size() == 4);
    CHECK(w.mono[0] == 0.0);
    CHECK(w.mono[1] == doctest::Approx(127.0 / 128.0));
    CHECK(w.mono[2] == -1.0);
    CHECK(w.mono[3] == 0.5);
  }
  SUBCASE("24-bit stereo downmix") {
    // L = +0.5 (0x400000), R = -0.25 (0xE00000)
    const auto w = decode_wav(riff(1, 2, 16000, 24, {0x00, 0x00, 0x40, 0x00, 0x00, 0xE0}));
    REQUIRE(w.mono.size() == 1);
    CHECK(w.channels == 2);
    CHECK(w.mono[0] == doctest::Approx(0.125));
  }
  SUBCASE("32-bit integer") {
    const auto w = decode_wav(riff(1, 1, 16000, 32, {0x00, 0x00, 0x00, 0xC0}));
    CHECK(w.mono[0] == -0.5);
  }
  SUBCASE("32-bit float") {
    float v = 0.375f;
    std::uint32_t raw;
    std::memcpy(&raw, &v, 4);
    const auto w = decode_wav(riff(3, 1, 16000, 32,
                                   {static_cast<unsigned char>(raw), static_cast<unsigned char>(raw >> 8),
                                    static_cast<unsigned char>(raw >> 16), static_cast<unsigned char>(raw >> 24)}));
    CHECK(w.mono[0] == 0.375);
  }
  SUBCASE("garbage") {
    const std::vector<unsigned char> junk(64, 7);
    CHECK_THROWS_AS(decode_wav(junk), WavError);
    CHECK_THROWS_AS(decode_wav(riff(2, 1, 16000, 16, {0, 0})), WavError);
  }
}

TEST_CASE("linear resampling interpolates between neighbours") {
  const std::vector<double> x{0.0, 1.0, 0.0, -1.0};
  const auto up = resample_linear(x, 8000, 16000);
  REQUIRE(up.size() == 8);
  CHECK(up[0] == 0.0);
  CHECK(up[1] == doctest::Approx(0.5));
  CHECK(up[2] == 1.0);
  CHECK(up[3] == doctest::Approx(0.5));
  CHECK(up[7] == -1.0);
  const auto down = resample_linear(testing::sine(100.0, 0.5, 1.0, 48000.0), 48000, 16000);
  CHECK(down.size() == 16000);
  const auto ref = testing::sine(100.0, 0.5, 1.0);
  for (std::size_t i = 0; i < down.size(); i += 97) CHECK(down[i] == doctest::Approx(ref[i]).epsilon(1e-9).scale(1e-9));
}
