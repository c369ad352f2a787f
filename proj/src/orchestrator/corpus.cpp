#include "affect/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "affect/canonical_json.hpp"

namespace affect::orchestrator {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kFadeSeconds = 0.005;

std::uint64_t mix(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double target_arousal(Emotion e) {
  switch (e) {
    case Emotion::joy: return 0.7;
    case Emotion::sadness: return 0.25;
    case Emotion::anger: return 0.8;
    case Emotion::fear: return 0.7;
    case Emotion::disgust: return 0.45;
    case Emotion::neutral: return 0.3;
  }
  return 0.3;
}

double mean_corruption(double snr_db) {
  // Noisier audio, noisier transcripts.
  return std::clamp(0.5 - 0.016 * snr_db, 0.0, 1.0);
}

const std::vector<std::string> kFillers = {"pues", "bueno", "eh", "mira", "oye", "este", "hoy", "entonces", "la verdad"};

std::vector<std::string> label_words(const text::Lexicon& lexicon, Emotion e) {
  std::vector<std::string> out;
  for (const auto& entry : lexicon.entries()) {
    if (entry.emotion == e && entry.lemma.find(' ') == std::string::npos) out.push_back(entry.lemma);
  }
  if (out.empty()) throw Error("lexicon has no single-word entry for " + std::string(to_string(e)));
  return out;
}

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

bool chance(double p, std::mt19937_64& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

std::vector<std::string> split(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

}  // namespace

double tone_frequency(Emotion label) noexcept {
  switch (label) {
    case Emotion::joy: return 320.0;
    case Emotion::sadness: return 140.0;
    case Emotion::anger: return 520.0;
    case Emotion::fear: return 700.0;
    case Emotion::disgust: return 240.0;
    case Emotion::neutral: return 200.0;
  }
  return 200.0;
}

std::vector<double> synthesize_audio(Emotion label, double target, double snr_db, double duration_s,
                                     std::uint64_t seed, const audio::AudioConfig& config) {
  if (!(snr_db > 0.0)) throw Error("synthetic SNR must be positive");
  const auto rate = static_cast<double>(audio::kSampleRate);
  const auto n = static_cast<std::size_t>(std::lround(duration_s * rate));
  if (n == 0) throw Error("synthetic duration too short");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // Bursts of 0.18-0.26 s separated by 0.10-0.13 s gaps leave enough
  // noise-only blocks for the block-energy noise floor.
  std::vector<double> tone(n, 0.0);
  const double f = tone_frequency(label) * (0.95 + 0.1 * unit(rng));
  const double phase = kTwoPi * unit(rng);
  const auto fade = static_cast<std::size_t>(kFadeSeconds * rate);
  std::size_t at = 0;
  while (at < n) {
    const auto burst = static_cast<std::size_t>((0.18 + 0.08 * unit(rng)) * rate);
    const auto gap = static_cast<std::size_t>((0.10 + 0.03 * unit(rng)) * rate);
    const auto end = std::min(n, at + burst);
    for (std::size_t i = at; i < end; ++i) {
      const double t = static_cast<double>(i) / rate;
      double env = 1.0;
      if (i - at < fade) env = static_cast<double>(i - at) / static_cast<double>(fade);
      if (end - i < fade) env = std::min(env, static_cast<double>(end - i) / static_cast<double>(fade));
      tone[i] = env * (std::sin(kTwoPi * f * t + phase) + 0.4 * std::sin(2.0 * kTwoPi * f * t + 2.0 * phase));
    }
    at = end + gap;
  }

  double signal_power = 0.0;
  for (double s : tone) signal_power += s * s;
  signal_power /= static_cast<double>(n);
  const double noise_sd = std::sqrt(signal_power / (std::pow(10.0, snr_db / 10.0) - 1.0));
  std::normal_distribution<double> noise(0.0, noise_sd);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = tone[i] + noise(rng);

  double peak = 0.0;
  for (double s : x) peak = std::max(peak, std::abs(s));
  for (double& s : x) s *= 0.9 / peak;

  // Scaling leaves ZCR, SNR and cepstral shape (c1..c12) unchanged, so one
  // measurement fixes the gain that lands arousal on target.
  const auto features = audio::extract_acoustic_features(audio::AudioBuffer(x), config);
  const double timbre_term = features.mfcc_present ? 0.05 * features.timbre_score : 0.0;
  const double rms_norm = std::max(0.0, target - timbre_term) / (0.9 + 0.1 * features.zcr_norm);
  const double rms_target = rms_norm * config.norm_factor * 0.92;
  double gain = features.rms > 0.0 ? rms_target / features.rms : 0.0;
  gain = std::min(gain, 0.99 / 0.9);
  for (double& s : x) s *= gain;
  return x;
}

std::string compose_transcript(Emotion label, const text::Lexicon& lexicon, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const auto words = label_words(lexicon, label);
  const std::vector<std::string> intensifiers = {"muy", "extremadamente", "sumamente", "totalmente", "algo", "un poco"};
  auto word = [&] {
    std::string w = pick(words, rng);
    if (chance(0.4, rng)) w = pick(intensifiers, rng) + " " + w;
    return w;
  };

  std::string sentence;
  if (chance(0.3, rng)) sentence = pick(kFillers, rng) + ", ";
  if (label == Emotion::sadness && chance(0.25, rng)) {
    sentence += "no estoy " + pick(label_words(lexicon, Emotion::joy), rng) + ", " + word();
  } else if (label == Emotion::neutral && chance(0.35, rng)) {
    static const std::vector<Emotion> absent = {Emotion::anger, Emotion::fear, Emotion::disgust};
    sentence += "no estoy " + pick(label_words(lexicon, pick(absent, rng)), rng) + ", " + pick(words, rng);
  } else {
    static const std::vector<std::string> openers = {"me siento", "estoy", "la verdad es que estoy", "hoy me siento"};
    sentence += pick(openers, rng) + " " + word();
    if (chance(0.5, rng)) sentence += " y " + word();
  }
  return sentence + ".";
}

std::string corrupt_transcript(const std::string& transcript, double corruption, Emotion label,
                               const text::Lexicon& lexicon, std::uint64_t seed) {
  if (corruption <= 0.0) return transcript;
  std::mt19937_64 rng(seed);
  std::vector<std::string> others;
  for (const auto& entry : lexicon.entries()) {
    if (entry.emotion != label && entry.lemma.find(' ') == std::string::npos) others.push_back(entry.lemma);
  }
  std::vector<std::string> out;
  for (const auto& w : split(transcript)) {
    if (!chance(corruption, rng)) {
      out.push_back(w);
      continue;
    }
    const double action = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (action < 0.4) continue;  // deletion
    if (action < 0.8 && !others.empty()) {
      out.push_back(pick(others, rng));  // substitution
    } else {
      out.push_back(w);
      out.push_back(pick(kFillers, rng));  // insertion
    }
  }
  std::string joined;
  for (const auto& w : out) joined += (joined.empty() ? "" : " ") + w;
  return joined;
}

std::vector<CorpusRow> generate_synthetic_corpus(const CorpusOptions& options, const text::Lexicon& lexicon,
                                                 const audio::AudioConfig& audio_config,
                                                 const std::filesystem::path& dir) {
  if (options.size == 0) throw Error("corpus size must be at least 1");
  if (options.snr_levels_db.empty()) throw Error("at least one SNR level is required");
  std::filesystem::create_directories(dir / "audio");

  std::vector<CorpusRow> rows;
  rows.reserve(options.size);
  for (std::size_t i = 0; i < options.size; ++i) {
    std::mt19937_64 rng(mix(options.seed, i));
    CorpusRow row;
    char id[32];
    std::snprintf(id, sizeof id, "row-%05zu", i + 1);
    row.id = id;
    row.audio = "audio/" + row.id + ".wav";
    row.label = kEmotions[i % kEmotionCount];
    row.snr_db = pick(options.snr_levels_db, rng);

    double c = 0.0;
    if (!chance(0.25, rng)) {
      c = mean_corruption(row.snr_db) + std::normal_distribution<double>(0.0, 0.1)(rng);
    }
    row.corruption = std::clamp(c, 0.0, options.max_corruption);

    const auto clean = compose_transcript(row.label, lexicon, rng());
    row.transcript = corrupt_transcript(clean, row.corruption, row.label, lexicon, rng());
    const double conf = 0.97 - 0.6 * row.corruption + std::normal_distribution<double>(0.0, 0.05)(rng);
    row.asr_confidence = std::clamp(std::round(conf * 1e4) / 1e4, 0.05, 0.99);

    const double arousal =
        std::clamp(target_arousal(row.label) + std::normal_distribution<double>(0.0, 0.06)(rng), 0.05, 0.95);
    const auto samples = synthesize_audio(row.label, arousal, row.snr_db, options.duration_s, rng(), audio_config);
    audio::write_wav_pcm16(dir / row.audio, samples);
    rows.push_back(std::move(row));
  }
  write_manifest(rows, dir / "manifest.jsonl");
  return rows;
}

void write_manifest(const std::vector<CorpusRow>& rows, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const auto& r : rows) {
    audit::Json j = {{"id", r.id},
                     {"audio", r.audio},
                     {"transcript", r.transcript},
                     {"asr_confidence", r.asr_confidence},
                     {"label", std::string(to_string(r.label))},
                     {"corruption", r.corruption},
                     {"snr_db", r.snr_db}};
    out << audit::canonicalize(j) << "\n";
  }
  if (!out) throw Error("cannot write manifest " + path.string());
}

}  // namespace affect::orchestrator
