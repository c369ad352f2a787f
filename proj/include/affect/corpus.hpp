#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "affect/audio.hpp"
#include "affect/core.hpp"
#include "affect/text.hpp"

namespace affect::orchestrator {

struct CorpusOptions {
  std::uint64_t seed = 7;
  std::size_t size = 500;
  std::vector<double> snr_levels_db{5.0, 10.0, 20.0, 30.0};
  double duration_s = 1.0;
  double max_corruption = 0.7;
};

struct CorpusRow {
  std::string id;
  std::string audio;  // relative to the manifest directory
  std::string transcript;
  double asr_confidence = 1.0;
  Emotion label = Emotion::neutral;
  double corruption = 0.0;  // fraction of transcript words damaged, in [0, 1]
  double snr_db = 0.0;      // requested
};

/// Frequency of the tone bursts for each label.
double tone_frequency(Emotion label) noexcept;

/// Tone bursts separated by noise-only gaps plus white noise at snr_db, then
/// scaled so the extracted arousal lands on target_arousal.
std::vector<double> synthesize_audio(Emotion label, double target_arousal, double snr_db, double duration_s,
                                     std::uint64_t seed, const audio::AudioConfig& config);

/// A lexicon-decodable sentence for the label: its words all map to that
/// label after negation and intensifiers are applied.
std::string compose_transcript(Emotion label, const text::Lexicon& lexicon, std::uint64_t seed);

/// Deletes, substitutes (with another label's words) or pads words with
/// filler, each word independently with probability `corruption`.
std::string corrupt_transcript(const std::string& transcript, double corruption, Emotion label,
                               const text::Lexicon& lexicon, std::uint64_t seed);

/// Writes <dir>/audio/<id>.wav and <dir>/manifest.jsonl; deterministic in the seed.
std::vector<CorpusRow> generate_synthetic_corpus(const CorpusOptions& options, const text::Lexicon& lexicon,
                                                 const audio::AudioConfig& audio_config,
                                                 const std::filesystem::path& dir);

void write_manifest(const std::vector<CorpusRow>& rows, const std::filesystem::path& path);

}  // namespace affect::orchestrator
