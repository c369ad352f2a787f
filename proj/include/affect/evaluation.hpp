#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "affect/canonical_json.hpp"
#include "affect/core.hpp"
#include "affect/pipeline.hpp"

namespace affect::orchestrator {

using audit::Json;

struct ManifestRow {
  std::string id;
  std::filesystem::path audio;  // resolved against the manifest directory
  std::string transcript;
  double asr_confidence = 1.0;
  Emotion label = Emotion::neutral;
  Json extra = Json::object();  // fields beyond the required five
};

/// JSONL with {id, audio, transcript, asr_confidence, label} per line.
std::vector<ManifestRow> load_manifest(const std::filesystem::path& path);

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

using ConfusionMatrix = std::array<std::array<std::size_t, kEmotionCount>, kEmotionCount>;  // [gold][pred]

/// Precision/recall/F1 with zero for undefined ratios. Macro averages run
/// over labels present in gold or predictions; weighted averages use gold
/// support.
struct ClassificationMetrics {
  std::size_t rows = 0;
  double accuracy = 0.0;
  std::map<Emotion, ClassMetrics> per_class;  // every label seen in gold or predictions
  ClassMetrics macro;
  ClassMetrics weighted;
  ConfusionMatrix confusion{};

  /// Row-normalized by gold count; all-zero rows stay zero.
  std::array<std::array<double, kEmotionCount>, kEmotionCount> normalized_confusion() const;
};

ClassificationMetrics compute_metrics(const std::vector<Emotion>& gold, const std::vector<Emotion>& predicted);

Json to_json(const ClassificationMetrics& m);
std::string confusion_csv(const ClassificationMetrics& m);

enum class Variant { text_only, audio_only, linear, fuzzy };
enum class Ablation { no_text, no_audio, no_gating, fixed_weight };

std::string_view to_string(Variant v) noexcept;
std::string_view to_string(Ablation a) noexcept;
std::optional<Variant> parse_variant(std::string_view s);
std::optional<Ablation> parse_ablation(std::string_view s);

struct Disagreement {
  std::size_t fuzzy_corrects = 0;   // fuzzy right, other wrong
  std::size_t other_corrects = 0;   // other right, fuzzy wrong
  std::size_t both_correct = 0;
  std::size_t both_wrong = 0;
};

struct RowOutcome {
  std::string id;
  Emotion gold = Emotion::neutral;
  std::map<std::string, Emotion> predictions;  // variant/ablation name -> label
  double w_text = 0.0;
  std::string mode;
};

struct EvaluationReport {
  std::size_t rows_total = 0;
  std::size_t rows_evaluated = 0;
  std::size_t rows_skipped = 0;
  std::map<std::string, ClassificationMetrics> results;  // variant/ablation name -> metrics
  std::map<std::string, Disagreement> disagreement;      // vs fuzzy, when fuzzy ran
  std::vector<RowOutcome> outcomes;

  Json to_json() const;
};

struct EvaluationOptions {
  std::vector<Variant> variants{Variant::text_only, Variant::audio_only, Variant::linear, Variant::fuzzy};
  std::vector<Ablation> ablations;
};

/// Runs every row through the pipeline (one session per row) and scores
/// each requested variant and ablation on the same channel outputs.
EvaluationReport run_batch_eval(const std::vector<ManifestRow>& manifest, Pipeline& pipeline,
                                const EvaluationOptions& options = {});

/// Writes report.json and confusion_<name>.csv into dir.
void write_report(const EvaluationReport& report, const std::filesystem::path& dir);

}  // namespace affect::orchestrator
