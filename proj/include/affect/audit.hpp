#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "affect/audio.hpp"
#include "affect/canonical_json.hpp"
#include "affect/core.hpp"
#include "affect/fusion.hpp"
#include "affect/guardrails.hpp"

namespace affect::audit {

// ---- PII redaction ------------------------------------------------------

using RedactionReport = std::map<std::string, std::size_t>;

struct RedactionResult {
  std::string text;
  RedactionReport report;

  std::size_t total() const noexcept;
};

struct PiiPattern {
  std::string name;  // EMAIL, PHONE, ID
  std::regex pattern;
};

/// Replaces matches with "[REDACTED:<class>]". Patterns apply in order, so an
/// earlier class claims its span before later ones see it.
class PiiRedactor {
 public:
  PiiRedactor();  // EMAIL, PHONE, ID (7-9 digit runs)
  explicit PiiRedactor(std::vector<PiiPattern> patterns) : patterns_(std::move(patterns)) {}

  RedactionResult redact(std::string_view text) const;

 private:
  std::vector<PiiPattern> patterns_;
};

void merge_into(RedactionReport& into, const RedactionReport& from);

// ---- Audit event --------------------------------------------------------

struct ChannelOutput {
  EmotionDistribution distribution;
  VadState vad;
  double confidence = 0.0;
  Metadata metadata;
};

/// PII-redacted record of one inference. The canonical serialization of
/// to_json() is the stored artifact; its SHA-256 is the txid.
struct AuditEvent {
  std::string event_id;
  std::string timestamp;
  std::string run_id;
  std::string model_size;
  std::string rule_base_id;
  std::string session_id;
  double asr_conf = 0.0;           // as reported by the ASR adapter
  double asr_conf_adjusted = 0.0;  // after the SNR penalty
  ChannelOutput audio;
  ChannelOutput text;
  fusion::FusionOutcome fusion;
  audio::AcousticFeatures acoustic;
  std::string transcript;  // redacted
  std::string response;
  std::optional<guardrails::Escalation> escalation;  // set only when triggered
  std::string escalation_notification = "disabled";  // "pending" when a webhook will be called
  RedactionReport redaction;

  Json to_json() const;
};

Json to_json(const EmotionDistribution& dist);
Json to_json(const VadState& vad);
Json to_json(const fuzzy::FuzzyTrace& trace);
Json to_json(const Metadata& metadata);

// ---- Append-only JSONL log ------------------------------------------------

class AuditWriteError : public Error {
 public:
  using Error::Error;
};

/// Single-writer JSONL appender. Each append is one write(2) on an O_APPEND
/// descriptor, serialized by a mutex; `sync` adds an fsync per record.
class AuditLog {
 public:
  explicit AuditLog(std::filesystem::path path, bool sync = false);
  ~AuditLog();
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  /// Appends bytes + '\n' and returns the 1-based line number.
  std::size_t append(std::string_view canonical_bytes);

  const std::filesystem::path& path() const noexcept { return path_; }
  std::size_t lines() const;

 private:
  std::filesystem::path path_;
  bool sync_ = false;
  int fd_ = -1;
  mutable std::mutex mutex_;
  std::size_t lines_ = 0;
};

std::size_t append_audit_log(std::string_view canonical_bytes, const std::filesystem::path& log_path);

/// Writes the exact canonical bytes to <dir>/<txid>.json.
std::filesystem::path store_event_file(std::string_view canonical_bytes, const std::string& txid,
                                       const std::filesystem::path& dir);

// ---- Explainability artifacts ---------------------------------------------

class ExportError : public Error {
 public:
  using Error::Error;
};

struct ArtifactPaths {
  std::filesystem::path json;
  std::filesystem::path csv;
  std::filesystem::path ppm;
};

inline constexpr int kHeatmapCellPixels = 16;

/// Rules x (conditions + strength) matrix; cells hold membership degrees,
/// empty (nullopt) where a rule does not use a condition.
struct RuleConditionMatrix {
  std::vector<std::string> rules;
  std::vector<std::string> conditions;
  std::vector<std::vector<std::optional<double>>> cells;  // rules x conditions
  std::vector<double> strengths;
};

RuleConditionMatrix rule_condition_matrix(const Json& fusion_fuzzy);

/// Binary PPM (P6), 16x16 px per cell, gray level round(255 * value).
std::string render_heatmap_ppm(const RuleConditionMatrix& matrix);
std::string render_matrix_csv(const RuleConditionMatrix& matrix);

/// Writes <txid>.json ({txid, fired_rules, inputs, out_sets}), <txid>.csv and
/// <txid>.ppm into dir. Requires mode == fuzzy; throws ExportError otherwise
/// or on I/O failure.
ArtifactPaths export_explainability_artifact(const Json& event, const std::string& txid,
                                             const std::filesystem::path& dir);

}  // namespace affect::audit
