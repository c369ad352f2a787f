#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "affect/audio.hpp"
#include "affect/fusion.hpp"
#include "affect/guardrails.hpp"
#include "affect/ledger.hpp"

namespace affect::orchestrator {

/// Invalid or missing configuration; key() is the dotted path (audio.alpha_ema).
class ConfigError : public Error {
 public:
  ConfigError(std::string key, const std::string& message)
      : Error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

struct TextConfig {
  std::filesystem::path lexicon;
  std::optional<std::filesystem::path> lemmas;
  std::vector<std::string> negation_markers;                // empty: built-in list
  std::vector<std::pair<std::string, double>> intensifiers;  // empty: built-in table
  std::size_t negation_scope = 3;
};

struct GuardrailSettings {
  guardrails::GuardrailConfig rules;
  std::optional<std::filesystem::path> keywords;
  std::optional<std::filesystem::path> templates;
  std::optional<std::string> escalation_webhook;
  int webhook_timeout_ms = 2000;
};

struct AuditSettings {
  std::filesystem::path log_path = "audit/events.jsonl";
  std::filesystem::path events_dir = "audit/events";
  std::filesystem::path artifacts_dir = "audit/fired_rules";
  bool export_artifacts = true;
  bool store_event_files = true;
  bool fsync = false;
};

struct AnchoringSettings {
  bool enabled = false;
  audit::LedgerConfig ledger;
};

struct MetricsSettings {
  int port = 9464;
  std::optional<std::filesystem::path> output;
};

struct PipelineConfig {
  std::string run_id = "local";
  std::string model_size = "small";
  audio::AudioConfig audio;
  fusion::SnrPenalty snr_penalty;
  std::filesystem::path rule_base;
  bool range_normalized_coherence = false;
  TextConfig text;
  GuardrailSettings guardrails;
  AuditSettings audit;
  AnchoringSettings anchoring;
  MetricsSettings metrics;
};

using Environment = std::map<std::string, std::string>;

/// APP__* variables of the current process.
Environment process_environment();

/// Parses YAML, applies APP__SECTION__KEY overrides (case-insensitive keys,
/// double underscore nests), validates ranges and that referenced files exist.
/// Relative paths resolve against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path, const Environment& env = process_environment());
PipelineConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir,
                            const Environment& env = {});

/// Built-in configuration rooted at a data directory (rules/, lexicon.tsv, ...).
PipelineConfig default_config(const std::filesystem::path& data_dir);

}  // namespace affect::orchestrator
