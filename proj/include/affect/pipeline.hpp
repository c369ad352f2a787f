#pragma once

#include <chrono>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "affect/audit.hpp"
#include "affect/clock.hpp"
#include "affect/config.hpp"
#include "affect/ledger.hpp"
#include "affect/metrics.hpp"
#include "affect/text.hpp"

namespace affect::orchestrator {

struct TurnInput {
  std::filesystem::path audio_path;
  std::optional<audio::AudioBuffer> audio;  // used instead of audio_path when set
  std::string transcript;
  double asr_confidence = 1.0;
  std::string session_id = "default";
};

struct AsrResult {
  std::string transcript;
  double confidence = 0.0;
};

/// Speech recognizer boundary. The built-in adapter passes through the
/// transcript and confidence already present on the input.
class AsrAdapter {
 public:
  virtual ~AsrAdapter() = default;
  virtual AsrResult transcribe(const TurnInput& input, const audio::AudioBuffer& audio) = 0;
};

class ManifestAsr final : public AsrAdapter {
 public:
  AsrResult transcribe(const TurnInput& input, const audio::AudioBuffer& audio) override;
};

using StageTimings = std::map<std::string, double>;  // seconds

struct TurnResult {
  std::string response;
  audit::AuditEvent event;
  std::string canonical;  // stored bytes
  std::string txid;
  std::size_t log_line = 0;
  audit::AnchorRecord anchor;
  std::optional<audit::ArtifactPaths> artifacts;
  std::optional<std::filesystem::path> event_file;
  StageTimings timings;
  std::chrono::steady_clock::time_point responded_at;
};

/// Everything loaded from the config's referenced files.
struct PipelineResources {
  fuzzy::RuleBase rule_base;
  text::TextResources text;
  guardrails::ResponseTemplates templates;
  guardrails::GuardrailConfig guardrails;

  static PipelineResources load(const PipelineConfig& config);
};

class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config, std::shared_ptr<const Clock> clock = nullptr,
                    std::shared_ptr<AsrAdapter> asr = nullptr);
  Pipeline(PipelineConfig config, PipelineResources resources, std::shared_ptr<const Clock> clock = nullptr,
           std::shared_ptr<AsrAdapter> asr = nullptr);
  ~Pipeline();
  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  /// One full turn. Throws on audio decode errors and audit write failures
  /// (both counted in pipeline_errors_total); fuzzy failures fall back.
  TurnResult run_turn(const TurnInput& input);

  /// Waits for outstanding escalation webhook deliveries.
  std::vector<guardrails::DeliveryReport> drain_notifications();

  MetricsRegistry& metrics() noexcept { return metrics_; }
  audit::SimulatedLedger* ledger() noexcept { return ledger_.get(); }
  const PipelineConfig& config() const noexcept { return config_; }
  const PipelineResources& resources() const noexcept { return resources_; }

 private:
  std::shared_ptr<std::mutex> session_lock(const std::string& session_id);

  PipelineConfig config_;
  PipelineResources resources_;
  std::shared_ptr<const Clock> clock_;
  std::shared_ptr<AsrAdapter> asr_;
  MetricsRegistry metrics_;
  audit::PiiRedactor redactor_;
  audit::AuditLog log_;
  std::unique_ptr<audit::SimulatedLedger> ledger_;

  std::mutex sessions_mutex_;
  std::map<std::string, std::shared_ptr<std::mutex>> session_locks_;
  std::map<std::string, audio::ArousalSmoother> smoothers_;
  std::uint64_t sequence_ = 0;

  std::mutex notify_mutex_;
  std::vector<std::future<guardrails::DeliveryReport>> notifications_;
};

}  // namespace affect::orchestrator
