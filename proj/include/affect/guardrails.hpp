#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "affect/core.hpp"
#include "affect/fusion.hpp"

namespace affect::guardrails {

struct ProbabilityThreshold {
  Emotion emotion = Emotion::fear;
  double threshold = 0.7;
};

struct GuardrailConfig {
  std::vector<ProbabilityThreshold> thresholds{{Emotion::fear, 0.7}, {Emotion::sadness, 0.85}};
  std::vector<std::string> keywords;
  double hedge_probability = 0.5;
  double hedge_coherence = 0.4;
};

struct Escalation {
  bool triggered = false;
  std::vector<std::string> reasons;  // "fear>0.7" or "keyword:<phrase>"
  bool notified = false;
  std::string timestamp;
};

/// Runs after fusion and before response planning. Keywords match as
/// case- and diacritic-insensitive substrings of the transcript.
Escalation evaluate_guardrails(const fusion::FusionOutcome& fused, std::string_view transcript,
                               const GuardrailConfig& config, std::string timestamp);

/// One phrase per line; blank lines and '#' comments ignored.
std::vector<std::string> load_keywords(const std::filesystem::path& path);

enum class DeliveryStatus { skipped, delivered, failed };
std::string_view to_string(DeliveryStatus status) noexcept;

struct DeliveryReport {
  DeliveryStatus status = DeliveryStatus::skipped;
  int http_status = 0;
  std::string error;
};

/// JSON body {txid, reasons, timestamp, run_id}.
std::string webhook_payload(const Escalation& escalation, const std::string& txid, const std::string& run_id);

/// POSTs the escalation to an http:// webhook. Never throws; failures are
/// reported in the returned status. On 2xx sets escalation.notified.
DeliveryReport notify_escalation(Escalation& escalation, const std::string& txid, const std::string& run_id,
                                 const std::optional<std::string>& webhook_url,
                                 std::chrono::milliseconds timeout = std::chrono::milliseconds(2000));

/// Plain and hedged template per emotion plus one safe-handoff message.
class ResponseTemplates {
 public:
  ResponseTemplates();  // built-in Spanish defaults

  /// Lines of the form "<emotion>.plain = text", "<emotion>.hedged = text",
  /// "safe_handoff = text". Unspecified keys keep their defaults.
  static ResponseTemplates load(const std::filesystem::path& path);
  static ResponseTemplates parse(std::string_view content);

  const std::string& plain(Emotion e) const noexcept { return plain_[index_of(e)]; }
  const std::string& hedged(Emotion e) const noexcept { return hedged_[index_of(e)]; }
  const std::string& safe_handoff() const noexcept { return safe_handoff_; }

 private:
  std::array<std::string, kEmotionCount> plain_;
  std::array<std::string, kEmotionCount> hedged_;
  std::string safe_handoff_;
};

/// Escalation overrides everything; otherwise the dominant emotion's template,
/// hedged when the dominant probability or the coherence falls below the
/// configured thresholds.
std::string plan_response(const fusion::FusionOutcome& fused, const Escalation& escalation,
                          const ResponseTemplates& templates, const GuardrailConfig& config = {});

}  // namespace affect::guardrails
