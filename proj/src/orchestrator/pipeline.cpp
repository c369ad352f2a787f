#include "affect/pipeline.hpp"

#include <cstdio>

#include "affect/crypto.hpp"

namespace affect::orchestrator {

namespace {

using SteadyClock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer(StageTimings& timings, MetricsRegistry& metrics, std::string stage)
      : timings_(timings), metrics_(metrics), stage_(std::move(stage)), start_(SteadyClock::now()) {}
  ~StageTimer() {
    const double s = std::chrono::duration<double>(SteadyClock::now() - start_).count();
    timings_[stage_] = s;
    metrics_.observe_latency(stage_, s);
  }
  StageTimer(const StageTimer&) = delete;
  StageTimer& operator=(const StageTimer&) = delete;

 private:
  StageTimings& timings_;
  MetricsRegistry& metrics_;
  std::string stage_;
  SteadyClock::time_point start_;
};

template <class F>
auto timed(StageTimings& timings, MetricsRegistry& metrics, std::string stage, F&& f) {
  StageTimer timer(timings, metrics, std::move(stage));
  return f();
}

audit::ChannelOutput channel(const EmotionResult& r) { return {r.distribution, r.vad, r.confidence, r.metadata}; }

void redact_metadata(Metadata& metadata, const audit::PiiRedactor& redactor) {
  for (auto& [key, value] : metadata) {
    if (auto* s = std::get_if<std::string>(&value)) *s = redactor.redact(*s).text;
  }
}

}  // namespace

AsrResult ManifestAsr::transcribe(const TurnInput& input, const audio::AudioBuffer&) {
  return {input.transcript, input.asr_confidence};
}

PipelineResources PipelineResources::load(const PipelineConfig& config) {
  PipelineResources r;
  r.rule_base = fuzzy::RuleBase::load_yaml(config.rule_base);
  r.text.lexicon = text::Lexicon::load_tsv(config.text.lexicon);
  if (config.text.lemmas) r.text.lemmas = text::LemmaDictionary::load_tsv(*config.text.lemmas);
  if (!config.text.negation_markers.empty()) {
    r.text.negation_markers.clear();
    for (const auto& m : config.text.negation_markers) r.text.negation_markers.insert(text::to_lower(m));
  }
  if (!config.text.intensifiers.empty()) r.text.intensifiers = text::IntensifierTable(config.text.intensifiers);
  r.text.negation_scope = config.text.negation_scope;
  if (config.guardrails.templates) r.templates = guardrails::ResponseTemplates::load(*config.guardrails.templates);
  r.guardrails = config.guardrails.rules;
  if (config.guardrails.keywords) r.guardrails.keywords = guardrails::load_keywords(*config.guardrails.keywords);
  return r;
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<const Clock> clock, std::shared_ptr<AsrAdapter> asr)
    : Pipeline(config, PipelineResources::load(config), std::move(clock), std::move(asr)) {}

Pipeline::Pipeline(PipelineConfig config, PipelineResources resources, std::shared_ptr<const Clock> clock,
                   std::shared_ptr<AsrAdapter> asr)
    : config_(std::move(config)),
      resources_(std::move(resources)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()),
      asr_(asr ? std::move(asr) : std::make_shared<ManifestAsr>()),
      metrics_(config_.model_size, config_.run_id),
      log_(config_.audit.log_path, config_.audit.fsync) {
  if (config_.anchoring.enabled) ledger_ = std::make_unique<audit::SimulatedLedger>(config_.anchoring.ledger, clock_);
}

Pipeline::~Pipeline() { drain_notifications(); }

std::shared_ptr<std::mutex> Pipeline::session_lock(const std::string& session_id) {
  std::lock_guard lock(sessions_mutex_);
  auto& m = session_locks_[session_id];
  if (!m) m = std::make_shared<std::mutex>();
  return m;
}

TurnResult Pipeline::run_turn(const TurnInput& input) {
  const auto session = session_lock(input.session_id);
  std::lock_guard turn_lock(*session);
  try {
    TurnResult out;
    auto& timings = out.timings;

    const audio::AudioBuffer buffer = input.audio ? *input.audio : audio::read_wav(input.audio_path);

    const AsrResult asr = timed(timings, metrics_, "asr", [&] { return asr_->transcribe(input, buffer); });
    if (!(asr.confidence >= 0.0 && asr.confidence <= 1.0)) throw Error("asr_confidence must be in [0, 1]");

    audio::ArousalSmoother smoother(config_.audio.alpha_ema);
    std::string event_id;
    {
      std::lock_guard lock(sessions_mutex_);
      if (auto it = smoothers_.find(input.session_id); it != smoothers_.end()) smoother = it->second;
      char buf[32];
      std::snprintf(buf, sizeof buf, "%08llu", static_cast<unsigned long long>(++sequence_));
      event_id = config_.run_id + "-" + buf;
    }

    const auto heard = timed(timings, metrics_, "audio_emotion",
                             [&] { return audio::audio_emotion(buffer, smoother, config_.audio); });
    {
      std::lock_guard lock(sessions_mutex_);
      smoothers_.insert_or_assign(input.session_id, heard.smoother);
    }

    const auto read = timed(timings, metrics_, "text_emotion",
                            [&] { return text::text_emotion(asr.transcript, resources_.text); });

    const double adjusted = fusion::adjust_asr_confidence(asr.confidence, heard.features.snr_db, config_.snr_penalty);
    fusion::FusionOptions options;
    if (config_.range_normalized_coherence) options.coherence = fusion::CoherenceVariant::range_normalized;
    const auto fused = timed(timings, metrics_, "fusion", [&] {
      return fusion::fuse(read, heard.result, adjusted, resources_.rule_base, options);
    });
    if (fused.mode == fusion::FusionMode::linear_fallback) metrics_.increment("fusion_fallbacks_total");

    const std::string timestamp = format_iso8601(clock_->now());
    auto escalation = timed(timings, metrics_, "guardrails", [&] {
      return guardrails::evaluate_guardrails(fused, asr.transcript, resources_.guardrails, timestamp);
    });
    out.response = timed(timings, metrics_, "response", [&] {
      return guardrails::plan_response(fused, escalation, resources_.templates, resources_.guardrails);
    });

    {
      StageTimer timer(timings, metrics_, "audit");
      const auto redacted = redactor_.redact(asr.transcript);

      auto& ev = out.event;
      ev.event_id = event_id;
      ev.timestamp = timestamp;
      ev.run_id = config_.run_id;
      ev.model_size = config_.model_size;
      ev.rule_base_id = resources_.rule_base.id;
      ev.session_id = input.session_id;
      ev.asr_conf = asr.confidence;
      ev.asr_conf_adjusted = adjusted;
      ev.audio = channel(heard.result);
      ev.text = channel(read);
      redact_metadata(ev.text.metadata, redactor_);
      ev.fusion = fused;
      ev.acoustic = heard.features;
      ev.transcript = redacted.text;
      ev.response = out.response;
      ev.redaction = redacted.report;
      if (escalation.triggered) {
        ev.escalation = escalation;
        ev.escalation_notification = config_.guardrails.escalation_webhook ? "pending" : "disabled";
      }

      out.canonical = audit::canonicalize(ev.to_json());
      out.txid = audit::compute_txid(out.canonical);
      out.log_line = log_.append(out.canonical);
      if (config_.audit.store_event_files) {
        out.event_file = audit::store_event_file(out.canonical, out.txid, config_.audit.events_dir);
      }
      if (config_.audit.export_artifacts && fused.mode == fusion::FusionMode::fuzzy) {
        try {
          out.artifacts = audit::export_explainability_artifact(ev.to_json(), out.txid, config_.audit.artifacts_dir);
        } catch (const audit::ExportError&) {
          metrics_.increment("explainability_export_errors_total");
        }
      }
      metrics_.increment(kPiiRedactions, static_cast<double>(redacted.total()));
    }

    out.anchor = timed(timings, metrics_, "anchor_submit", [&] { return audit::anchor_txid(out.txid, ledger_.get()); });

    metrics_.set_gauge(kSnrGauge, heard.features.snr_db);
    metrics_.set_gauge(kCoherenceGauge, fused.coherence);
    if (escalation.triggered) {
      metrics_.increment("escalations_total");
      if (config_.guardrails.escalation_webhook) {
        const auto url = config_.guardrails.escalation_webhook;
        const auto timeout = std::chrono::milliseconds(config_.guardrails.webhook_timeout_ms);
        auto task = std::async(std::launch::async, [this, escalation, txid = out.txid, url, timeout]() mutable {
          auto report = guardrails::notify_escalation(escalation, txid, config_.run_id, url, timeout);
          if (report.status == guardrails::DeliveryStatus::failed) {
            metrics_.increment("webhook_failures_total");
            metrics_.increment(kPipelineErrors);
          }
          return report;
        });
        std::lock_guard lock(notify_mutex_);
        notifications_.push_back(std::move(task));
      }
    }

    out.responded_at = SteadyClock::now();
    return out;
  } catch (...) {
    metrics_.increment(kPipelineErrors);
    throw;
  }
}

std::vector<guardrails::DeliveryReport> Pipeline::drain_notifications() {
  std::vector<std::future<guardrails::DeliveryReport>> pending;
  {
    std::lock_guard lock(notify_mutex_);
    pending.swap(notifications_);
  }
  std::vector<guardrails::DeliveryReport> reports;
  for (auto& f : pending) reports.push_back(f.get());
  return reports;
}

}  // namespace affect::orchestrator
