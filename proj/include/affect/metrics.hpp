#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affect::orchestrator {

inline constexpr std::array<double, 13> kLatencyBuckets{0.001, 0.0025, 0.005, 0.01, 0.025, 0.05, 0.1,
                                                        0.25,  0.5,    1.0,   2.5,  5.0,   10.0};

inline constexpr std::string_view kStageLatency = "pipeline_stage_latency_seconds";
inline constexpr std::string_view kPiiRedactions = "pii_redactions_total";
inline constexpr std::string_view kPipelineErrors = "pipeline_errors_total";
inline constexpr std::string_view kSnrGauge = "audio_snr_db";
inline constexpr std::string_view kCoherenceGauge = "cross_modal_coherence";

struct HistogramSnapshot {
  std::vector<std::uint64_t> buckets;  // cumulative, aligned with kLatencyBuckets
  std::uint64_t count = 0;
  double sum = 0.0;
};

/// Thread-safe counters, gauges and per-stage latency histograms. Every
/// series carries the model_size and run_id labels.
class MetricsRegistry {
 public:
  MetricsRegistry(std::string model_size, std::string run_id);

  void observe_latency(std::string_view stage, double seconds);
  void increment(std::string_view counter, double by = 1.0);
  void set_gauge(std::string_view gauge, double value);

  double counter(std::string_view name) const;
  std::optional<double> gauge(std::string_view name) const;
  std::optional<HistogramSnapshot> latency(std::string_view stage) const;

  /// Prometheus text exposition format 0.0.4.
  std::string exposition() const;

 private:
  struct Histogram {
    std::array<std::uint64_t, kLatencyBuckets.size()> counts{};  // non-cumulative
    std::uint64_t count = 0;
    double sum = 0.0;
  };

  std::string model_size_;
  std::string run_id_;
  mutable std::mutex mutex_;
  std::map<std::string, double, std::less<>> counters_;
  std::map<std::string, double, std::less<>> gauges_;
  std::map<std::string, Histogram, std::less<>> histograms_;
};

std::string escape_label_value(std::string_view v);

}  // namespace affect::orchestrator
