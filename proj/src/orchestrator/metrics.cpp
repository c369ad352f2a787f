#include "affect/metrics.hpp"

#include <charconv>
#include <cmath>

namespace affect::orchestrator {

namespace {

std::string number(double v) {
  if (std::isnan(v)) return "NaN";
  if (std::isinf(v)) return v > 0 ? "+Inf" : "-Inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string escape_label_value(std::string_view v) {
  std::string out;
  out.reserve(v.size());
  for (char c : v) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

MetricsRegistry::MetricsRegistry(std::string model_size, std::string run_id)
    : model_size_(std::move(model_size)), run_id_(std::move(run_id)) {
  for (auto stage : {"asr", "audio_emotion", "text_emotion", "fusion"}) histograms_[stage];
  counters_[std::string(kPiiRedactions)] = 0.0;
  counters_[std::string(kPipelineErrors)] = 0.0;
}

void MetricsRegistry::observe_latency(std::string_view stage, double seconds) {
  std::lock_guard lock(mutex_);
  auto it = histograms_.find(stage);
  if (it == histograms_.end()) it = histograms_.emplace(std::string(stage), Histogram{}).first;
  auto& h = it->second;
  for (std::size_t i = 0; i < kLatencyBuckets.size(); ++i) {
    if (seconds <= kLatencyBuckets[i]) {
      ++h.counts[i];
      break;
    }
  }
  ++h.count;
  h.sum += seconds;
}

void MetricsRegistry::increment(std::string_view counter, double by) {
  std::lock_guard lock(mutex_);
  auto it = counters_.find(counter);
  if (it == counters_.end()) it = counters_.emplace(std::string(counter), 0.0).first;
  it->second += by;
}

void MetricsRegistry::set_gauge(std::string_view gauge, double value) {
  std::lock_guard lock(mutex_);
  auto it = gauges_.find(gauge);
  if (it == gauges_.end()) it = gauges_.emplace(std::string(gauge), 0.0).first;
  it->second = value;
}

double MetricsRegistry::counter(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto it = counters_.find(name);
  return it == counters_.end() ? 0.0 : it->second;
}

std::optional<double> MetricsRegistry::gauge(std::string_view name) const {
  std::lock_guard lock(mutex_);
  auto it = gauges_.find(name);
  if (it == gauges_.end()) return std::nullopt;
  return it->second;
}

std::optional<HistogramSnapshot> MetricsRegistry::latency(std::string_view stage) const {
  std::lock_guard lock(mutex_);
  auto it = histograms_.find(stage);
  if (it == histograms_.end()) return std::nullopt;
  HistogramSnapshot s;
  std::uint64_t running = 0;
  for (auto c : it->second.counts) s.buckets.push_back(running += c);
  s.count = it->second.count;
  s.sum = it->second.sum;
  return s;
}

std::string MetricsRegistry::exposition() const {
  std::lock_guard lock(mutex_);
  const std::string base =
      "model_size=\"" + escape_label_value(model_size_) + "\",run_id=\"" + escape_label_value(run_id_) + "\"";
  std::string out;

  out += "# HELP " + std::string(kStageLatency) + " Wall time spent in each pipeline stage.\n";
  out += "# TYPE " + std::string(kStageLatency) + " histogram\n";
  for (const auto& [stage, h] : histograms_) {
    const std::string labels = base + ",stage=\"" + escape_label_value(stage) + "\"";
    std::uint64_t running = 0;
    for (std::size_t i = 0; i < kLatencyBuckets.size(); ++i) {
      running += h.counts[i];
      out += std::string(kStageLatency) + "_bucket{" + labels + ",le=\"" + number(kLatencyBuckets[i]) + "\"} " +
             std::to_string(running) + "\n";
    }
    out += std::string(kStageLatency) + "_bucket{" + labels + ",le=\"+Inf\"} " + std::to_string(h.count) + "\n";
    out += std::string(kStageLatency) + "_sum{" + labels + "} " + number(h.sum) + "\n";
    out += std::string(kStageLatency) + "_count{" + labels + "} " + std::to_string(h.count) + "\n";
  }
  for (const auto& [name, value] : counters_) {
    out += "# TYPE " + name + " counter\n";
    out += name + "{" + base + "} " + number(value) + "\n";
  }
  for (const auto& [name, value] : gauges_) {
    out += "# TYPE " + name + " gauge\n";
    out += name + "{" + base + "} " + number(value) + "\n";
  }
  return out;
}

}  // namespace affect::orchestrator
