#include <httplib.h>

#include <json.hpp>
#include <regex>

#include "affect/guardrails.hpp"

namespace affect::guardrails {

std::string_view to_string(DeliveryStatus status) noexcept {
  switch (status) {
    case DeliveryStatus::skipped:
      return "skipped";
    case DeliveryStatus::delivered:
      return "delivered";
    case DeliveryStatus::failed:
      return "failed";
  }
  return "failed";
}

std::string webhook_payload(const Escalation& escalation, const std::string& txid, const std::string& run_id) {
  nlohmann::json body = {
      {"txid", txid},
      {"reasons", escalation.reasons},
      {"timestamp", escalation.timestamp},
      {"run_id", run_id},
  };
  return body.dump();
}

DeliveryReport notify_escalation(Escalation& escalation, const std::string& txid, const std::string& run_id,
                                 const std::optional<std::string>& webhook_url, std::chrono::milliseconds timeout) {
  DeliveryReport report;
  if (!webhook_url || webhook_url->empty() || !escalation.triggered) return report;

  static const std::regex url_re(R"(^(http://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(*webhook_url, m, url_re)) {
    report.status = DeliveryStatus::failed;
    report.error = "unsupported webhook URL (http:// only): " + *webhook_url;
    return report;
  }
  const std::string origin = m[1].str();
  const std::string path = m[2].matched ? m[2].str() : "/";

  try {
    httplib::Client client(origin);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    auto res = client.Post(path, webhook_payload(escalation, txid, run_id), "application/json");
    if (!res) {
      report.status = DeliveryStatus::failed;
      report.error = httplib::to_string(res.error());
      return report;
    }
    report.http_status = res->status;
    if (res->status >= 200 && res->status < 300) {
      report.status = DeliveryStatus::delivered;
      escalation.notified = true;
    } else {
      report.status = DeliveryStatus::failed;
      report.error = "webhook returned HTTP " + std::to_string(res->status);
    }
  } catch (const std::exception& e) {
    report.status = DeliveryStatus::failed;
    report.error = e.what();
  }
  return report;
}

}  // namespace affect::guardrails
