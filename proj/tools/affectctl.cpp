#include <CLI11.hpp>
#include <httplib.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "affect/config.hpp"
#include "affect/corpus.hpp"
#include "affect/crypto.hpp"
#include "affect/evaluation.hpp"
#include "affect/ledger.hpp"
#include "affect/pipeline.hpp"

using namespace affect;
using namespace affect::orchestrator;

namespace {

enum ExitCode { kOk = 0, kConfigError = 1, kVerificationFailure = 2, kRuntimeError = 3 };

std::string read_bytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string line_of(const std::filesystem::path& path, std::size_t line_no) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::string line;
  for (std::size_t i = 1; std::getline(in, line); ++i) {
    if (i == line_no) return line;
  }
  throw Error(path.string() + " has no line " + std::to_string(line_no));
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

audit::Json turn_json(const TurnResult& r) {
  audit::Json timings = audit::Json::object();
  for (const auto& [stage, s] : r.timings) timings[stage] = s;
  const auto& f = r.event.fusion;
  return {{"response", r.response},
          {"txid", r.txid},
          {"log_line", r.log_line},
          {"anchor", audit::to_json(r.anchor)},
          {"mode", std::string(fusion::to_string(f.mode))},
          {"w_text", f.w_text},
          {"dominant", std::string(to_string(dominant_emotion(f.distribution).label))},
          {"escalated", r.event.escalation.has_value()},
          {"timings_s", timings}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Explainable multimodal affect pipeline with a verifiable audit trail"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("--config", config_path, "YAML configuration file");

  auto* analyze = app.add_subcommand("analyze", "Run one turn through the pipeline");
  std::string audio_path, transcript, session = "cli";
  double asr_conf = 1.0;
  analyze->add_option("--audio", audio_path, "WAV file")->required()->check(CLI::ExistingFile);
  analyze->add_option("--transcript", transcript, "Transcript text")->required();
  analyze->add_option("--asr-confidence", asr_conf, "ASR confidence")->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--session", session, "Session id");

  auto* batch = app.add_subcommand("batch-eval", "Evaluate variants and ablations over a manifest");
  std::string manifest_path, report_dir = "eval";
  std::string variants = "text_only,audio_only,linear,fuzzy", ablations;
  batch->add_option("--manifest", manifest_path, "JSONL manifest")->required()->check(CLI::ExistingFile);
  batch->add_option("--out", report_dir, "Report directory");
  batch->add_option("--variants", variants, "Comma-separated variants");
  batch->add_option("--ablations", ablations, "Comma-separated ablations (no_text,no_audio,no_gating,fixed_weight)");

  auto* gen = app.add_subcommand("gen-corpus", "Generate a synthetic evaluation corpus");
  CorpusOptions corpus;
  std::string corpus_dir = "corpus", snr_levels = "5,10,20,30";
  gen->add_option("--out", corpus_dir, "Output directory");
  gen->add_option("--seed", corpus.seed, "Random seed");
  gen->add_option("--size", corpus.size, "Number of rows")->check(CLI::PositiveNumber);
  gen->add_option("--snr", snr_levels, "Comma-separated SNR levels in dB");
  gen->add_option("--duration", corpus.duration_s, "Seconds of audio per row")->check(CLI::PositiveNumber);

  auto* verify = app.add_subcommand("verify", "Verify a stored event against the ledger");
  std::string event_path, log_path, txid, ledger_path;
  std::size_t line_no = 0;
  verify->add_option("--event", event_path, "Stored event file (<txid>.json)");
  verify->add_option("--log", log_path, "Audit log (JSONL)");
  verify->add_option("--line", line_no, "1-based line in --log");
  verify->add_option("--txid", txid, "Claimed txid (defaults to the event file name)");
  verify->add_option("--ledger", ledger_path, "Ledger file (defaults to the configured one)");

  auto* status = app.add_subcommand("anchor-status", "Show ledger state or one txid's anchor");
  std::string status_txid;
  status->add_option("--txid", status_txid, "Transaction id to look up");
  status->add_option("--ledger", ledger_path, "Ledger file (defaults to the configured one)");

  auto* serve = app.add_subcommand("metrics-serve", "Expose pipeline metrics in Prometheus text format");
  std::string serve_manifest, metrics_out;
  int port = -1;
  serve->add_option("--manifest", serve_manifest, "Run these turns first")->check(CLI::ExistingFile);
  serve->add_option("--port", port, "HTTP port (default from config)");
  serve->add_option("--output", metrics_out, "Write exposition to a file and exit");

  CLI11_PARSE(app, argc, argv);

  PipelineConfig config;
  try {
    config = config_path.empty() ? default_config(AFFECT_DATA_DIR) : load_config(config_path);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (*analyze) {
      Pipeline pipeline(config);
      TurnInput input{audio_path, std::nullopt, transcript, asr_conf, session};
      const auto result = pipeline.run_turn(input);
      for (const auto& report : pipeline.drain_notifications()) {
        if (report.status == guardrails::DeliveryStatus::failed) std::cerr << "webhook: " << report.error << "\n";
      }
      std::cout << turn_json(result).dump(2) << "\n";
      return kOk;
    }

    if (*batch) {
      EvaluationOptions options;
      options.variants.clear();
      for (const auto& v : split_csv(variants)) {
        auto parsed = parse_variant(v);
        if (!parsed) throw CLI::ValidationError("--variants", "unknown variant " + v);
        options.variants.push_back(*parsed);
      }
      for (const auto& a : split_csv(ablations)) {
        auto parsed = parse_ablation(a);
        if (!parsed) throw CLI::ValidationError("--ablations", "unknown ablation " + a);
        options.ablations.push_back(*parsed);
      }
      Pipeline pipeline(config);
      const auto report = run_batch_eval(load_manifest(manifest_path), pipeline, options);
      write_report(report, report_dir);
      std::cout << "rows evaluated " << report.rows_evaluated << ", skipped " << report.rows_skipped << "\n";
      for (const auto& [name, m] : report.results) {
        std::cout << name << ": accuracy " << m.accuracy << ", macro F1 " << m.macro.f1 << ", weighted F1 "
                  << m.weighted.f1 << "\n";
      }
      for (const auto& [name, d] : report.disagreement) {
        std::cout << "fuzzy vs " << name << ": fuzzy corrects " << d.fuzzy_corrects << ", " << name << " corrects "
                  << d.other_corrects << ", both wrong " << d.both_wrong << "\n";
      }
      return kOk;
    }

    if (*gen) {
      corpus.snr_levels_db.clear();
      for (const auto& s : split_csv(snr_levels)) corpus.snr_levels_db.push_back(std::stod(s));
      const auto resources = PipelineResources::load(config);
      const auto rows = generate_synthetic_corpus(corpus, resources.text.lexicon, config.audio, corpus_dir);
      std::cout << "wrote " << rows.size() << " rows to " << (std::filesystem::path(corpus_dir) / "manifest.jsonl")
                << "\n";
      return kOk;
    }

    if (*verify) {
      std::string bytes;
      if (!event_path.empty()) {
        bytes = read_bytes(event_path);
        if (txid.empty()) txid = std::filesystem::path(event_path).stem().string();
      } else if (!log_path.empty() && line_no > 0) {
        if (txid.empty()) throw CLI::ValidationError("--txid", "required with --log");
        bytes = line_of(log_path, line_no);
      } else {
        throw CLI::ValidationError("verify", "give --event, or --log with --line and --txid");
      }
      const std::filesystem::path ledger = ledger_path.empty() ? config.anchoring.ledger.ledger_path : std::filesystem::path(ledger_path);
      const auto blocks = audit::read_ledger_file(ledger);
      const auto chain = audit::validate_chain(blocks);
      const auto v = audit::verify_anchorage(bytes, txid, blocks);
      audit::Json out = {{"verdict", std::string(audit::to_string(v.kind))},
                         {"claimed_txid", txid},
                         {"computed_txid", v.computed_txid},
                         {"chain_valid", chain.valid}};
      if (v.block_number) out["block_number"] = *v.block_number;
      if (v.tx_hash) out["tx_hash"] = *v.tx_hash;
      if (v.sender) out["sender"] = *v.sender;
      if (!chain.valid) out["chain_error"] = chain.reason;
      std::cout << out.dump(2) << "\n";
      return v.kind == audit::VerificationKind::verified && chain.valid ? kOk : kVerificationFailure;
    }

    if (*status) {
      const std::filesystem::path ledger = ledger_path.empty() ? config.anchoring.ledger.ledger_path : std::filesystem::path(ledger_path);
      const auto blocks = audit::read_ledger_file(ledger);
      const auto chain = audit::validate_chain(blocks);
      std::size_t entries = 0;
      for (const auto& b : blocks) entries += b.entries.size();
      audit::Json out = {{"blocks", blocks.size()}, {"entries", entries}, {"chain_valid", chain.valid}};
      if (!chain.valid) out["chain_error"] = chain.reason;
      if (!status_txid.empty()) {
        audit::AnchorRecord record{status_txid, audit::AnchorStatus::submitted, std::nullopt, std::nullopt, {}, 0};
        bool found = false;
        for (const auto& b : blocks) {
          for (const auto& e : b.entries) {
            if (e.txid != status_txid) continue;
            record = {e.txid, audit::AnchorStatus::anchored, b.block_number, e.tx_hash, e.sender,
                      config.anchoring.ledger.gas_per_anchor};
            found = true;
          }
        }
        if (!found) {
          // Not sealed yet: still queued, or never submitted.
          const auto pending = config.anchoring.ledger.pending_path;
          bool queued = false;
          if (std::filesystem::exists(pending)) {
            const auto queue = audit::parse_json(read_bytes(pending));
            for (const auto& t : queue.at("pending")) queued |= t == status_txid;
          }
          if (!queued) record.status = audit::AnchorStatus::disabled;
        }
        out["record"] = audit::to_json(record);
      }
      std::cout << out.dump(2) << "\n";
      return chain.valid ? kOk : kVerificationFailure;
    }

    if (*serve) {
      Pipeline pipeline(config);
      if (!serve_manifest.empty()) {
        for (const auto& row : load_manifest(serve_manifest)) {
          TurnInput input{row.audio, std::nullopt, row.transcript, row.asr_confidence, "metrics:" + row.id};
          pipeline.run_turn(input);
        }
      }
      if (!metrics_out.empty()) {
        std::ofstream out(metrics_out, std::ios::binary | std::ios::trunc);
        out << pipeline.metrics().exposition();
        return out ? kOk : kRuntimeError;
      }
      httplib::Server server;
      server.Get("/metrics", [&](const httplib::Request&, httplib::Response& res) {
        res.set_content(pipeline.metrics().exposition(), "text/plain; version=0.0.4; charset=utf-8");
      });
      const int bind_port = port >= 0 ? port : config.metrics.port;
      std::cerr << "serving metrics on http://0.0.0.0:" << bind_port << "/metrics\n";
      if (!server.listen("0.0.0.0", bind_port)) {
        std::cerr << "cannot bind port " << bind_port << "\n";
        return kRuntimeError;
      }
      return kOk;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
