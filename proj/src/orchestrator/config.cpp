#include "affect/config.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

extern char** environ;

namespace affect::orchestrator {

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"audio", {"alpha_ema", "norm_factor", "use_mfcc", "snr_block_size", "base_valence"}},
    {"snr_penalty", {"low_band_db", "moderate_band_db", "low_factor", "moderate_factor"}},
    {"fusion", {"rule_base", "range_normalized_coherence"}},
    {"text", {"lexicon", "lemmas", "negation_markers", "negation_scope", "intensifiers"}},
    {"guardrails",
     {"thresholds", "keywords", "templates", "hedge_probability", "hedge_coherence", "escalation_webhook",
      "webhook_timeout_ms"}},
    {"audit", {"log_path", "events_dir", "artifacts_dir", "export_artifacts", "store_event_files", "fsync"}},
    {"anchoring",
     {"enabled", "ledger_path", "pending_path", "sender", "block_interval_s", "max_block_entries", "queue_capacity",
      "gas_per_anchor", "manual_seal"}},
    {"metrics", {"port", "output"}},
};
const std::set<std::string> kTopLevelScalars = {"run_id", "model_size"};

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

void check_keys(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("", "top level must be a mapping");
  for (const auto& kv : root) {
    const auto key = kv.first.as<std::string>();
    if (kTopLevelScalars.count(key)) continue;
    auto section = kKnownKeys.find(key);
    if (section == kKnownKeys.end()) throw ConfigError(key, "unknown key");
    if (kv.second.IsNull()) continue;
    if (!kv.second.IsMap()) throw ConfigError(key, "expected a mapping");
    for (const auto& inner : kv.second) {
      const auto name = inner.first.as<std::string>();
      if (!section->second.count(name)) throw ConfigError(key + "." + name, "unknown key");
    }
  }
}

void apply_overrides(YAML::Node& root, const Environment& env) {
  for (const auto& [name, value] : env) {
    if (name.rfind("APP__", 0) != 0) continue;
    std::vector<std::string> path;
    std::size_t pos = 5;
    while (pos <= name.size()) {
      const auto next = name.find("__", pos);
      path.push_back(lower(name.substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
      if (next == std::string::npos) break;
      pos = next + 2;
    }
    if (path.empty() || std::any_of(path.begin(), path.end(), [](const auto& p) { return p.empty(); })) continue;

    YAML::Node parsed;
    try {
      parsed = YAML::Load(value);
    } catch (const YAML::Exception&) {
      parsed = YAML::Node(value);
    }
    YAML::Node cur = root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      if (!cur[path[i]] || !cur[path[i]].IsMap()) cur[path[i]] = YAML::Node(YAML::NodeType::Map);
      YAML::Node child = cur[path[i]];
      cur.reset(child);
    }
    cur[path.back()] = parsed;
  }
}

class Reader {
 public:
  Reader(const YAML::Node& root, std::filesystem::path base) : root_(root), base_(std::move(base)) {}

  YAML::Node node(const std::string& section, const std::string& key) const {
    const YAML::Node s = root_[section];
    if (!s || !s.IsMap()) return YAML::Node();
    return s[key];
  }

  template <class T>
  void read(const std::string& section, const std::string& key, T& out) const {
    const auto n = section.empty() ? root_[key] : node(section, key);
    if (!n || n.IsNull()) return;
    try {
      out = n.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(dotted(section, key), "cannot convert value '" + scalar(n) + "'");
    }
  }

  void read_path(const std::string& section, const std::string& key, std::filesystem::path& out) const {
    std::string s;
    read(section, key, s);
    if (!s.empty()) out = resolve(s);
  }

  void read_optional_path(const std::string& section, const std::string& key,
                          std::optional<std::filesystem::path>& out) const {
    std::string s;
    read(section, key, s);
    if (!s.empty()) out = resolve(s);
  }

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() ? p : (base_ / p).lexically_normal();
  }

  static std::string dotted(const std::string& section, const std::string& key) {
    return section.empty() ? key : section + "." + key;
  }

 private:
  static std::string scalar(const YAML::Node& n) {
    if (n.IsScalar()) return n.Scalar();
    std::ostringstream ss;
    ss << n;
    return ss.str();
  }

  const YAML::Node& root_;
  std::filesystem::path base_;
};

void require(bool ok, const std::string& key, const std::string& message) {
  if (!ok) throw ConfigError(key, message);
}

void require_unit(double v, const std::string& key) { require(v >= 0.0 && v <= 1.0, key, "must be in [0, 1]"); }

void require_file(const std::filesystem::path& p, const std::string& key) {
  require(std::filesystem::is_regular_file(p), key, "file not found: " + p.string());
}

void require_optional_file(const std::optional<std::filesystem::path>& p, const std::string& key) {
  if (p) require_file(*p, key);
}

PipelineConfig build(const YAML::Node& root, const std::filesystem::path& base_dir, PipelineConfig cfg) {
  check_keys(root);
  Reader r(root, base_dir);

  r.read("", "run_id", cfg.run_id);
  r.read("", "model_size", cfg.model_size);
  require(!cfg.run_id.empty(), "run_id", "must not be empty");
  require(!cfg.model_size.empty(), "model_size", "must not be empty");

  auto& a = cfg.audio;
  r.read("audio", "alpha_ema", a.alpha_ema);
  r.read("audio", "norm_factor", a.norm_factor);
  r.read("audio", "use_mfcc", a.use_mfcc);
  r.read("audio", "snr_block_size", a.snr_block_size);
  r.read("audio", "base_valence", a.base_valence);
  require_unit(a.alpha_ema, "audio.alpha_ema");
  require(a.norm_factor > 0.0 && a.norm_factor <= 1.0, "audio.norm_factor", "must be in (0, 1]");
  require(a.snr_block_size >= 1, "audio.snr_block_size", "must be at least 1");
  require(a.base_valence >= -1.0 && a.base_valence <= 1.0, "audio.base_valence", "must be in [-1, 1]");

  auto& p = cfg.snr_penalty;
  r.read("snr_penalty", "low_band_db", p.low_band_db);
  r.read("snr_penalty", "moderate_band_db", p.moderate_band_db);
  r.read("snr_penalty", "low_factor", p.low_factor);
  r.read("snr_penalty", "moderate_factor", p.moderate_factor);
  require(p.low_band_db <= p.moderate_band_db, "snr_penalty.low_band_db", "must not exceed moderate_band_db");
  require_unit(p.low_factor, "snr_penalty.low_factor");
  require_unit(p.moderate_factor, "snr_penalty.moderate_factor");

  r.read_path("fusion", "rule_base", cfg.rule_base);
  r.read("fusion", "range_normalized_coherence", cfg.range_normalized_coherence);
  require_file(cfg.rule_base, "fusion.rule_base");

  auto& t = cfg.text;
  r.read_path("text", "lexicon", t.lexicon);
  r.read_optional_path("text", "lemmas", t.lemmas);
  r.read("text", "negation_markers", t.negation_markers);
  r.read("text", "negation_scope", t.negation_scope);
  if (const auto n = r.node("text", "intensifiers"); n && n.IsMap()) {
    t.intensifiers.clear();
    for (const auto& kv : n) {
      const auto phrase = kv.first.as<std::string>();
      double m = 0.0;
      try {
        m = kv.second.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError("text.intensifiers." + phrase, "expected a number");
      }
      require(m > 0.0, "text.intensifiers." + phrase, "must be positive");
      t.intensifiers.emplace_back(phrase, m);
    }
  }
  require_file(t.lexicon, "text.lexicon");
  require_optional_file(t.lemmas, "text.lemmas");
  require(t.negation_scope >= 1, "text.negation_scope", "must be at least 1");

  auto& g = cfg.guardrails;
  if (const auto n = r.node("guardrails", "thresholds"); n && n.IsMap()) {
    g.rules.thresholds.clear();
    for (const auto& kv : n) {
      const auto name = kv.first.as<std::string>();
      const auto key = "guardrails.thresholds." + name;
      const auto emotion = parse_emotion(name);
      require(emotion.has_value(), key, "unknown emotion");
      double v = 0.0;
      try {
        v = kv.second.as<double>();
      } catch (const YAML::Exception&) {
        throw ConfigError(key, "expected a number");
      }
      require_unit(v, key);
      g.rules.thresholds.push_back({*emotion, v});
    }
  }
  r.read_optional_path("guardrails", "keywords", g.keywords);
  r.read_optional_path("guardrails", "templates", g.templates);
  r.read("guardrails", "hedge_probability", g.rules.hedge_probability);
  r.read("guardrails", "hedge_coherence", g.rules.hedge_coherence);
  std::string webhook;
  r.read("guardrails", "escalation_webhook", webhook);
  if (!webhook.empty()) g.escalation_webhook = webhook;
  r.read("guardrails", "webhook_timeout_ms", g.webhook_timeout_ms);
  require_optional_file(g.keywords, "guardrails.keywords");
  require_optional_file(g.templates, "guardrails.templates");
  require_unit(g.rules.hedge_probability, "guardrails.hedge_probability");
  require_unit(g.rules.hedge_coherence, "guardrails.hedge_coherence");
  require(g.webhook_timeout_ms > 0, "guardrails.webhook_timeout_ms", "must be positive");
  if (g.escalation_webhook) {
    require(g.escalation_webhook->rfind("http://", 0) == 0, "guardrails.escalation_webhook",
            "only http:// URLs are supported");
  }

  auto& au = cfg.audit;
  r.read_path("audit", "log_path", au.log_path);
  r.read_path("audit", "events_dir", au.events_dir);
  r.read_path("audit", "artifacts_dir", au.artifacts_dir);
  r.read("audit", "export_artifacts", au.export_artifacts);
  r.read("audit", "store_event_files", au.store_event_files);
  r.read("audit", "fsync", au.fsync);

  auto& an = cfg.anchoring;
  r.read("anchoring", "enabled", an.enabled);
  r.read_path("anchoring", "ledger_path", an.ledger.ledger_path);
  r.read_path("anchoring", "pending_path", an.ledger.pending_path);
  r.read("anchoring", "sender", an.ledger.sender);
  double interval_s = static_cast<double>(an.ledger.block_interval.count()) / 1000.0;
  r.read("anchoring", "block_interval_s", interval_s);
  require(interval_s > 0.0, "anchoring.block_interval_s", "must be positive");
  an.ledger.block_interval = std::chrono::milliseconds(static_cast<long long>(interval_s * 1000.0 + 0.5));
  r.read("anchoring", "max_block_entries", an.ledger.max_block_entries);
  r.read("anchoring", "queue_capacity", an.ledger.queue_capacity);
  r.read("anchoring", "gas_per_anchor", an.ledger.gas_per_anchor);
  r.read("anchoring", "manual_seal", an.ledger.manual_seal);
  require(an.ledger.max_block_entries >= 1, "anchoring.max_block_entries", "must be at least 1");
  require(an.ledger.queue_capacity >= 1, "anchoring.queue_capacity", "must be at least 1");
  require(!an.ledger.sender.empty(), "anchoring.sender", "must not be empty");

  r.read("metrics", "port", cfg.metrics.port);
  r.read_optional_path("metrics", "output", cfg.metrics.output);
  require(cfg.metrics.port >= 0 && cfg.metrics.port <= 65535, "metrics.port", "must be in [0, 65535]");
  return cfg;
}

PipelineConfig rooted_defaults(const std::filesystem::path& base) {
  PipelineConfig cfg;
  cfg.audit.log_path = base / cfg.audit.log_path;
  cfg.audit.events_dir = base / cfg.audit.events_dir;
  cfg.audit.artifacts_dir = base / cfg.audit.artifacts_dir;
  cfg.anchoring.ledger.ledger_path = base / cfg.anchoring.ledger.ledger_path;
  cfg.anchoring.ledger.pending_path = base / cfg.anchoring.ledger.pending_path;
  return cfg;
}

}  // namespace

Environment process_environment() {
  Environment env;
  for (char** e = environ; e && *e; ++e) {
    std::string_view kv(*e);
    if (kv.rfind("APP__", 0) != 0) continue;
    const auto eq = kv.find('=');
    if (eq == std::string_view::npos) continue;
    env.emplace(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
  }
  return env;
}

PipelineConfig parse_config(const std::string& yaml, const std::filesystem::path& base_dir, const Environment& env) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml);
  } catch (const YAML::Exception& e) {
    throw ConfigError("", std::string("invalid YAML: ") + e.what());
  }
  if (!root || root.IsNull()) root = YAML::Node(YAML::NodeType::Map);
  apply_overrides(root, env);
  return build(root, base_dir, rooted_defaults(base_dir));
}

PipelineConfig load_config(const std::filesystem::path& path, const Environment& env) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  auto base = path.parent_path();
  if (base.empty()) base = ".";
  return parse_config(ss.str(), base, env);
}

PipelineConfig default_config(const std::filesystem::path& data_dir) {
  PipelineConfig cfg = rooted_defaults(".");
  cfg.rule_base = data_dir / "rules" / "default.yaml";
  cfg.text.lexicon = data_dir / "lexicon.tsv";
  cfg.text.lemmas = data_dir / "lemmas.tsv";
  cfg.guardrails.keywords = data_dir / "keywords.txt";
  cfg.guardrails.templates = data_dir / "templates.txt";
  return cfg;
}

}  // namespace affect::orchestrator
