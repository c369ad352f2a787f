#include "affect/evaluation.hpp"

#include <fstream>
#include <set>

namespace affect::orchestrator {

namespace {

Json class_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}, {"support", m.support}};
}

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

Emotion argmax(const EmotionDistribution& d) { return dominant_emotion(d).label; }

EmotionResult as_result(const audit::ChannelOutput& c) { return {c.distribution, c.vad, c.confidence, c.metadata}; }

}  // namespace

std::vector<ManifestRow> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read manifest " + path.string());
  const auto base = path.parent_path();
  std::vector<ManifestRow> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    Json j;
    try {
      j = Json::parse(line);
    } catch (const std::exception& e) {
      throw Error(where + ": " + e.what());
    }
    try {
      ManifestRow row;
      row.id = j.at("id").get<std::string>();
      std::filesystem::path audio = j.at("audio").get<std::string>();
      row.audio = audio.is_absolute() ? audio : base / audio;
      row.transcript = j.at("transcript").get<std::string>();
      row.asr_confidence = j.at("asr_confidence").get<double>();
      if (!(row.asr_confidence >= 0.0 && row.asr_confidence <= 1.0)) throw Error("asr_confidence outside [0, 1]");
      row.label = emotion_from_string(j.at("label").get<std::string>());
      for (const auto& [k, v] : j.items()) {
        if (k != "id" && k != "audio" && k != "transcript" && k != "asr_confidence" && k != "label") row.extra[k] = v;
      }
      rows.push_back(std::move(row));
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    } catch (const Json::exception& e) {
      throw Error(where + ": " + e.what());
    }
  }
  return rows;
}

std::array<std::array<double, kEmotionCount>, kEmotionCount> ClassificationMetrics::normalized_confusion() const {
  std::array<std::array<double, kEmotionCount>, kEmotionCount> out{};
  for (std::size_t g = 0; g < kEmotionCount; ++g) {
    std::size_t total = 0;
    for (auto c : confusion[g]) total += c;
    for (std::size_t p = 0; p < kEmotionCount; ++p) out[g][p] = ratio(confusion[g][p], total);
  }
  return out;
}

ClassificationMetrics compute_metrics(const std::vector<Emotion>& gold, const std::vector<Emotion>& predicted) {
  if (gold.size() != predicted.size()) throw Error("gold and predicted label counts differ");
  ClassificationMetrics m;
  m.rows = gold.size();
  std::set<Emotion> labels;
  std::size_t correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    ++m.confusion[index_of(gold[i])][index_of(predicted[i])];
    labels.insert(gold[i]);
    labels.insert(predicted[i]);
    correct += gold[i] == predicted[i] ? 1 : 0;
  }
  m.accuracy = ratio(correct, m.rows);

  for (auto e : labels) {
    const auto k = index_of(e);
    std::size_t predicted_k = 0;
    std::size_t gold_k = 0;
    for (std::size_t j = 0; j < kEmotionCount; ++j) {
      predicted_k += m.confusion[j][k];
      gold_k += m.confusion[k][j];
    }
    ClassMetrics c;
    c.support = gold_k;
    c.precision = ratio(m.confusion[k][k], predicted_k);
    c.recall = ratio(m.confusion[k][k], gold_k);
    c.f1 = c.precision + c.recall > 0.0 ? 2.0 * c.precision * c.recall / (c.precision + c.recall) : 0.0;
    m.per_class[e] = c;
  }

  if (!labels.empty()) {
    const double n = static_cast<double>(labels.size());
    for (const auto& [_, c] : m.per_class) {
      m.macro.precision += c.precision / n;
      m.macro.recall += c.recall / n;
      m.macro.f1 += c.f1 / n;
      if (m.rows > 0) {
        const double w = static_cast<double>(c.support) / static_cast<double>(m.rows);
        m.weighted.precision += w * c.precision;
        m.weighted.recall += w * c.recall;
        m.weighted.f1 += w * c.f1;
      }
    }
  }
  m.macro.support = m.weighted.support = m.rows;
  return m;
}

Json to_json(const ClassificationMetrics& m) {
  Json per_class = Json::object();
  for (const auto& [e, c] : m.per_class) per_class[std::string(to_string(e))] = class_json(c);
  Json confusion = Json::array();
  Json normalized = Json::array();
  const auto norm = m.normalized_confusion();
  for (std::size_t g = 0; g < kEmotionCount; ++g) {
    confusion.push_back(m.confusion[g]);
    normalized.push_back(norm[g]);
  }
  Json labels = Json::array();
  for (auto e : kEmotions) labels.push_back(std::string(to_string(e)));
  return {{"rows", m.rows},
          {"accuracy", m.accuracy},
          {"per_class", per_class},
          {"macro", class_json(m.macro)},
          {"weighted", class_json(m.weighted)},
          {"labels", labels},
          {"confusion", confusion},
          {"confusion_normalized", normalized}};
}

std::string confusion_csv(const ClassificationMetrics& m) {
  std::string out = "gold\\pred";
  for (auto e : kEmotions) out += "," + std::string(to_string(e));
  out += "\n";
  const auto norm = m.normalized_confusion();
  for (std::size_t g = 0; g < kEmotionCount; ++g) {
    out += std::string(to_string(kEmotions[g]));
    for (std::size_t p = 0; p < kEmotionCount; ++p) out += "," + audit::format_real(norm[g][p]);
    out += "\n";
  }
  return out;
}

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::text_only: return "text_only";
    case Variant::audio_only: return "audio_only";
    case Variant::linear: return "linear";
    case Variant::fuzzy: return "fuzzy";
  }
  return "fuzzy";
}

std::string_view to_string(Ablation a) noexcept {
  switch (a) {
    case Ablation::no_text: return "no_text";
    case Ablation::no_audio: return "no_audio";
    case Ablation::no_gating: return "no_gating";
    case Ablation::fixed_weight: return "fixed_weight";
  }
  return "fixed_weight";
}

std::optional<Variant> parse_variant(std::string_view s) {
  for (auto v : {Variant::text_only, Variant::audio_only, Variant::linear, Variant::fuzzy}) {
    if (to_string(v) == s) return v;
  }
  return std::nullopt;
}

std::optional<Ablation> parse_ablation(std::string_view s) {
  for (auto a : {Ablation::no_text, Ablation::no_audio, Ablation::no_gating, Ablation::fixed_weight}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

Json EvaluationReport::to_json() const {
  Json results_json = Json::object();
  for (const auto& [name, m] : results) results_json[name] = orchestrator::to_json(m);
  Json dis = Json::object();
  for (const auto& [name, d] : disagreement) {
    dis[name] = {{"fuzzy_corrects", d.fuzzy_corrects},
                 {"other_corrects", d.other_corrects},
                 {"both_correct", d.both_correct},
                 {"both_wrong", d.both_wrong}};
  }
  Json rows = Json::array();
  for (const auto& o : outcomes) {
    Json preds = Json::object();
    for (const auto& [name, e] : o.predictions) preds[name] = std::string(to_string(e));
    rows.push_back({{"id", o.id}, {"gold", std::string(to_string(o.gold))}, {"predictions", preds},
                    {"w_text", o.w_text}, {"mode", o.mode}});
  }
  return {{"rows_total", rows_total},
          {"rows_evaluated", rows_evaluated},
          {"rows_skipped", rows_skipped},
          {"results", results_json},
          {"disagreement", dis},
          {"rows", rows}};
}

EvaluationReport run_batch_eval(const std::vector<ManifestRow>& manifest, Pipeline& pipeline,
                                const EvaluationOptions& options) {
  if (manifest.empty()) throw Error("manifest is empty");
  EvaluationReport report;
  report.rows_total = manifest.size();

  std::vector<Emotion> gold;
  std::map<std::string, std::vector<Emotion>> predictions;

  fusion::FusionOptions fo;
  if (pipeline.config().range_normalized_coherence) fo.coherence = fusion::CoherenceVariant::range_normalized;

  for (const auto& row : manifest) {
    TurnInput input;
    input.transcript = row.transcript;
    input.asr_confidence = row.asr_confidence;
    input.session_id = "eval:" + row.id;
    try {
      input.audio = audio::read_wav(row.audio);
    } catch (const Error&) {
      ++report.rows_skipped;
      continue;
    }

    const auto turn = pipeline.run_turn(input);
    const auto& ev = turn.event;
    const auto text = as_result(ev.text);
    const auto heard = as_result(ev.audio);
    auto with_weight = [&](double w) { return argmax(fusion::fuse_with_weight(text, heard, w, fo).distribution); };

    RowOutcome outcome{row.id, row.label, {}, ev.fusion.w_text, std::string(fusion::to_string(ev.fusion.mode))};
    for (auto v : options.variants) {
      Emotion p = Emotion::neutral;
      switch (v) {
        case Variant::text_only: p = argmax(text.distribution); break;
        case Variant::audio_only: p = argmax(heard.distribution); break;
        case Variant::linear: p = with_weight(ev.asr_conf_adjusted); break;
        case Variant::fuzzy: p = argmax(ev.fusion.distribution); break;
      }
      outcome.predictions[std::string(to_string(v))] = p;
    }
    for (auto a : options.ablations) {
      double w = 0.5;
      switch (a) {
        case Ablation::no_text: w = 0.0; break;
        case Ablation::no_audio: w = 1.0; break;
        case Ablation::no_gating: w = ev.asr_conf; break;
        case Ablation::fixed_weight: w = 0.5; break;
      }
      outcome.predictions[std::string(to_string(a))] = with_weight(w);
    }

    gold.push_back(row.label);
    for (const auto& [name, p] : outcome.predictions) predictions[name].push_back(p);
    report.outcomes.push_back(std::move(outcome));
  }
  report.rows_evaluated = gold.size();

  for (const auto& [name, preds] : predictions) report.results[name] = compute_metrics(gold, preds);

  if (auto fz = predictions.find("fuzzy"); fz != predictions.end()) {
    for (const auto& [name, preds] : predictions) {
      if (name == "fuzzy") continue;
      Disagreement d;
      for (std::size_t i = 0; i < gold.size(); ++i) {
        const bool f = fz->second[i] == gold[i];
        const bool o = preds[i] == gold[i];
        if (f && !o) ++d.fuzzy_corrects;
        else if (!f && o) ++d.other_corrects;
        else if (f && o) ++d.both_correct;
        else ++d.both_wrong;
      }
      report.disagreement[name] = d;
    }
  }
  return report;
}

void write_report(const EvaluationReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "report.json", std::ios::binary | std::ios::trunc);
    out << report.to_json().dump(2) << "\n";
    if (!out) throw Error("cannot write " + (dir / "report.json").string());
  }
  for (const auto& [name, m] : report.results) {
    std::ofstream out(dir / ("confusion_" + name + ".csv"), std::ios::binary | std::ios::trunc);
    out << confusion_csv(m);
    if (!out) throw Error("cannot write confusion matrix for " + name);
  }
}

}  // namespace affect::orchestrator
