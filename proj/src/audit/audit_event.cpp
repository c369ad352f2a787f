#include "affect/audit.hpp"

namespace affect::audit {

Json to_json(const EmotionDistribution& dist) {
  Json j = Json::object();
  for (auto e : kEmotions) j[std::string(to_string(e))] = dist[e];
  return j;
}

Json to_json(const VadState& vad) {
  return {{"valence", vad.valence}, {"arousal", vad.arousal}, {"dominance", vad.dominance}};
}

Json to_json(const Metadata& metadata) {
  Json j = Json::object();
  for (const auto& [key, value] : metadata) {
    std::visit([&](const auto& v) { j[key] = v; }, value);
  }
  return j;
}

Json to_json(const fuzzy::FuzzyTrace& trace) {
  Json fired = Json::array();
  for (const auto& rule : trace.fired_rules) {
    fired.push_back({{"if", rule.conditions}, {"then", rule.consequent}, {"strength", rule.strength}});
  }
  Json memberships = Json::object();
  for (const auto& [var, sets] : trace.memberships) {
    for (const auto& [label, degree] : sets) memberships[var][label] = degree;
  }
  return {
      {"rule_base", trace.rule_base_id},
      {"inputs", {{"asr_conf", trace.inputs.asr_conf}, {"arousal", trace.inputs.arousal}, {"valence", trace.inputs.valence}}},
      {"memberships", memberships},
      {"fired_rules", fired},
      {"out_sets", {{"low", trace.out_sets[0]}, {"mid", trace.out_sets[1]}, {"high", trace.out_sets[2]}}},
      {"w_text", trace.w_text},
  };
}

Json AuditEvent::to_json() const {
  using audit::to_json;
  const auto& a = acoustic;
  Json j = {
      {"canonical_version", kCanonicalVersion},
      {"event_id", event_id},
      {"timestamp", timestamp},
      {"run_id", run_id},
      {"model_size", model_size},
      {"rule_base", rule_base_id},
      {"session_id", session_id},
      {"asr_conf", asr_conf},
      {"asr_conf_adjusted", asr_conf_adjusted},
      {"emotion_audio_conf", audio.confidence},
      {"emotion_text_conf", text.confidence},
      {"weights", {{"w_text", fusion.w_text}, {"w_audio", fusion.w_audio}}},
      {"mode", std::string(fusion::to_string(fusion.mode))},
      {"coherence", fusion.coherence},
      {"final",
       {{"probs", to_json(fusion.distribution)},
        {"vad", to_json(fusion.vad)},
        {"dominant", std::string(affect::to_string(dominant_emotion(fusion.distribution).label))}}},
      {"prob_audio", to_json(audio.distribution)},
      {"prob_text", to_json(text.distribution)},
      {"vad_audio", to_json(audio.vad)},
      {"vad_text", to_json(text.vad)},
      {"acoustic",
       {{"arousal_raw", a.arousal_raw},
        {"zcr_raw", a.zcr_raw},
        {"zcr_norm", a.zcr_norm},
        {"timbre_score", a.timbre_score},
        {"mfcc_present", a.mfcc_present},
        {"arousal_smoothed", a.arousal_smoothed},
        {"snr_db", a.snr_db},
        {"rms", a.rms},
        {"rms_norm", a.rms_norm},
        {"dominance", audio.vad.dominance}}},
      {"text_analysis", to_json(text.metadata)},
      {"transcript", transcript},
      {"response", response},
      {"redaction", redaction},
  };
  if (fusion.mode == fusion::FusionMode::fuzzy && fusion.trace) {
    j["fusion_fuzzy"] = to_json(*fusion.trace);
  } else if (!fusion.fallback_reason.empty()) {
    j["fallback_reason"] = fusion.fallback_reason;
  }
  if (escalation && escalation->triggered) {
    j["escalation"] = {
        {"triggered", true},
        {"reasons", escalation->reasons},
        {"timestamp", escalation->timestamp},
        {"notification", escalation_notification},
    };
  }
  return j;
}

}  // namespace affect::audit
