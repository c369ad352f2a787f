#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "affect/audit.hpp"
#include "affect/canonical_json.hpp"
#include "affect/crypto.hpp"
#include "affect/fusion.hpp"
#include "affect/fuzzy.hpp"
#include "affect/ledger.hpp"

namespace py = pybind11;
namespace audit = affect::audit;
namespace fuzzy = affect::fuzzy;

namespace {

// Python objects cross the boundary as JSON text so ints stay ints and floats stay floats.
audit::Json to_json(const py::handle& obj) {
  const auto text = py::module_::import("json").attr("dumps")(obj, py::arg("allow_nan") = true).cast<std::string>();
  return audit::parse_json(text);
}

py::object from_json(const audit::Json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::dict proof_dict(const audit::MerkleProof& p) {
  py::dict d;
  d["leaf"] = p.leaf;
  d["leaf_index"] = p.leaf_index;
  d["siblings"] = p.siblings;
  d["root"] = p.root;
  return d;
}

audit::MerkleProof proof_from(const py::dict& d) {
  return {d["leaf"].cast<std::string>(), d["leaf_index"].cast<std::size_t>(),
          d["siblings"].cast<std::vector<std::string>>(), d["root"].cast<std::string>()};
}

}  // namespace

PYBIND11_MODULE(affect_audit, m) {
  m.doc() = "Canonical audit records, txids, Merkle proofs and fuzzy text weighting";

  // Translators run newest first, so the base class goes in before the subclasses.
  py::register_exception<affect::Error>(m, "AffectError", PyExc_RuntimeError);
  py::register_exception<audit::CanonicalizationError>(m, "CanonicalizationError", PyExc_ValueError);
  py::register_exception<audit::EmptyBatch>(m, "EmptyBatch", PyExc_ValueError);

  m.def("canonicalize", [](const py::object& obj) { return py::bytes(audit::canonicalize(to_json(obj))); },
        py::arg("obj"), "Canonical UTF-8 bytes of a JSON-compatible object.");
  m.def("format_real", &audit::format_real, py::arg("value"));
  m.def("parse_canonical", [](const py::bytes& b) { return from_json(audit::parse_json(std::string(b))); },
        py::arg("data"));
  m.def("compute_txid", [](const py::bytes& b) { return audit::compute_txid(std::string(b)); }, py::arg("data"),
        "Lowercase hex SHA-256 of canonical bytes.");
  m.def("txid_of", [](const py::object& obj) { return audit::compute_txid(audit::canonicalize(to_json(obj))); },
        py::arg("obj"));

  m.def(
      "redact",
      [](const std::string& text) {
        const auto r = audit::PiiRedactor{}.redact(text);
        return py::make_tuple(r.text, r.report);
      },
      py::arg("text"), "Returns (redacted_text, counts_by_class).");

  m.def("merkle_root", &audit::merkle_root, py::arg("leaves"));
  m.def(
      "merkle_proof", [](const std::vector<std::string>& leaves, std::size_t i) { return proof_dict(audit::merkle_proof(leaves, i)); },
      py::arg("leaves"), py::arg("index"));
  m.def(
      "merkle_verify", [](const py::dict& proof) { return audit::merkle_verify(proof_from(proof)); }, py::arg("proof"));
  m.def("estimate_anchor_cost", &audit::estimate_anchor_cost, py::arg("gas_units"), py::arg("gas_price_gwei"),
        py::arg("eth_usd"), py::arg("batch_size") = 1);

  m.def(
      "verify_anchorage",
      [](const py::bytes& file_bytes, const std::string& txid, std::optional<std::string> ledger_path) {
        const std::string bytes(file_bytes);
        const auto v = ledger_path ? audit::verify_anchorage(bytes, txid, std::filesystem::path(*ledger_path))
                                   : audit::verify_anchorage(bytes, txid, std::vector<audit::LedgerBlock>{});
        py::dict d;
        d["kind"] = std::string(audit::to_string(v.kind));
        d["computed_txid"] = v.computed_txid;
        d["block_number"] = v.block_number;
        d["tx_hash"] = v.tx_hash;
        d["sender"] = v.sender;
        return d;
      },
      py::arg("file_bytes"), py::arg("claimed_txid"), py::arg("ledger_path") = py::none());

  m.def("adjust_asr_confidence",
        [](double conf, double snr_db) { return affect::fusion::adjust_asr_confidence(conf, snr_db); },
        py::arg("asr_conf"), py::arg("snr_db"));

  m.def(
      "infer_w_text",
      [](const std::string& rule_base_path, double asr_conf, double arousal, double valence) {
        const auto rb = fuzzy::RuleBase::load_yaml(rule_base_path);
        const auto t = fuzzy::infer_w_text(rb, asr_conf, arousal, valence);
        py::list fired;
        for (const auto& r : t.fired_rules) {
          py::dict f;
          f["conditions"] = r.conditions;
          f["consequent"] = r.consequent;
          f["strength"] = r.strength;
          fired.append(f);
        }
        py::dict d;
        d["rule_base_id"] = t.rule_base_id;
        d["w_text"] = t.w_text;
        d["memberships"] = t.memberships;
        d["fired_rules"] = fired;
        d["out_sets"] = std::vector<double>(t.out_sets.begin(), t.out_sets.end());
        return d;
      },
      py::arg("rule_base_path"), py::arg("asr_conf"), py::arg("arousal"), py::arg("valence"));
}
