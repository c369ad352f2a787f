import hashlib
import json
import pathlib
import random

import pytest

import affect_audit as aa

DATA = pathlib.Path(__file__).resolve().parents[2] / "data"


def test_canonical_bytes_sorted_and_compact():
    out = aa.canonicalize({"b": 1, "a": [True, None, "x"], "c": 0.9164147094658042})
    assert out == b'{"a":[true,null,"x"],"b":1,"c":0.916414709466}'


def test_canonical_is_key_order_independent():
    rng = random.Random(7)
    obj = {f"k{i}": {"v": i * 0.1, "s": str(i)} for i in range(20)}
    ref = aa.canonicalize(obj)
    for _ in range(20):
        items = list(obj.items())
        rng.shuffle(items)
        assert aa.canonicalize(dict(items)) == ref


def test_negative_zero_and_nan():
    assert aa.format_real(-0.0) == "0"
    with pytest.raises(ValueError):
        aa.canonicalize({"x": float("nan")})


def test_txid_matches_hashlib():
    obj = {"event_id": "run-00000001", "w_text": 0.5}
    data = aa.canonicalize(obj)
    assert aa.compute_txid(data) == hashlib.sha256(data).hexdigest()
    assert aa.txid_of(obj) == hashlib.sha256(data).hexdigest()


def test_parse_roundtrip():
    obj = {"a": 1, "b": [1.5, "z"], "c": {"d": None}}
    assert aa.parse_canonical(aa.canonicalize(obj)) == obj


def test_redaction_counts():
    text, report = aa.redact("mail jo@example.com or call 555-123-4567")
    assert "jo@example.com" not in text
    assert "[REDACTED:EMAIL]" in text
    assert report.get("EMAIL") == 1


def _oracle_root(leaves):
    level = [bytes.fromhex(x) for x in leaves]
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [hashlib.sha256(level[i] + level[i + 1]).digest() for i in range(0, len(level), 2)]
    return level[0].hex()


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 13])
def test_merkle_against_hashlib(n):
    leaves = [hashlib.sha256(str(i).encode()).hexdigest() for i in range(n)]
    root = aa.merkle_root(leaves)
    assert root == _oracle_root(leaves)
    for i in range(n):
        proof = aa.merkle_proof(leaves, i)
        assert proof["root"] == root
        assert aa.merkle_verify(proof)
        if proof["siblings"]:
            bad = dict(proof, siblings=["0" * 64] + proof["siblings"][1:])
            assert not aa.merkle_verify(bad)


def test_merkle_empty_batch():
    with pytest.raises(ValueError):
        aa.merkle_root([])


def test_anchor_cost():
    assert aa.estimate_anchor_cost(47000, 50, 3445) == pytest.approx(47000 * 50e-9 * 3445)
    assert abs(aa.estimate_anchor_cost(47000, 50, 3445) - 8.096) <= 0.001


def test_snr_penalty_bands():
    assert aa.adjust_asr_confidence(0.8, 3.0) == pytest.approx(0.48)
    assert aa.adjust_asr_confidence(0.8, 8.0) == pytest.approx(0.68)
    assert aa.adjust_asr_confidence(0.8, 20.0) == pytest.approx(0.8)


def test_golden_fuzzy_trace():
    t = aa.infer_w_text(str(DATA / "rules" / "trace.yaml"), 0.9582073547338185, 0.12, 0.02)
    assert abs(t["w_text"] - 0.5843812629945782) <= 0.01
    assert 0.0 <= t["w_text"] <= 1.0
    assert t["fired_rules"]


def test_verify_anchorage_without_ledger():
    data = aa.canonicalize({"x": 1})
    out = aa.verify_anchorage(data, aa.compute_txid(data))
    assert out["computed_txid"] == hashlib.sha256(data).hexdigest()
    assert out["kind"] == "NotAnchored"
    assert out["block_number"] is None


def test_verify_anchorage_unreadable_ledger(tmp_path):
    data = aa.canonicalize({"x": 1})
    with pytest.raises(aa.AffectError):
        aa.verify_anchorage(data, aa.compute_txid(data), str(tmp_path / "missing.json"))
