#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>
#include <thread>

#include "affect/crypto.hpp"
#include "affect/ledger.hpp"
#include "support.hpp"

using namespace affect;
using namespace affect::audit;

namespace {

std::string txid_of(int i) { return compute_txid("event-" + std::to_string(i)); }

LedgerConfig manual(const testing::TempDir& dir) {
  LedgerConfig c;
  c.ledger_path = dir / "ledger.json";
  c.pending_path = dir / "pending.json";
  c.manual_seal = true;
  return c;
}

std::shared_ptr<const Clock> pinned() {
  return std::make_shared<FixedClock>(WallTime(std::chrono::seconds(1714564800)));
}

/// Concatenated raw digests, hashed: the parent-node rule written out directly.
std::string pair_hash(const std::string& left, const std::string& right) {
  const auto l = *digest_from_hex(left);
  const auto r = *digest_from_hex(right);
  std::string bytes(l.begin(), l.end());
  bytes.append(r.begin(), r.end());
  return compute_txid(bytes);
}

}  // namespace

TEST_CASE("tx_hash is SHA-256 of the decimal/string concatenation") {
  const auto t = txid_of(1);
  CHECK(compute_tx_hash(12, t, "0xabc", 3) == compute_txid("12" + t + "0xabc" + "3"));
  CHECK(compute_tx_hash(0, t, "s", 0) != compute_tx_hash(0, t, "s", 1));
}

TEST_CASE("disabled anchoring never touches a ledger") {
  const auto r = anchor_txid(txid_of(1), nullptr);
  CHECK(r.status == AnchorStatus::disabled);
  CHECK_FALSE(r.block_number);
  CHECK(r.gas_used == 0);
  CHECK(to_json(r).at("status") == "disabled");
}

TEST_CASE("submitted then anchored under manual sealing") {
  testing::TempDir dir("ledger");
  SimulatedLedger ledger(manual(dir), pinned());
  const auto t = txid_of(1);
  const auto submitted = ledger.submit(t);
  CHECK(submitted.status == AnchorStatus::submitted);
  CHECK(ledger.record(t)->status == AnchorStatus::submitted);
  CHECK_FALSE(ledger.sealed_at(t));
  CHECK(ledger.pending() == 1);

  CHECK(ledger.seal_now() == 1);
  const auto anchored = *ledger.record(t);
  CHECK(anchored.status == AnchorStatus::anchored);
  CHECK(anchored.block_number == 0u);
  CHECK(anchored.gas_used == 47000);
  CHECK(anchored.sender == ledger.config().sender);
  CHECK(anchored.tx_hash == compute_tx_hash(0, t, anchored.sender, 0));
  CHECK(ledger.sealed_at(t).has_value());
  CHECK(ledger.pending() == 0);
  CHECK(ledger.seal_now() == 0);

  CHECK(ledger.submit(t).status == AnchorStatus::anchored);  // idempotent
  CHECK_THROWS_AS(ledger.submit("not-a-txid"), AnchorError);
  CHECK_FALSE(ledger.record(txid_of(2)));
}

TEST_CASE("blocks link from genesis and split at max_block_entries") {
  testing::TempDir dir("ledger-chain");
  auto cfg = manual(dir);
  cfg.max_block_entries = 4;
  SimulatedLedger ledger(cfg, pinned());
  for (int i = 0; i < 10; ++i) ledger.submit(txid_of(i));
  CHECK(ledger.seal_now() == 3);
  const auto blocks = ledger.blocks();
  REQUIRE(blocks.size() == 3);
  CHECK(blocks[0].previous_block_hash == kGenesisPreviousHash);
  CHECK(blocks[0].timestamp == "2024-05-01T12:00:00.000000Z");
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    CHECK(blocks[i].block_number == i);
    CHECK(blocks[i].block_hash == compute_block_hash(blocks[i]));
    if (i > 0) CHECK(blocks[i].previous_block_hash == blocks[i - 1].block_hash);
  }
  CHECK(blocks[0].entries.size() == 4);
  CHECK(blocks[2].entries.size() == 2);
  CHECK(blocks[2].entries[1].txid == txid_of(9));
  CHECK(validate_chain(blocks).valid);
  CHECK(validate_chain({}).valid);
}

TEST_CASE("chain validation detects every kind of edit") {
  testing::TempDir dir("ledger-tamper");
  auto cfg = manual(dir);
  cfg.max_block_entries = 3;
  SimulatedLedger ledger(cfg, pinned());
  for (int i = 0; i < 9; ++i) ledger.submit(txid_of(i));
  ledger.seal_now();
  const auto good = ledger.blocks();

  auto edited = [&](auto&& mutate) {
    auto b = good;
    mutate(b);
    return validate_chain(b);
  };
  auto check = edited([](auto& b) { b[1].entries[0].txid = txid_of(99); });
  CHECK_FALSE(check.valid);
  CHECK(check.first_bad_block == 1u);
  CHECK_FALSE(edited([](auto& b) { b[2].timestamp = "2030-01-01T00:00:00.000000Z"; }).valid);
  CHECK_FALSE(edited([](auto& b) { b[0].entries[2].sender = "mallory"; }).valid);
  CHECK_FALSE(edited([](auto& b) { std::swap(b[0].entries[0], b[0].entries[1]); }).valid);
  CHECK_FALSE(edited([](auto& b) { b.erase(b.begin() + 1); }).valid);
  CHECK_FALSE(edited([](auto& b) { b[0].previous_block_hash = std::string(64, '1'); }).valid);
  // Rehashing an edited block still breaks the link to its successor.
  check = edited([](auto& b) {
    b[0].entries[0].txid = txid_of(99);
    b[0].entries[0].tx_hash = compute_tx_hash(0, b[0].entries[0].txid, b[0].entries[0].sender, 0);
    b[0].block_hash = compute_block_hash(b[0]);
  });
  CHECK_FALSE(check.valid);
  CHECK(check.first_bad_block == 1u);
}

TEST_CASE("ledger persists and reloads") {
  testing::TempDir dir("ledger-persist");
  const auto cfg = manual(dir);
  {
    SimulatedLedger ledger(cfg, pinned());
    ledger.submit(txid_of(1));
    ledger.seal_now();
    ledger.submit(txid_of(2));  // left pending; sealed at shutdown
  }
  const auto on_disk = read_ledger_file(cfg.ledger_path);
  CHECK(on_disk.size() == 2);
  CHECK(validate_chain(on_disk).valid);

  SimulatedLedger reopened(cfg, pinned());
  CHECK(reopened.record(txid_of(1))->status == AnchorStatus::anchored);
  CHECK(reopened.record(txid_of(2))->block_number == 1u);
  reopened.submit(txid_of(3));
  reopened.seal_now();
  CHECK(reopened.blocks().back().block_number == 2u);
  CHECK(reopened.blocks().back().previous_block_hash == on_disk.back().block_hash);
}

TEST_CASE("pending queue survives a restart") {
  testing::TempDir dir("ledger-pending");
  const auto cfg = manual(dir);
  {
    std::ofstream(cfg.pending_path) << "{\"pending\":[\"" << txid_of(5) << "\"]}\n";
  }
  SimulatedLedger ledger(cfg, pinned());
  CHECK(ledger.pending() == 1);
  CHECK(ledger.record(txid_of(5))->status == AnchorStatus::submitted);
  ledger.seal_now();
  CHECK(ledger.record(txid_of(5))->status == AnchorStatus::anchored);
}

TEST_CASE("corrupt or tampered ledger files are refused") {
  testing::TempDir dir("ledger-corrupt");
  const auto cfg = manual(dir);
  std::ofstream(cfg.ledger_path) << "{not json";
  CHECK_THROWS_AS(SimulatedLedger(cfg, pinned()), AnchorError);
  CHECK_THROWS_AS(read_ledger_file(cfg.ledger_path), VerificationUnavailable);
  CHECK_THROWS_AS(read_ledger_file(dir / "missing.json"), VerificationUnavailable);

  testing::TempDir dir2("ledger-corrupt2");
  const auto cfg2 = manual(dir2);
  {
    SimulatedLedger ledger(cfg2, pinned());
    ledger.submit(txid_of(1));
  }
  std::ifstream in(cfg2.ledger_path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto text = ss.str();
  const auto at = text.find(txid_of(1));
  text[at] = text[at] == 'a' ? 'b' : 'a';
  std::ofstream(cfg2.ledger_path, std::ios::trunc) << text;
  CHECK_THROWS_AS(SimulatedLedger(cfg2, pinned()), AnchorError);

  auto bad = cfg;
  bad.max_block_entries = 0;
  CHECK_THROWS_AS(SimulatedLedger{bad}, AnchorError);
}

TEST_CASE("verification outcomes") {
  testing::TempDir dir("ledger-verify");
  const auto cfg = manual(dir);
  const std::string bytes = "{\"a\":1}";
  const auto txid = compute_txid(bytes);
  {
    SimulatedLedger ledger(cfg, pinned());
    ledger.submit(txid);
    ledger.seal_now();
  }
  const auto ok = verify_anchorage(bytes, txid, cfg.ledger_path);
  CHECK(ok.kind == VerificationKind::verified);
  CHECK(ok.block_number == 0u);
  CHECK(ok.tx_hash == compute_tx_hash(0, txid, cfg.sender, 0));
  CHECK(ok.sender == cfg.sender);
  CHECK(to_string(ok.kind) == "Verified");

  const auto tampered = verify_anchorage("{\"a\":2}", txid, cfg.ledger_path);
  CHECK(tampered.kind == VerificationKind::tamper_detected);
  CHECK(tampered.computed_txid != txid);
  CHECK(to_string(tampered.kind) == "TamperDetected");

  const std::string other = "{\"b\":1}";
  CHECK(verify_anchorage(other, compute_txid(other), cfg.ledger_path).kind == VerificationKind::not_anchored);
  CHECK_THROWS_AS(verify_anchorage(bytes, txid, dir / "nope.json"), VerificationUnavailable);
}

TEST_CASE("background sealer fills blocks without blocking submit") {
  testing::TempDir dir("ledger-bg");
  auto cfg = manual(dir);
  cfg.manual_seal = false;
  cfg.max_block_entries = 8;
  cfg.block_interval = std::chrono::milliseconds(50);
  SimulatedLedger ledger(cfg);
  for (int i = 0; i < 20; ++i) {
    const auto start = std::chrono::steady_clock::now();
    CHECK(ledger.submit(txid_of(i)).status == AnchorStatus::submitted);
    CHECK(std::chrono::steady_clock::now() - start < std::chrono::milliseconds(20));
  }
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (ledger.pending() > 0 && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  CHECK(ledger.pending() == 0);
  for (int i = 0; i < 20; ++i) CHECK(ledger.record(txid_of(i))->status == AnchorStatus::anchored);
  CHECK(validate_chain(ledger.blocks()).valid);
  for (const auto& b : ledger.blocks()) CHECK(b.entries.size() <= 8);
}

TEST_CASE("a full queue parks submissions for retry") {
  testing::TempDir dir("ledger-retry");
  auto cfg = manual(dir);
  cfg.queue_capacity = 3;
  SimulatedLedger ledger(cfg, pinned());
  for (int i = 0; i < 5; ++i) CHECK(ledger.submit(txid_of(i)).status == AnchorStatus::submitted);
  CHECK(ledger.retrying() == 2);
  CHECK(ledger.pending() == 5);
  ledger.seal_now();
  CHECK(ledger.pending() == 0);
  std::vector<std::string> order;
  for (const auto& b : ledger.blocks()) {
    for (const auto& e : b.entries) order.push_back(e.txid);
  }
  REQUIRE(order.size() == 5);
  for (int i = 0; i < 5; ++i) CHECK(order[static_cast<std::size_t>(i)] == txid_of(i));
}

TEST_CASE("merkle root construction") {
  const auto a = txid_of(1), b = txid_of(2), c = txid_of(3);
  CHECK(merkle_root({a}) == a);
  CHECK(merkle_root({a, b}) == pair_hash(a, b));
  CHECK(merkle_root({a, b, c}) == merkle_root({a, b, c, c}));
  CHECK(merkle_root({a, b, c}) == pair_hash(pair_hash(a, b), pair_hash(c, c)));
  CHECK(merkle_root({a, b}) != merkle_root({b, a}));
  CHECK_THROWS_AS(merkle_root({}), EmptyBatch);
  CHECK_THROWS_AS(merkle_root({"zz"}), Error);
}

TEST_CASE("merkle proofs verify for every leaf and reject alterations") {
  std::mt19937_64 rng(9);
  for (std::size_t n = 1; n <= 64; ++n) {
    std::vector<std::string> leaves;
    for (std::size_t i = 0; i < n; ++i) leaves.push_back(txid_of(static_cast<int>(1000 * n + i)));
    const auto root = merkle_root(leaves);
    for (std::size_t i = 0; i < n; ++i) {
      const auto p = merkle_proof(leaves, i);
      CHECK(p.root == root);
      CHECK(merkle_verify(p));

      auto leaf = p;
      leaf.leaf = txid_of(-1);
      CHECK_FALSE(merkle_verify(leaf));
      auto rootx = p;
      rootx.root = txid_of(-2);
      CHECK_FALSE(merkle_verify(rootx));
      if (!p.siblings.empty()) {
        auto sib = p;
        sib.siblings[rng() % sib.siblings.size()] = txid_of(-3);
        CHECK_FALSE(merkle_verify(sib));
      }
    }
  }
  CHECK_THROWS_AS(merkle_proof({}, 0), EmptyBatch);
  CHECK_THROWS_AS(merkle_proofs({}), EmptyBatch);
  CHECK_THROWS_AS(merkle_proof({txid_of(1)}, 1), Error);
}

TEST_CASE("batch proofs equal per-leaf proofs") {
  std::vector<std::string> leaves;
  for (int n = 1; n <= 40; ++n) {
    leaves.push_back(txid_of(5000 + n));
    const auto all = merkle_proofs(leaves);
    REQUIRE(all.size() == leaves.size());
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      const auto one = merkle_proof(leaves, i);
      CHECK(all[i].siblings == one.siblings);
      CHECK(all[i].root == one.root);
      CHECK(all[i].leaf_index == i);
    }
  }
}

TEST_CASE("anchor cost arithmetic") {
  const double single = estimate_anchor_cost(47000, 50, 3445, 1);
  CHECK(std::abs(single - 8.096) <= 0.001);
  CHECK(single == doctest::Approx(47000.0 * 50.0 * 3445.0 / 1e9));
  CHECK(estimate_anchor_cost(47000, 0, 3445, 1) == 0.0);
  const double batched = estimate_anchor_cost(47000, 50, 3445, 1000);
  CHECK(batched < 0.01);
  CHECK(batched == doctest::Approx(single / 1000.0));
  CHECK_THROWS_AS(estimate_anchor_cost(47000, 50, 3445, 0), Error);
  CHECK_THROWS_AS(estimate_anchor_cost(-1, 50, 3445, 1), Error);
}
