#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "affect/canonical_json.hpp"
#include "affect/clock.hpp"

namespace affect::audit {

class AnchorError : public Error {
 public:
  using Error::Error;
};

class VerificationUnavailable : public Error {
 public:
  using Error::Error;
};

class EmptyBatch : public Error {
 public:
  using Error::Error;
};

inline constexpr std::uint64_t kGasPerAnchor = 47000;
inline constexpr const char* kGenesisPreviousHash = "0000000000000000000000000000000000000000000000000000000000000000";

enum class AnchorStatus { disabled, submitted, anchored };
std::string_view to_string(AnchorStatus s) noexcept;

struct AnchorRecord {
  std::string txid;
  AnchorStatus status = AnchorStatus::disabled;
  std::optional<std::uint64_t> block_number;
  std::optional<std::string> tx_hash;
  std::string sender;
  std::uint64_t gas_used = 0;
};

Json to_json(const AnchorRecord& record);

struct LedgerEntry {
  std::string txid;
  std::string sender;
  std::string tx_hash;
};

struct LedgerBlock {
  std::uint64_t block_number = 0;
  std::string timestamp;
  std::vector<LedgerEntry> entries;
  std::string previous_block_hash;
  std::string block_hash;
};

/// SHA-256(decimal block_number || txid || sender || decimal entry index).
std::string compute_tx_hash(std::uint64_t block_number, const std::string& txid, const std::string& sender,
                            std::size_t entry_index);

/// Hash of the canonical block object without its block_hash field.
std::string compute_block_hash(const LedgerBlock& block);

Json to_json(const LedgerBlock& block);
LedgerBlock block_from_json(const Json& j);

struct ChainCheck {
  bool valid = true;
  std::optional<std::uint64_t> first_bad_block;
  std::string reason;
};

/// Recomputes every block hash and tx_hash from genesis and checks linkage.
ChainCheck validate_chain(const std::vector<LedgerBlock>& blocks);

/// Reads a ledger file. Throws VerificationUnavailable if missing or unparseable.
std::vector<LedgerBlock> read_ledger_file(const std::filesystem::path& path);

struct LedgerConfig {
  std::filesystem::path ledger_path = "audit/ledger.json";
  std::filesystem::path pending_path = "audit/ledger_pending.json";
  std::string sender = "0xA0d17E5eA1e4000000000000000000000000c0de";
  std::chrono::milliseconds block_interval{2000};
  std::size_t max_block_entries = 128;
  std::size_t queue_capacity = 4096;
  std::uint64_t gas_per_anchor = kGasPerAnchor;
  /// No background sealer; blocks are sealed only by seal_now() or shutdown.
  bool manual_seal = false;
};

/// Append-only chain of sealed blocks, persisted as one JSON file plus a
/// pending-queue file. submit() only enqueues; a background thread (or
/// seal_now) turns pending entries into blocks.
class SimulatedLedger {
 public:
  explicit SimulatedLedger(LedgerConfig config, std::shared_ptr<const Clock> clock = nullptr);
  ~SimulatedLedger();
  SimulatedLedger(const SimulatedLedger&) = delete;
  SimulatedLedger& operator=(const SimulatedLedger&) = delete;

  /// Never blocks on sealing. A full queue parks the txid in a retry list;
  /// the record still reads submitted.
  AnchorRecord submit(const std::string& txid);

  /// Seals everything queued (including retries). Returns blocks written.
  std::size_t seal_now();

  std::optional<AnchorRecord> record(const std::string& txid) const;
  /// Steady-clock instant at which the txid's block was sealed.
  std::optional<std::chrono::steady_clock::time_point> sealed_at(const std::string& txid) const;

  std::vector<LedgerBlock> blocks() const;
  std::size_t pending() const;
  std::size_t retrying() const;
  const LedgerConfig& config() const noexcept { return config_; }

 private:
  void run();
  std::size_t seal_locked(bool all);
  void refill_locked();
  void persist_blocks_locked() const;
  void persist_pending_locked() const;

  LedgerConfig config_;
  std::shared_ptr<const Clock> clock_;

  mutable std::mutex mutex_;
  std::condition_variable wake_;
  bool stopping_ = false;
  std::deque<std::string> queue_;
  std::deque<std::string> retry_;
  std::vector<LedgerBlock> blocks_;
  std::unordered_map<std::string, AnchorRecord> records_;
  std::unordered_map<std::string, std::chrono::steady_clock::time_point> sealed_at_;
  std::thread worker_;
};

/// Records "disabled" without touching any ledger when ledger is null.
AnchorRecord anchor_txid(const std::string& txid, SimulatedLedger* ledger);

enum class VerificationKind { verified, tamper_detected, not_anchored };
std::string_view to_string(VerificationKind k) noexcept;

struct Verification {
  VerificationKind kind = VerificationKind::not_anchored;
  std::string computed_txid;
  std::optional<std::uint64_t> block_number;
  std::optional<std::string> tx_hash;
  std::optional<std::string> sender;
};

Verification verify_anchorage(std::string_view file_bytes, const std::string& claimed_txid,
                              const std::vector<LedgerBlock>& blocks);
Verification verify_anchorage(std::string_view file_bytes, const std::string& claimed_txid,
                              const std::filesystem::path& ledger_path);

// ---- Merkle aggregation -----------------------------------------------------

struct MerkleProof {
  std::string leaf;  // txid
  std::size_t leaf_index = 0;
  std::vector<std::string> siblings;  // leaf -> root
  std::string root;
};

/// Leaves are txids (their 32-byte digests). An odd level duplicates its last
/// node; parent = SHA-256(left || right). A single leaf is its own root.
std::string merkle_root(const std::vector<std::string>& leaves);
MerkleProof merkle_proof(const std::vector<std::string>& leaves, std::size_t index);
/// Proofs for every leaf from one tree construction.
std::vector<MerkleProof> merkle_proofs(const std::vector<std::string>& leaves);
bool merkle_verify(const MerkleProof& proof);

/// gas_units * gas_price_gwei * 1e-9 * eth_usd / batch_size
double estimate_anchor_cost(double gas_units, double gas_price_gwei, double eth_usd, std::size_t batch_size);

}  // namespace affect::audit
