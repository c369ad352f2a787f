#include <fstream>
#include <sstream>

#include "affect/crypto.hpp"
#include "affect/ledger.hpp"

namespace affect::audit {

namespace {

void write_atomically(const std::filesystem::path& path, const std::string& bytes) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw AnchorError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw AnchorError("cannot replace " + path.string() + ": " + ec.message());
}

std::optional<std::string> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<LedgerBlock> parse_blocks(const std::string& text) {
  const auto j = parse_json(text);
  std::vector<LedgerBlock> blocks;
  for (const auto& b : j.at("blocks")) blocks.push_back(block_from_json(b));
  return blocks;
}

}  // namespace

std::string_view to_string(AnchorStatus s) noexcept {
  switch (s) {
    case AnchorStatus::disabled: return "disabled";
    case AnchorStatus::submitted: return "submitted";
    case AnchorStatus::anchored: return "anchored";
  }
  return "disabled";
}

std::string_view to_string(VerificationKind k) noexcept {
  switch (k) {
    case VerificationKind::verified: return "Verified";
    case VerificationKind::tamper_detected: return "TamperDetected";
    case VerificationKind::not_anchored: return "NotAnchored";
  }
  return "NotAnchored";
}

Json to_json(const AnchorRecord& r) {
  Json j = {{"txid", r.txid}, {"status", std::string(to_string(r.status))}, {"gas_used", r.gas_used}};
  if (!r.sender.empty()) j["sender"] = r.sender;
  if (r.block_number) j["block_number"] = *r.block_number;
  if (r.tx_hash) j["tx_hash"] = *r.tx_hash;
  return j;
}

std::string compute_tx_hash(std::uint64_t block_number, const std::string& txid, const std::string& sender,
                            std::size_t entry_index) {
  return compute_txid(std::to_string(block_number) + txid + sender + std::to_string(entry_index));
}

static Json block_content(const LedgerBlock& b) {
  Json entries = Json::array();
  for (const auto& e : b.entries) entries.push_back({{"txid", e.txid}, {"sender", e.sender}, {"tx_hash", e.tx_hash}});
  return {{"block_number", b.block_number},
          {"timestamp", b.timestamp},
          {"entries", entries},
          {"previous_block_hash", b.previous_block_hash}};
}

std::string compute_block_hash(const LedgerBlock& block) { return compute_txid(canonicalize(block_content(block))); }

Json to_json(const LedgerBlock& block) {
  auto j = block_content(block);
  j["block_hash"] = block.block_hash;
  return j;
}

LedgerBlock block_from_json(const Json& j) {
  LedgerBlock b;
  b.block_number = j.at("block_number").get<std::uint64_t>();
  b.timestamp = j.at("timestamp").get<std::string>();
  for (const auto& e : j.at("entries")) {
    b.entries.push_back({e.at("txid").get<std::string>(), e.at("sender").get<std::string>(),
                         e.at("tx_hash").get<std::string>()});
  }
  b.previous_block_hash = j.at("previous_block_hash").get<std::string>();
  b.block_hash = j.at("block_hash").get<std::string>();
  return b;
}

ChainCheck validate_chain(const std::vector<LedgerBlock>& blocks) {
  std::string previous = kGenesisPreviousHash;
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const auto& b = blocks[i];
    auto fail = [&](std::string reason) { return ChainCheck{false, b.block_number, std::move(reason)}; };
    if (b.block_number != i) return fail("block number out of sequence");
    if (b.previous_block_hash != previous) return fail("previous_block_hash does not link");
    for (std::size_t k = 0; k < b.entries.size(); ++k) {
      const auto& e = b.entries[k];
      if (!is_txid(e.txid)) return fail("malformed txid in entry " + std::to_string(k));
      if (e.tx_hash != compute_tx_hash(b.block_number, e.txid, e.sender, k)) {
        return fail("tx_hash mismatch in entry " + std::to_string(k));
      }
    }
    if (compute_block_hash(b) != b.block_hash) return fail("block_hash mismatch");
    previous = b.block_hash;
  }
  return {};
}

std::vector<LedgerBlock> read_ledger_file(const std::filesystem::path& path) {
  const auto text = read_file(path);
  if (!text) throw VerificationUnavailable("cannot read ledger " + path.string());
  try {
    return parse_blocks(*text);
  } catch (const std::exception& e) {
    throw VerificationUnavailable("unparseable ledger " + path.string() + ": " + e.what());
  }
}

// ---- SimulatedLedger --------------------------------------------------------

SimulatedLedger::SimulatedLedger(LedgerConfig config, std::shared_ptr<const Clock> clock)
    : config_(std::move(config)), clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()) {
  if (config_.max_block_entries == 0) throw AnchorError("max_block_entries must be at least 1");
  if (config_.queue_capacity == 0) throw AnchorError("queue_capacity must be at least 1");

  if (std::filesystem::exists(config_.ledger_path)) {
    const auto text = read_file(config_.ledger_path);
    try {
      blocks_ = parse_blocks(text.value_or(""));
    } catch (const std::exception& e) {
      throw AnchorError("corrupt ledger " + config_.ledger_path.string() + ": " + e.what());
    }
    const auto check = validate_chain(blocks_);
    if (!check.valid) {
      throw AnchorError("ledger chain invalid at block " + std::to_string(*check.first_bad_block) + ": " +
                        check.reason);
    }
    for (const auto& b : blocks_) {
      for (const auto& e : b.entries) {
        records_[e.txid] = {e.txid, AnchorStatus::anchored, b.block_number, e.tx_hash, e.sender, config_.gas_per_anchor};
      }
    }
  }
  if (const auto pending = read_file(config_.pending_path)) {
    try {
      const Json parsed = parse_json(*pending);
      for (const auto& t : parsed.at("pending")) {
        const auto txid = t.get<std::string>();
        if (records_.count(txid)) continue;
        queue_.push_back(txid);
        records_[txid] = {txid, AnchorStatus::submitted, std::nullopt, std::nullopt, config_.sender, 0};
      }
    } catch (const std::exception& e) {
      throw AnchorError("corrupt pending queue " + config_.pending_path.string() + ": " + e.what());
    }
  }

  if (!config_.manual_seal) worker_ = std::thread([this] { run(); });
}

SimulatedLedger::~SimulatedLedger() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  wake_.notify_all();
  if (worker_.joinable()) worker_.join();
  try {
    std::lock_guard lock(mutex_);
    seal_locked(true);
    persist_pending_locked();
  } catch (...) {
    // Shutdown must not throw; unsealed txids remain in the pending file.
  }
}

AnchorRecord SimulatedLedger::submit(const std::string& txid) {
  if (!is_txid(txid)) throw AnchorError("malformed txid: " + txid);
  AnchorRecord record;
  bool full_batch = false;
  {
    std::lock_guard lock(mutex_);
    if (auto it = records_.find(txid); it != records_.end()) return it->second;
    record = {txid, AnchorStatus::submitted, std::nullopt, std::nullopt, config_.sender, 0};
    records_[txid] = record;
    if (queue_.size() >= config_.queue_capacity) {
      retry_.push_back(txid);
    } else {
      queue_.push_back(txid);
    }
    full_batch = queue_.size() >= config_.max_block_entries;
  }
  if (full_batch) wake_.notify_one();
  return record;
}

std::size_t SimulatedLedger::seal_now() {
  std::lock_guard lock(mutex_);
  const auto n = seal_locked(true);
  persist_pending_locked();
  return n;
}

void SimulatedLedger::refill_locked() {
  while (!retry_.empty() && queue_.size() < config_.queue_capacity) {
    queue_.push_back(retry_.front());
    retry_.pop_front();
  }
}

std::size_t SimulatedLedger::seal_locked(bool all) {
  std::size_t sealed = 0;
  refill_locked();
  while (!queue_.empty() && (all || queue_.size() >= config_.max_block_entries)) {
    LedgerBlock block;
    block.block_number = blocks_.size();
    block.timestamp = format_iso8601(clock_->now());
    block.previous_block_hash = blocks_.empty() ? std::string(kGenesisPreviousHash) : blocks_.back().block_hash;
    const auto n = std::min(queue_.size(), config_.max_block_entries);
    for (std::size_t k = 0; k < n; ++k) {
      const auto txid = queue_.front();
      queue_.pop_front();
      block.entries.push_back({txid, config_.sender, compute_tx_hash(block.block_number, txid, config_.sender, k)});
    }
    block.block_hash = compute_block_hash(block);
    blocks_.push_back(std::move(block));
    ++sealed;
    refill_locked();
  }
  if (sealed == 0) return 0;

  persist_blocks_locked();
  const auto at = std::chrono::steady_clock::now();
  for (auto b = blocks_.end() - static_cast<std::ptrdiff_t>(sealed); b != blocks_.end(); ++b) {
    for (const auto& e : b->entries) {
      records_[e.txid] = {e.txid, AnchorStatus::anchored, b->block_number, e.tx_hash, e.sender, config_.gas_per_anchor};
      sealed_at_[e.txid] = at;
    }
  }
  return sealed;
}

void SimulatedLedger::run() {
  std::unique_lock lock(mutex_);
  auto deadline = std::chrono::steady_clock::now() + config_.block_interval;
  while (!stopping_) {
    wake_.wait_until(lock, deadline, [&] { return stopping_ || queue_.size() >= config_.max_block_entries; });
    if (stopping_) break;
    const bool interval_elapsed = std::chrono::steady_clock::now() >= deadline;
    try {
      // Full batches seal immediately; a partial batch waits for the interval.
      seal_locked(interval_elapsed);
      persist_pending_locked();
    } catch (const std::exception&) {
      // Entries stay queued in memory and are retried on the next tick.
    }
    if (interval_elapsed) deadline = std::chrono::steady_clock::now() + config_.block_interval;
  }
}

void SimulatedLedger::persist_blocks_locked() const {
  Json arr = Json::array();
  for (const auto& b : blocks_) arr.push_back(to_json(b));
  write_atomically(config_.ledger_path, canonicalize(Json{{"blocks", arr}}) + "\n");
}

void SimulatedLedger::persist_pending_locked() const {
  Json arr = Json::array();
  for (const auto& t : queue_) arr.push_back(t);
  for (const auto& t : retry_) arr.push_back(t);
  write_atomically(config_.pending_path, canonicalize(Json{{"pending", arr}}) + "\n");
}

std::optional<AnchorRecord> SimulatedLedger::record(const std::string& txid) const {
  std::lock_guard lock(mutex_);
  if (auto it = records_.find(txid); it != records_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::chrono::steady_clock::time_point> SimulatedLedger::sealed_at(const std::string& txid) const {
  std::lock_guard lock(mutex_);
  if (auto it = sealed_at_.find(txid); it != sealed_at_.end()) return it->second;
  return std::nullopt;
}

std::vector<LedgerBlock> SimulatedLedger::blocks() const {
  std::lock_guard lock(mutex_);
  return blocks_;
}

std::size_t SimulatedLedger::pending() const {
  std::lock_guard lock(mutex_);
  return queue_.size() + retry_.size();
}

std::size_t SimulatedLedger::retrying() const {
  std::lock_guard lock(mutex_);
  return retry_.size();
}

AnchorRecord anchor_txid(const std::string& txid, SimulatedLedger* ledger) {
  if (!ledger) return {txid, AnchorStatus::disabled, std::nullopt, std::nullopt, {}, 0};
  return ledger->submit(txid);
}

// ---- Verification -----------------------------------------------------------

Verification verify_anchorage(std::string_view file_bytes, const std::string& claimed_txid,
                              const std::vector<LedgerBlock>& blocks) {
  Verification v;
  v.computed_txid = compute_txid(file_bytes);
  if (v.computed_txid != claimed_txid) {
    v.kind = VerificationKind::tamper_detected;
    return v;
  }
  for (const auto& b : blocks) {
    for (const auto& e : b.entries) {
      if (e.txid == claimed_txid) {
        v.kind = VerificationKind::verified;
        v.block_number = b.block_number;
        v.tx_hash = e.tx_hash;
        v.sender = e.sender;
        return v;
      }
    }
  }
  v.kind = VerificationKind::not_anchored;
  return v;
}

Verification verify_anchorage(std::string_view file_bytes, const std::string& claimed_txid,
                              const std::filesystem::path& ledger_path) {
  return verify_anchorage(file_bytes, claimed_txid, read_ledger_file(ledger_path));
}

}  // namespace affect::audit
