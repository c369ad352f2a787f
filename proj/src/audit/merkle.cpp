#include <cstring>

#include "affect/crypto.hpp"
#include "affect/ledger.hpp"

namespace affect::audit {

namespace {

Digest leaf_digest(const std::string& txid) {
  auto d = digest_from_hex(txid);
  if (!d) throw Error("merkle leaf is not a 64-char hex digest: " + txid);
  return *d;
}

Digest hash_pair(const Digest& left, const Digest& right) {
  std::array<std::uint8_t, 64> buf{};
  std::memcpy(buf.data(), left.data(), 32);
  std::memcpy(buf.data() + 32, right.data(), 32);
  return sha256(buf);
}

std::vector<Digest> next_level(std::vector<Digest> level) {
  if (level.size() % 2 == 1) level.push_back(level.back());
  std::vector<Digest> up;
  up.reserve(level.size() / 2);
  for (std::size_t i = 0; i < level.size(); i += 2) up.push_back(hash_pair(level[i], level[i + 1]));
  return up;
}

std::vector<Digest> leaf_level(const std::vector<std::string>& leaves) {
  if (leaves.empty()) throw EmptyBatch("merkle tree needs at least one leaf");
  std::vector<Digest> level;
  level.reserve(leaves.size());
  for (const auto& l : leaves) level.push_back(leaf_digest(l));
  return level;
}

}  // namespace

std::string merkle_root(const std::vector<std::string>& leaves) {
  auto level = leaf_level(leaves);
  while (level.size() > 1) level = next_level(std::move(level));
  return to_hex(level.front());
}

MerkleProof merkle_proof(const std::vector<std::string>& leaves, std::size_t index) {
  auto level = leaf_level(leaves);
  if (index >= level.size()) throw Error("merkle leaf index out of range");
  MerkleProof proof{leaves[index], index, {}, {}};
  std::size_t i = index;
  while (level.size() > 1) {
    if (level.size() % 2 == 1) level.push_back(level.back());
    proof.siblings.push_back(to_hex(level[i ^ 1U]));
    level = next_level(std::move(level));
    i /= 2;
  }
  proof.root = to_hex(level.front());
  return proof;
}

std::vector<MerkleProof> merkle_proofs(const std::vector<std::string>& leaves) {
  std::vector<std::vector<Digest>> levels{leaf_level(leaves)};
  while (levels.back().size() > 1) {
    auto& level = levels.back();
    if (level.size() % 2 == 1) level.push_back(level.back());
    levels.push_back(next_level(level));
  }
  const auto root = to_hex(levels.back().front());
  std::vector<MerkleProof> proofs;
  proofs.reserve(leaves.size());
  for (std::size_t index = 0; index < leaves.size(); ++index) {
    MerkleProof proof{leaves[index], index, {}, root};
    std::size_t i = index;
    for (std::size_t l = 0; l + 1 < levels.size(); ++l, i /= 2) proof.siblings.push_back(to_hex(levels[l][i ^ 1U]));
    proofs.push_back(std::move(proof));
  }
  return proofs;
}

bool merkle_verify(const MerkleProof& proof) {
  auto cur = digest_from_hex(proof.leaf);
  auto root = digest_from_hex(proof.root);
  if (!cur || !root) return false;
  std::size_t i = proof.leaf_index;
  for (const auto& s : proof.siblings) {
    auto sib = digest_from_hex(s);
    if (!sib) return false;
    cur = (i % 2 == 0) ? hash_pair(*cur, *sib) : hash_pair(*sib, *cur);
    i /= 2;
  }
  return i == 0 && *cur == *root;
}

double estimate_anchor_cost(double gas_units, double gas_price_gwei, double eth_usd, std::size_t batch_size) {
  if (batch_size == 0) throw Error("batch_size must be at least 1");
  if (gas_units < 0 || gas_price_gwei < 0 || eth_usd < 0) throw Error("anchor cost inputs must be nonnegative");
  return gas_units * gas_price_gwei * 1e-9 * eth_usd / static_cast<double>(batch_size);
}

}  // namespace affect::audit
