#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace affect::audit {

using Digest = std::array<std::uint8_t, 32>;

Digest sha256(std::span<const std::uint8_t> bytes);
Digest sha256(std::string_view bytes);

std::string to_hex(std::span<const std::uint8_t> bytes);

/// Exactly 64 hex characters (either case) -> digest.
std::optional<Digest> digest_from_hex(std::string_view hex);

bool is_txid(std::string_view s) noexcept;

/// Lowercase hex SHA-256 of the exact bytes.
std::string compute_txid(std::string_view canonical_bytes);

}  // namespace affect::audit
