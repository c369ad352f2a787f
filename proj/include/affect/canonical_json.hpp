#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "affect/core.hpp"

namespace affect::audit {

using Json = nlohmann::json;

class CanonicalizationError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kCanonicalVersion = 1;
inline constexpr int kCanonicalFractionDigits = 12;

/// Deterministic JSON encoding:
///  - object keys sorted bytewise ascending, no insignificant whitespace;
///  - integers as plain digits;
///  - reals in fixed notation with at most 12 fractional digits, trailing
///    zeros (and a bare trailing '.') removed, "-0" written as "0";
///  - strings escaped minimally (", \, control characters), UTF-8 passed through.
/// Throws CanonicalizationError on NaN or infinity.
std::string canonicalize(const Json& value);

/// Canonical text of one real number.
std::string format_real(double value);

/// Parses canonical (or any) JSON text; integers stay integers.
Json parse_json(std::string_view text);

}  // namespace affect::audit
