#include "affect/canonical_json.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <vector>

namespace affect::audit {

namespace {

void write_string(std::string& out, const std::string& s) {
  static constexpr char kHex[] = "0123456789abcdef";
  out.push_back('"');
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\b':
        out += "\\b";
        break;
      case '\f':
        out += "\\f";
        break;
      default:
        if (c < 0x20) {
          out += "\\u00";
          out.push_back(kHex[c >> 4]);
          out.push_back(kHex[c & 0xF]);
        } else {
          out.push_back(ch);
        }
    }
  }
  out.push_back('"');
}

void write(std::string& out, const Json& v) {
  switch (v.type()) {
    case Json::value_t::null:
      out += "null";
      break;
    case Json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      break;
    case Json::value_t::number_integer:
      out += std::to_string(v.get<std::int64_t>());
      break;
    case Json::value_t::number_unsigned:
      out += std::to_string(v.get<std::uint64_t>());
      break;
    case Json::value_t::number_float:
      out += format_real(v.get<double>());
      break;
    case Json::value_t::string:
      write_string(out, v.get_ref<const std::string&>());
      break;
    case Json::value_t::array: {
      out.push_back('[');
      bool first = true;
      for (const auto& item : v) {
        if (!first) out.push_back(',');
        first = false;
        write(out, item);
      }
      out.push_back(']');
      break;
    }
    case Json::value_t::object: {
      std::vector<const std::string*> keys;
      keys.reserve(v.size());
      for (const auto& [key, _] : v.items()) keys.push_back(&key);
      // Bytewise (unsigned) ordering.
      std::sort(keys.begin(), keys.end(), [](const std::string* a, const std::string* b) {
        return std::lexicographical_compare(a->begin(), a->end(), b->begin(), b->end(), [](char x, char y) {
          return static_cast<unsigned char>(x) < static_cast<unsigned char>(y);
        });
      });
      out.push_back('{');
      bool first = true;
      for (const auto* key : keys) {
        if (!first) out.push_back(',');
        first = false;
        write_string(out, *key);
        out.push_back(':');
        write(out, v.at(*key));
      }
      out.push_back('}');
      break;
    }
    case Json::value_t::binary:
      throw CanonicalizationError("binary values have no canonical form");
    case Json::value_t::discarded:
      throw CanonicalizationError("discarded value");
  }
}

}  // namespace

std::string format_real(double value) {
  if (!std::isfinite(value)) throw CanonicalizationError("non-finite number");
  // 309 integer digits + sign + point + 12 fraction digits fit comfortably.
  std::array<char, 400> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed,
                                 kCanonicalFractionDigits);
  if (ec != std::errc{}) throw CanonicalizationError("number formatting failed");
  std::string s(buf.data(), end);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

std::string canonicalize(const Json& value) {
  std::string out;
  write(out, value);
  return out;
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const Json::exception& e) {
    throw CanonicalizationError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace affect::audit
