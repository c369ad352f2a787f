#include "affect/text.hpp"

namespace affect::text {

namespace {

// Latin-1 supplement code points U+00C0..U+00FF are encoded as C3 80..C3 BF.
constexpr unsigned char kLatin1Lead = 0xC3;

char fold_latin1(unsigned char cont) {
  // cont is the lowercase continuation byte (0xA0..0xBF range).
  switch (cont) {
    case 0xA0: case 0xA1: case 0xA2: case 0xA3: case 0xA4: case 0xA5:
      return 'a';
    case 0xA7:
      return 'c';
    case 0xA8: case 0xA9: case 0xAA: case 0xAB:
      return 'e';
    case 0xAC: case 0xAD: case 0xAE: case 0xAF:
      return 'i';
    case 0xB1:
      return 'n';
    case 0xB2: case 0xB3: case 0xB4: case 0xB5: case 0xB6:
      return 'o';
    case 0xB9: case 0xBA: case 0xBB: case 0xBC:
      return 'u';
    case 0xBD: case 0xBF:
      return 'y';
    default:
      return '\0';
  }
}

}  // namespace

std::string to_lower(std::string_view s) {
  std::string out(s);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c - 'A' + 'a');
    } else if (c == kLatin1Lead && i + 1 < out.size()) {
      auto cont = static_cast<unsigned char>(out[i + 1]);
      if (cont >= 0x80 && cont <= 0x9E && cont != 0x97) out[i + 1] = static_cast<char>(cont + 0x20);
      ++i;
    }
  }
  return out;
}

std::string fold_diacritics(std::string_view s) {
  const std::string lower = to_lower(s);
  std::string out;
  out.reserve(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) {
    auto c = static_cast<unsigned char>(lower[i]);
    if (c == kLatin1Lead && i + 1 < lower.size()) {
      if (char folded = fold_latin1(static_cast<unsigned char>(lower[i + 1]))) {
        out.push_back(folded);
        ++i;
        continue;
      }
    }
    out.push_back(lower[i]);
  }
  return out;
}

}  // namespace affect::text
