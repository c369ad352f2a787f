#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "affect/text.hpp"

namespace affect::text {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ResourceError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  return s.substr(first, s.find_last_not_of(ws) - first + 1);
}

/// Non-empty, non-comment lines split on tabs, with 1-based line numbers.
std::vector<std::pair<std::size_t, std::vector<std::string>>> tsv_rows(std::string_view content) {
  std::vector<std::pair<std::size_t, std::vector<std::string>>> rows;
  std::size_t line_no = 0;
  while (!content.empty()) {
    const auto nl = content.find('\n');
    std::string_view line = content.substr(0, nl);
    content = nl == std::string_view::npos ? std::string_view{} : content.substr(nl + 1);
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
      const auto tab = line.find('\t', start);
      cols.emplace_back(trim(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start)));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    rows.emplace_back(line_no, std::move(cols));
  }
  return rows;
}

double parse_number(const std::string& s, std::size_t line, const char* what) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw ResourceError("line " + std::to_string(line) + ": invalid " + what + " '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_words(std::string_view phrase) {
  std::vector<std::string> words;
  std::istringstream ss{std::string(phrase)};
  for (std::string w; ss >> w;) words.push_back(to_lower(w));
  return words;
}

}  // namespace

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    auto& e = entries_[i];
    e.lemma = to_lower(e.lemma);
    if (e.lemma.empty()) throw ResourceError("lexicon lemma must be non-empty");
    if (!(e.weight > 0.0 && e.weight <= 1.0)) throw ResourceError("lexicon weight for '" + e.lemma + "' outside (0,1]");
    if (!(e.valence >= -1.0 && e.valence <= 1.0)) {
      throw ResourceError("lexicon valence for '" + e.lemma + "' outside [-1,1]");
    }
    if (!index_.emplace(e.lemma, i).second) throw ResourceError("duplicate lexicon lemma '" + e.lemma + "'");
  }
}

Lexicon Lexicon::parse_tsv(std::string_view content) {
  std::vector<LexiconEntry> entries;
  for (const auto& [line, cols] : tsv_rows(content)) {
    if (cols.front() == "lemma") continue;
    if (cols.size() != 4) throw ResourceError("line " + std::to_string(line) + ": expected 4 columns");
    auto emotion = parse_emotion(cols[1]);
    if (!emotion) throw ResourceError("line " + std::to_string(line) + ": unknown emotion '" + cols[1] + "'");
    entries.push_back({cols[0], *emotion, parse_number(cols[2], line, "weight"), parse_number(cols[3], line, "valence")});
  }
  return Lexicon(std::move(entries));
}

Lexicon Lexicon::load_tsv(const std::filesystem::path& path) { return parse_tsv(read_file(path)); }

const LexiconEntry* Lexicon::find(std::string_view lemma) const {
  auto it = index_.find(lemma);
  return it == index_.end() ? nullptr : &entries_[it->second];
}

LemmaDictionary LemmaDictionary::parse_tsv(std::string_view content) {
  std::map<std::string, std::string, std::less<>> forms;
  for (const auto& [line, cols] : tsv_rows(content)) {
    if (cols.front() == "surface") continue;
    if (cols.size() != 2) throw ResourceError("line " + std::to_string(line) + ": expected 2 columns");
    forms[to_lower(cols[0])] = to_lower(cols[1]);
  }
  return LemmaDictionary(std::move(forms));
}

LemmaDictionary LemmaDictionary::load_tsv(const std::filesystem::path& path) { return parse_tsv(read_file(path)); }

std::string LemmaDictionary::lemma_of(std::string_view surface) const {
  auto it = forms_.find(surface);
  return it == forms_.end() ? std::string(surface) : it->second;
}

IntensifierTable::IntensifierTable(const std::vector<std::pair<std::string, double>>& phrases) {
  for (const auto& [phrase, multiplier] : phrases) {
    if (!(multiplier > 0.0)) throw ResourceError("intensifier multiplier must be positive: '" + phrase + "'");
    auto words = split_words(phrase);
    if (words.empty()) throw ResourceError("empty intensifier phrase");
    entries_.push_back({phrase, std::move(words), multiplier});
  }
  std::stable_sort(entries_.begin(), entries_.end(),
                   [](const Intensifier& a, const Intensifier& b) { return a.words.size() > b.words.size(); });
}

IntensifierTable IntensifierTable::defaults() {
  return IntensifierTable({{"muy", 1.5},
                           {"extremadamente", 2.0},
                           {"sumamente", 1.8},
                           {"totalmente", 1.6},
                           {"algo", 0.8},
                           {"un poco", 0.7},
                           {"poco", 0.6}});
}

const Intensifier* IntensifierTable::match(const std::vector<std::string>& words, std::size_t at) const {
  for (const auto& entry : entries_) {
    if (at + entry.words.size() > words.size()) continue;
    if (std::equal(entry.words.begin(), entry.words.end(), words.begin() + static_cast<std::ptrdiff_t>(at))) {
      return &entry;
    }
  }
  return nullptr;
}

std::set<std::string, std::less<>> default_negation_markers() { return {"no", "nunca", "jamás", "sin", "tampoco"}; }

}  // namespace affect::text
