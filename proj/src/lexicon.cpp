#include "lexprop/lexicon.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "lexprop/error.hpp"
#include "lexprop/text.hpp"

namespace lexprop {

std::string_view label_name(Label l) {
  switch (l) {
    case Label::Positive:
      return "positive";
    case Label::Neutral:
      return "neutral";
    case Label::Negative:
      return "negative";
  }
  return "neutral";
}

std::optional<Label> parse_label(std::string_view s) {
  const std::string v = text::to_lower(text::trim(s));
  if (v == "positive" || v == "pos" || v == "+") return Label::Positive;
  if (v == "negative" || v == "neg" || v == "-") return Label::Negative;
  if (v == "neutral" || v == "neu" || v == "0") return Label::Neutral;
  return std::nullopt;
}

Lexicon::Lexicon(std::vector<LexiconEntry> entries) : entries_(std::move(entries)) { reindex(); }

void Lexicon::reindex() {
  index_.clear();
  index_.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!index_.emplace(entries_[i].word, i).second) {
      throw DataError("lexicon: duplicate word '" + entries_[i].word + "'");
    }
  }
}

std::optional<std::size_t> Lexicon::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<double> Lexicon::scores() const {
  std::vector<double> s;
  s.reserve(entries_.size());
  for (const auto& e : entries_) s.push_back(e.score);
  return s;
}

std::unordered_map<std::string, double> Lexicon::score_map() const {
  std::unordered_map<std::string, double> m;
  m.reserve(entries_.size());
  for (const auto& e : entries_) m.emplace(e.word, e.score);
  return m;
}

void Lexicon::set_meta(std::string key, std::string value) {
  for (auto& [k, v] : meta_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  meta_.emplace_back(std::move(key), std::move(value));
}

std::optional<std::string> Lexicon::meta(std::string_view key) const {
  for (const auto& [k, v] : meta_) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void standardize(std::span<double> values) {
  if (values.empty()) return;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  var /= static_cast<double>(values.size());
  const double sd = std::sqrt(var);
  for (double& v : values) v = sd > 0.0 ? (v - mean) / sd : 0.0;
}

Lexicon standardized_lexicon(std::span<const std::string> words, std::vector<double> raw) {
  if (words.size() != raw.size()) throw DataError("lexicon: word/score count mismatch");
  standardize(raw);
  std::vector<LexiconEntry> entries(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    entries[i].word = words[i];
    entries[i].score = raw[i];
  }
  return Lexicon(std::move(entries));
}

void write_lexicon(std::ostream& out, const Lexicon& lex) {
  for (const auto& [k, v] : lex.metadata()) out << '#' << k << '=' << v << '\n';
  out << "word\tscore\tstd\tlabel\n";
  for (const auto& e : lex.entries()) {
    out << e.word << '\t' << text::format_double(e.score) << '\t';
    if (e.std) out << text::format_double(*e.std);
    out << '\t';
    if (e.label) out << label_name(*e.label);
    out << '\n';
  }
}

Lexicon read_lexicon(std::istream& in) {
  std::vector<LexiconEntry> entries;
  std::vector<std::pair<std::string, std::string>> meta;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      meta.emplace_back(line.substr(1, eq - 1), line.substr(eq + 1));
      continue;
    }
    auto f = text::split(line, '\t');
    if (!header_seen && !f.empty() && f[0] == "word") {
      header_seen = true;
      continue;
    }
    if (f.size() < 2) throw DataError("lexicon line " + std::to_string(line_no) + ": expected word and score");
    LexiconEntry e;
    e.word = std::string(f[0]);
    e.score = text::parse_double(text::trim(f[1]), e.word);
    if (f.size() > 2 && !text::trim(f[2]).empty()) e.std = text::parse_double(text::trim(f[2]), e.word);
    if (f.size() > 3 && !text::trim(f[3]).empty()) {
      e.label = parse_label(f[3]);
      if (!e.label) throw DataError("lexicon line " + std::to_string(line_no) + ": unknown label");
    }
    entries.push_back(std::move(e));
  }
  Lexicon lex(std::move(entries));
  for (auto& [k, v] : meta) lex.set_meta(std::move(k), std::move(v));
  if (auto u = lex.meta("unreachable"); u && !u->empty()) {
    for (auto w : text::split(*u, ',')) {
      if (auto i = lex.find(w)) lex[*i].unreachable = true;
    }
  }
  return lex;
}

}  // namespace lexprop
