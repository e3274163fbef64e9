#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lexprop {

enum class Label { Positive, Neutral, Negative };

std::string_view label_name(Label l);
std::optional<Label> parse_label(std::string_view s);

struct LexiconEntry {
  std::string word;
  double score = 0.0;
  std::optional<double> std;
  std::optional<Label> label;
  bool unreachable = false;
};

// Per-word polarity scores plus the parameters that produced them.
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<LexiconEntry> entries);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::vector<LexiconEntry>& entries() const { return entries_; }
  std::vector<LexiconEntry>& entries() { return entries_; }
  const LexiconEntry& operator[](std::size_t i) const { return entries_[i]; }
  LexiconEntry& operator[](std::size_t i) { return entries_[i]; }

  std::optional<std::size_t> find(std::string_view word) const;
  std::vector<double> scores() const;
  std::unordered_map<std::string, double> score_map() const;

  // Insertion-ordered; setting an existing key replaces its value in place.
  void set_meta(std::string key, std::string value);
  std::optional<std::string> meta(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& metadata() const { return meta_; }

 private:
  void reindex();

  std::vector<LexiconEntry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::pair<std::string, std::string>> meta_;
};

// Shift and scale to zero mean and unit population variance. A constant
// vector becomes all zeros.
void standardize(std::span<double> values);

// Lexicon with the given words and scores, standardized.
Lexicon standardized_lexicon(std::span<const std::string> words, std::vector<double> raw);

// TSV: "#key=value" metadata lines, the header "word\tscore\tstd\tlabel", then
// one row per word. Empty std/label cells mean absent.
void write_lexicon(std::ostream& out, const Lexicon& lex);
Lexicon read_lexicon(std::istream& in);

}  // namespace lexprop
