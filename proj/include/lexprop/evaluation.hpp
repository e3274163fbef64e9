#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "lexprop/lexicon.hpp"

namespace lexprop {

struct GoldLexicon {
  std::unordered_map<std::string, Label> ternary;
  std::unordered_map<std::string, double> continuous;

  // Ternary entries minus neutrals.
  std::unordered_map<std::string, Label> binary() const;
};

// TSV "word<TAB>positive|neutral|negative" or "word<TAB><valence>". Lines
// starting with '#' and a leading "word" header are skipped.
GoldLexicon read_gold_lexicon(std::istream& in);
GoldLexicon load_gold_lexicon(const std::filesystem::path& path);
// Adds the words as neutral entries (existing labels win).
void add_neutral_words(GoldLexicon& gold, std::span<const std::string> words);

struct ClassDistribution {
  double positive = 1.0 / 3.0;
  double neutral = 1.0 / 3.0;
  double negative = 1.0 / 3.0;

  void validate() const;
  // Label proportions of the gold ternary entries.
  static ClassDistribution from_gold(const GoldLexicon& gold);
};

// Mann-Whitney AUC of positives over negatives; ties count one half.
double auc(std::span<const double> positive_scores, std::span<const double> negative_scores);
// AUC of lexicon scores on the shared non-neutral gold words.
double auc_binary(const Lexicon& lex, const GoldLexicon& gold);

// Counts (positive, neutral, negative) for n words. Each class gets the
// floor of n*frac and the leftover words go to the largest fractional parts
// (neutral first on ties, then positive), so every count is within 1 of n*frac.
std::array<std::size_t, 3> class_mass_counts(std::size_t n, const ClassDistribution& dist);
// Top-scored words become positive and bottom-scored negative; ties are
// broken by lexicon order.
Lexicon class_mass_labels(const Lexicon& lex, const ClassDistribution& dist);

// Macro-averaged F1 over {positive, neutral, negative}; a class with no
// predictions has precision 0.
double macro_f1(std::span<const Label> predicted, std::span<const Label> gold);
double ternary_f1(const Lexicon& labeled, const GoldLexicon& gold);

// Kendall tau-b in O(n log n). Throws DataError("undefined correlation")
// when either side is constant.
double kendall_tau_b(std::span<const double> x, std::span<const double> y);
double kendall_tau(const Lexicon& lex, const std::unordered_map<std::string, double>& gold);

struct TauTopOptions {
  double top_frac = 0.25;
  // Use the intersection of the two top sets instead of their union.
  bool intersection = false;
};

// Shared words whose |score| ranks in the top ceil(top_frac * n) of A or of B.
std::vector<std::string> top_sentiment_words(const Lexicon& a, const Lexicon& b, const TauTopOptions& opts);
double lexicon_tau_top(const Lexicon& a, const Lexicon& b, const TauTopOptions& opts = {});

struct SwitchReport {
  std::size_t words = 0;           // shared vocabulary size
  std::size_t polar_in_head = 0;   // non-neutral in the head average
  std::vector<std::string> full_switches;  // positive <-> negative
  std::vector<std::string> changed;        // any label change
  double full_switch_fraction = 0.0;       // of polar_in_head
  double changed_fraction = 0.0;           // of words
};

// Averages the first head_epochs and the last tail_epochs lexicons over their
// shared words. Both averages are labeled by class mass before comparison.
SwitchReport polarity_switch_report(std::span<const Lexicon> lexicons, const ClassDistribution& dist,
                                    std::size_t head_epochs, std::size_t tail_epochs);

}  // namespace lexprop
