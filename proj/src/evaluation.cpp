#include "lexprop/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <numeric>
#include <unordered_set>

#include "lexprop/error.hpp"
#include "lexprop/text.hpp"

namespace lexprop {

std::unordered_map<std::string, Label> GoldLexicon::binary() const {
  std::unordered_map<std::string, Label> out;
  for (const auto& [w, l] : ternary) {
    if (l != Label::Neutral) out.emplace(w, l);
  }
  return out;
}

GoldLexicon read_gold_lexicon(std::istream& in) {
  GoldLexicon gold;
  std::string line;
  std::size_t line_no = 0;
  bool first_data_line = true;
  while (std::getline(in, line)) {
    ++line_no;
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    const bool header_allowed = first_data_line;
    first_data_line = false;
    auto f = text::split(t, '\t');
    if (f.size() < 2) f = text::split_ws(t);
    if (f.size() < 2) throw DataError("gold lexicon line " + std::to_string(line_no) + ": expected two columns");
    const std::string word(text::trim(f[0]));
    const auto value = text::trim(f[1]);
    if (header_allowed && word == "word") continue;
    if (auto label = parse_label(value); label && value != "0") {
      gold.ternary[word] = *label;
      continue;
    }
    double v = 0.0;
    if (!text::try_parse_double(value, v) || !std::isfinite(v)) {
      throw DataError("gold lexicon line " + std::to_string(line_no) + ": '" + std::string(value) +
                      "' is neither a label nor a number");
    }
    gold.continuous[word] = v;
  }
  return gold;
}

GoldLexicon load_gold_lexicon(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open gold lexicon " + path.string());
  try {
    return read_gold_lexicon(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void add_neutral_words(GoldLexicon& gold, std::span<const std::string> words) {
  for (const auto& w : words) gold.ternary.emplace(w, Label::Neutral);
}

void ClassDistribution::validate() const {
  for (double f : {positive, neutral, negative}) {
    if (!(f >= 0.0 && f <= 1.0)) throw UsageError("class fractions must lie in [0, 1]");
  }
  if (std::fabs(positive + neutral + negative - 1.0) > 1e-9) {
    throw UsageError("class fractions must sum to 1");
  }
}

ClassDistribution ClassDistribution::from_gold(const GoldLexicon& gold) {
  std::array<double, 3> c{0, 0, 0};
  for (const auto& [w, l] : gold.ternary) c[static_cast<int>(l)] += 1.0;
  const double n = c[0] + c[1] + c[2];
  if (n == 0) throw DataError("gold lexicon has no labeled words");
  return {c[0] / n, c[1] / n, c[2] / n};
}

double auc(std::span<const double> positive_scores, std::span<const double> negative_scores) {
  if (positive_scores.empty() || negative_scores.empty()) {
    throw DataError("AUC needs at least one positive and one negative word");
  }
  std::vector<double> neg(negative_scores.begin(), negative_scores.end());
  std::sort(neg.begin(), neg.end());
  // twice the Mann-Whitney U, kept integral so the result is exact
  std::uint64_t twice_u = 0;
  for (double s : positive_scores) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), s);
    const auto hi = std::upper_bound(lo, neg.end(), s);
    twice_u += 2 * static_cast<std::uint64_t>(lo - neg.begin()) + static_cast<std::uint64_t>(hi - lo);
  }
  return static_cast<double>(twice_u) /
         (2.0 * static_cast<double>(positive_scores.size()) * static_cast<double>(neg.size()));
}

double auc_binary(const Lexicon& lex, const GoldLexicon& gold) {
  std::vector<double> pos;
  std::vector<double> neg;
  for (const auto& e : lex.entries()) {
    auto it = gold.ternary.find(e.word);
    if (it == gold.ternary.end()) continue;
    if (it->second == Label::Positive) pos.push_back(e.score);
    if (it->second == Label::Negative) neg.push_back(e.score);
  }
  if (pos.empty() || neg.empty()) {
    throw DataError("AUC: lexicon covers " + std::to_string(pos.size()) + " gold-positive and " +
                    std::to_string(neg.size()) + " gold-negative words; need at least one of each");
  }
  return auc(pos, neg);
}

std::array<std::size_t, 3> class_mass_counts(std::size_t n, const ClassDistribution& dist) {
  dist.validate();
  const std::array<double, 3> target{dist.positive * static_cast<double>(n), dist.neutral * static_cast<double>(n),
                                     dist.negative * static_cast<double>(n)};
  std::array<std::size_t, 3> counts{};
  std::size_t assigned = 0;
  for (int c = 0; c < 3; ++c) {
    counts[c] = static_cast<std::size_t>(std::floor(target[c] + 1e-9));
    counts[c] = std::min(counts[c], n - assigned);
    assigned += counts[c];
  }
  // neutral, positive, negative: residue prefers neutral
  std::array<int, 3> order{1, 0, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return target[a] - static_cast<double>(counts[a]) > target[b] - static_cast<double>(counts[b]) + 1e-12;
  });
  for (int idx = 0; assigned < n; idx = (idx + 1) % 3) {
    ++counts[order[idx]];
    ++assigned;
  }
  return counts;
}

Lexicon class_mass_labels(const Lexicon& lex, const ClassDistribution& dist) {
  const std::size_t n = lex.size();
  const auto counts = class_mass_counts(n, dist);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lex[a].score > lex[b].score; });
  Lexicon out = lex;
  for (std::size_t r = 0; r < n; ++r) {
    Label l = Label::Neutral;
    if (r < counts[0]) l = Label::Positive;
    else if (r >= n - counts[2]) l = Label::Negative;
    out[order[r]].label = l;
  }
  out.set_meta("class_mass", text::format_double(dist.positive) + "," + text::format_double(dist.neutral) + "," +
                                 text::format_double(dist.negative));
  return out;
}

double macro_f1(std::span<const Label> predicted, std::span<const Label> gold) {
  if (predicted.size() != gold.size()) throw DataError("macro_f1: length mismatch");
  if (predicted.empty()) throw DataError("macro_f1: no words");
  std::array<std::array<std::size_t, 3>, 3> confusion{};  // [gold][predicted]
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    ++confusion[static_cast<int>(gold[i])][static_cast<int>(predicted[i])];
  }
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double tp = static_cast<double>(confusion[c][c]);
    double pred = 0.0;
    double actual = 0.0;
    for (int o = 0; o < 3; ++o) {
      pred += static_cast<double>(confusion[o][c]);
      actual += static_cast<double>(confusion[c][o]);
    }
    const double precision = pred > 0 ? tp / pred : 0.0;
    const double recall = actual > 0 ? tp / actual : 0.0;
    sum += precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  }
  return sum / 3.0;
}

double ternary_f1(const Lexicon& labeled, const GoldLexicon& gold) {
  std::vector<Label> pred;
  std::vector<Label> truth;
  for (const auto& e : labeled.entries()) {
    if (!e.label) continue;
    auto it = gold.ternary.find(e.word);
    if (it == gold.ternary.end()) continue;
    pred.push_back(*e.label);
    truth.push_back(it->second);
  }
  if (pred.empty()) throw DataError("ternary F1: no labeled words shared with the gold lexicon");
  return macro_f1(pred, truth);
}

namespace {

// Number of inversions of v (pairs i < j with v[i] > v[j]); sorts v.
std::uint64_t count_inversions(std::vector<double>& v, std::vector<double>& buf) {
  const std::size_t n = v.size();
  std::uint64_t swaps = 0;
  buf.resize(n);
  for (std::size_t width = 1; width < n; width *= 2) {
    for (std::size_t lo = 0; lo < n; lo += 2 * width) {
      const std::size_t mid = std::min(lo + width, n);
      const std::size_t hi = std::min(lo + 2 * width, n);
      std::size_t i = lo, j = mid, k = lo;
      while (i < mid && j < hi) {
        if (v[j] < v[i]) {
          swaps += mid - i;
          buf[k++] = v[j++];
        } else {
          buf[k++] = v[i++];
        }
      }
      while (i < mid) buf[k++] = v[i++];
      while (j < hi) buf[k++] = v[j++];
    }
    v.swap(buf);
  }
  return swaps;
}

// Sum over runs of equal values of t(t-1)/2, for a sorted range.
template <typename Eq>
std::uint64_t tied_pairs(std::size_t n, Eq equal) {
  std::uint64_t total = 0;
  std::size_t run = 1;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i < n && equal(i - 1, i)) {
      ++run;
    } else {
      total += static_cast<std::uint64_t>(run) * (run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

}  // namespace

double kendall_tau_b(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("kendall tau: length mismatch");
  const std::size_t n = x.size();
  if (n < 2) throw DataError("kendall tau needs at least 2 words");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return x[a] != x[b] ? x[a] < x[b] : y[a] < y[b];
  });
  const std::uint64_t n0 = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const std::uint64_t ties_x = tied_pairs(n, [&](std::size_t a, std::size_t b) { return x[order[a]] == x[order[b]]; });
  const std::uint64_t ties_xy = tied_pairs(n, [&](std::size_t a, std::size_t b) {
    return x[order[a]] == x[order[b]] && y[order[a]] == y[order[b]];
  });
  std::vector<double> ys(n);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
  std::vector<double> buf;
  const std::uint64_t discordant = count_inversions(ys, buf);  // ys is now sorted
  const std::uint64_t ties_y = tied_pairs(n, [&](std::size_t a, std::size_t b) { return ys[a] == ys[b]; });

  if (ties_x == n0 || ties_y == n0) throw DataError("undefined correlation");
  // concordant - discordant = n0 - ties_x - ties_y + ties_xy - 2 * discordant
  const double numer = static_cast<double>(n0) - static_cast<double>(ties_x) - static_cast<double>(ties_y) +
                       static_cast<double>(ties_xy) - 2.0 * static_cast<double>(discordant);
  const double denom = std::sqrt(static_cast<double>(n0 - ties_x) * static_cast<double>(n0 - ties_y));
  return std::clamp(numer / denom, -1.0, 1.0);
}

double kendall_tau(const Lexicon& lex, const std::unordered_map<std::string, double>& gold) {
  std::vector<double> a;
  std::vector<double> b;
  for (const auto& e : lex.entries()) {
    auto it = gold.find(e.word);
    if (it == gold.end()) continue;
    a.push_back(e.score);
    b.push_back(it->second);
  }
  if (a.size() < 2) throw DataError("kendall tau: fewer than 2 shared words");
  return kendall_tau_b(a, b);
}

std::vector<std::string> top_sentiment_words(const Lexicon& a, const Lexicon& b, const TauTopOptions& opts) {
  if (!(opts.top_frac > 0.0 && opts.top_frac <= 1.0)) throw UsageError("top_frac must lie in (0, 1]");
  std::vector<std::size_t> shared_a;  // indices into a, in a's order
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (b.find(a[i].word)) shared_a.push_back(i);
  }
  if (shared_a.empty()) throw DataError("lexicons share no words");
  const std::size_t n = shared_a.size();
  const auto take = static_cast<std::size_t>(std::ceil(opts.top_frac * static_cast<double>(n) - 1e-9));
  const std::size_t keep = std::clamp<std::size_t>(take, 1, n);

  auto top_of = [&](const Lexicon& lex) {
    std::vector<std::pair<double, std::size_t>> mag;  // (|score|, position in shared_a)
    for (std::size_t p = 0; p < n; ++p) {
      mag.emplace_back(std::fabs(lex[*lex.find(a[shared_a[p]].word)].score), p);
    }
    std::stable_sort(mag.begin(), mag.end(), [](const auto& x, const auto& y) { return x.first > y.first; });
    std::vector<char> in(n, 0);
    for (std::size_t r = 0; r < keep; ++r) in[mag[r].second] = 1;
    return in;
  };
  const auto in_a = top_of(a);
  const auto in_b = top_of(b);
  std::vector<std::string> words;
  for (std::size_t p = 0; p < n; ++p) {
    const bool keep_word = opts.intersection ? (in_a[p] && in_b[p]) : (in_a[p] || in_b[p]);
    if (keep_word) words.push_back(a[shared_a[p]].word);
  }
  return words;
}

double lexicon_tau_top(const Lexicon& a, const Lexicon& b, const TauTopOptions& opts) {
  const auto words = top_sentiment_words(a, b, opts);
  if (words.size() < 2) throw DataError("top-sentiment subset has fewer than 2 words");
  std::vector<double> x;
  std::vector<double> y;
  for (const auto& w : words) {
    x.push_back(a[*a.find(w)].score);
    y.push_back(b[*b.find(w)].score);
  }
  return kendall_tau_b(x, y);
}

SwitchReport polarity_switch_report(std::span<const Lexicon> lexicons, const ClassDistribution& dist,
                                    std::size_t head_epochs, std::size_t tail_epochs) {
  if (head_epochs < 1 || tail_epochs < 1) throw UsageError("head and tail epoch counts must be >= 1");
  if (lexicons.size() < head_epochs + tail_epochs) {
    throw DataError("polarity switch report needs " + std::to_string(head_epochs + tail_epochs) +
                    " lexicons, got " + std::to_string(lexicons.size()));
  }
  std::vector<std::string> shared;
  for (const auto& e : lexicons[0].entries()) {
    bool everywhere = true;
    for (const auto& lex : lexicons.subspan(1)) everywhere = everywhere && lex.find(e.word).has_value();
    if (everywhere) shared.push_back(e.word);
  }
  if (shared.empty()) throw DataError("lexicons share no words");

  auto average = [&](std::span<const Lexicon> group) {
    std::vector<LexiconEntry> entries(shared.size());
    for (std::size_t i = 0; i < shared.size(); ++i) {
      double s = 0.0;
      for (const auto& lex : group) s += lex[*lex.find(shared[i])].score;
      entries[i].word = shared[i];
      entries[i].score = s / static_cast<double>(group.size());
    }
    return class_mass_labels(Lexicon(std::move(entries)), dist);
  };
  const Lexicon head = average(lexicons.first(head_epochs));
  const Lexicon tail = average(lexicons.last(tail_epochs));

  SwitchReport report;
  report.words = shared.size();
  for (std::size_t i = 0; i < shared.size(); ++i) {
    const Label h = *head[i].label;
    const Label t = *tail[i].label;
    if (h != Label::Neutral) ++report.polar_in_head;
    if (h != t) report.changed.push_back(shared[i]);
    if ((h == Label::Positive && t == Label::Negative) || (h == Label::Negative && t == Label::Positive)) {
      report.full_switches.push_back(shared[i]);
    }
  }
  report.full_switch_fraction =
      report.polar_in_head ? static_cast<double>(report.full_switches.size()) / static_cast<double>(report.polar_in_head) : 0.0;
  report.changed_fraction = static_cast<double>(report.changed.size()) / static_cast<double>(report.words);
  return report;
}

}  // namespace lexprop
