#include "lexprop/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "lexprop/checksum.hpp"
#include "lexprop/error.hpp"
#include "lexprop/parallel.hpp"
#include "lexprop/text.hpp"

namespace lexprop {

Vocabulary::Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts)
    : words_(std::move(words)), counts_(std::move(counts)) {
  if (words_.size() != counts_.size()) throw DataError("vocabulary: words/counts size mismatch");
  index_.reserve(words_.size());
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i].empty()) throw DataError("vocabulary: empty word");
    if (counts_[i] == 0) throw DataError("vocabulary: zero count for '" + words_[i] + "'");
    if (!index_.emplace(words_[i], i).second) {
      throw DataError("vocabulary: duplicate word '" + words_[i] + "'");
    }
  }
}

Vocabulary Vocabulary::from_words(std::vector<std::string> words) {
  std::vector<std::uint64_t> counts(words.size(), 1);
  return Vocabulary(std::move(words), std::move(counts));
}

std::optional<std::size_t> Vocabulary::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Vocabulary::index(std::string_view word) const {
  if (auto i = find(word)) return *i;
  throw DataError("word not in vocabulary: '" + std::string(word) + "'");
}

std::string Vocabulary::checksum() const {
  std::string joined;
  for (const auto& w : words_) {
    joined += w;
    joined += '\n';
  }
  return sha256_hex(joined).substr(0, 16);
}

SparseCountMatrix::SparseCountMatrix(Storage m, int window_size, std::string vocab_hash)
    : m_(std::move(m)), window_size_(window_size), vocab_hash_(std::move(vocab_hash)) {
  if (m_.rows() != m_.cols()) throw DataError("count matrix must be square");
  m_.prune(0.0, 0.0);
  m_.makeCompressed();
}

double SparseCountMatrix::at(std::size_t i, std::size_t j) const {
  return m_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

double SparseCountMatrix::total() const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < m_.nonZeros(); ++k) s += m_.valuePtr()[k];
  return s;
}

std::vector<double> SparseCountMatrix::row_sums() const {
  std::vector<double> sums(dim(), 0.0);
  for (Eigen::Index r = 0; r < m_.outerSize(); ++r) {
    for (Storage::InnerIterator it(m_, r); it; ++it) sums[r] += it.value();
  }
  return sums;
}

std::vector<Document> tokenize_text(std::string_view text, const TokenizeOptions& opts) {
  std::vector<Document> docs;
  for (auto line : text::split(text, '\n')) {
    Document doc;
    for (auto tok : text::split_ws(line)) {
      doc.push_back(opts.lowercase ? text::to_lower(tok) : std::string(tok));
    }
    docs.push_back(std::move(doc));
  }
  if (!docs.empty() && docs.back().empty() && !text.empty() && text.back() == '\n') docs.pop_back();
  return docs;
}

std::vector<Document> read_corpus(std::istream& in, const TokenizeOptions& opts) {
  std::vector<Document> docs;
  std::string line;
  while (std::getline(in, line)) {
    Document doc;
    for (auto tok : text::split_ws(line)) {
      doc.push_back(opts.lowercase ? text::to_lower(tok) : std::string(tok));
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> read_corpus_file(const std::filesystem::path& path,
                                       const TokenizeOptions& opts) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file " + path.string());
  return read_corpus(in, opts);
}

WordSet read_word_set(const std::filesystem::path& path, bool lowercase) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open word list " + path.string());
  WordSet words;
  std::string line;
  while (std::getline(in, line)) {
    auto w = text::trim(line);
    if (w.empty()) continue;
    words.insert(lowercase ? text::to_lower(w) : std::string(w));
  }
  return words;
}

Vocabulary build_vocabulary(std::span<const Document> corpus, const VocabularyOptions& opts) {
  if (opts.min_count < 1) throw UsageError("min_count must be >= 1");
  std::unordered_map<std::string, std::uint64_t> freq;
  for (const auto& doc : corpus) {
    for (const auto& tok : doc) {
      if (tok.empty()) throw DataError("empty token in corpus");
      ++freq[tok];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  kept.reserve(freq.size());
  for (auto& [w, c] : freq) {
    if (c < opts.min_count) continue;
    if (opts.stopwords && opts.stopwords->contains(w)) continue;
    kept.emplace_back(w, c);
  }
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  if (opts.top_n && kept.size() > *opts.top_n) kept.resize(*opts.top_n);
  if (kept.empty()) throw DataError("empty vocabulary");

  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  words.reserve(kept.size());
  counts.reserve(kept.size());
  for (auto& [w, c] : kept) {
    words.push_back(std::move(w));
    counts.push_back(c);
  }
  return Vocabulary(std::move(words), std::move(counts));
}

namespace {

using PairCounts = std::unordered_map<std::uint64_t, std::uint64_t>;

inline std::uint64_t pair_key(std::uint32_t i, std::uint32_t j) {
  return (static_cast<std::uint64_t>(i) << 32) | j;
}

void count_document(const Document& doc, const Vocabulary& vocab, int window, PairCounts& acc,
                    std::vector<std::int64_t>& ids) {
  ids.resize(doc.size());
  for (std::size_t t = 0; t < doc.size(); ++t) {
    auto idx = vocab.find(doc[t]);
    ids[t] = idx ? static_cast<std::int64_t>(*idx) : -1;
  }
  for (std::size_t t = 0; t < ids.size(); ++t) {
    if (ids[t] < 0) continue;
    const std::size_t end = std::min(ids.size(), t + 1 + static_cast<std::size_t>(window));
    for (std::size_t u = t + 1; u < end; ++u) {
      if (ids[u] < 0) continue;
      const auto a = static_cast<std::uint32_t>(std::min(ids[t], ids[u]));
      const auto b = static_cast<std::uint32_t>(std::max(ids[t], ids[u]));
      // upper-triangle accumulator; a == b stands for both increments of (a,a)
      acc[pair_key(a, b)] += (a == b) ? 2 : 1;
    }
  }
}

}  // namespace

SparseCountMatrix count_cooccurrences(std::span<const Document> corpus, const Vocabulary& vocab,
                                      int window_size, unsigned threads) {
  if (window_size < 1) throw UsageError("window_size must be >= 1");
  const unsigned shards =
      static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(threads, corpus.size())));
  std::vector<PairCounts> partial(shards);
  const std::size_t per = (corpus.size() + shards - 1) / std::max(1u, shards);
  parallel_for(shards, threads, [&](std::size_t s) {
    std::vector<std::int64_t> ids;
    const std::size_t lo = s * per;
    const std::size_t hi = std::min(corpus.size(), lo + per);
    for (std::size_t d = lo; d < hi; ++d) count_document(corpus[d], vocab, window_size, partial[s], ids);
  });
  // integer sums, so merge order cannot change the result
  std::map<std::uint64_t, std::uint64_t> merged;
  for (auto& p : partial) {
    for (auto& [k, v] : p) merged[k] += v;
  }

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * merged.size());
  for (auto& [k, v] : merged) {
    const auto i = static_cast<int>(k >> 32);
    const auto j = static_cast<int>(k & 0xffffffffULL);
    triplets.emplace_back(i, j, static_cast<double>(v));
    if (i != j) triplets.emplace_back(j, i, static_cast<double>(v));
  }
  const auto n = static_cast<Eigen::Index>(vocab.size());
  SparseCountMatrix::Storage m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseCountMatrix(std::move(m), window_size, vocab.checksum());
}

void write_count_matrix(std::ostream& out, const SparseCountMatrix& m) {
  std::size_t upper = 0;
  const auto& s = m.matrix();
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    for (SparseCountMatrix::Storage::InnerIterator it(s, r); it; ++it) {
      if (it.col() >= r) ++upper;
    }
  }
  out << "COOC " << m.dim() << ' ' << upper << ' ' << m.window_size() << '\n';
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    for (SparseCountMatrix::Storage::InnerIterator it(s, r); it; ++it) {
      if (it.col() < r) continue;
      out << r << ' ' << it.col() << ' ' << text::format_double(it.value()) << '\n';
    }
  }
}

SparseCountMatrix read_count_matrix(std::istream& in, std::string vocab_hash) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("count matrix: missing header");
  auto head = text::split_ws(line);
  if (head.size() != 4 || head[0] != "COOC") throw DataError("count matrix: bad header '" + line + "'");
  const auto dim = text::parse_int<std::int64_t>(head[1], "dim");
  const auto nnz = text::parse_int<std::int64_t>(head[2], "nnz");
  const auto window = text::parse_int<int>(head[3], "window_size");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * nnz));
  std::int64_t seen = 0;
  while (std::getline(in, line)) {
    auto f = text::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 3) throw DataError("count matrix: malformed entry '" + line + "'");
    const auto i = text::parse_int<std::int64_t>(f[0], "row");
    const auto j = text::parse_int<std::int64_t>(f[1], "col");
    const double v = text::parse_double(f[2], "value");
    if (i < 0 || j < 0 || i >= dim || j >= dim || i > j) {
      throw DataError("count matrix: index out of range or below diagonal: '" + line + "'");
    }
    if (!(v > 0.0)) throw DataError("count matrix: non-positive value: '" + line + "'");
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
    if (i != j) triplets.emplace_back(static_cast<int>(j), static_cast<int>(i), v);
    ++seen;
  }
  if (seen != nnz) throw DataError("count matrix: header nnz does not match entry count");
  SparseCountMatrix::Storage m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return SparseCountMatrix(std::move(m), window, std::move(vocab_hash));
}

void write_vocabulary(std::ostream& out, const Vocabulary& v) {
  for (std::size_t i = 0; i < v.size(); ++i) out << v.word(i) << '\t' << v.count(i) << '\n';
}

Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::string line;
  while (std::getline(in, line)) {
    if (text::trim(line).empty()) continue;
    auto f = text::split(line, '\t');
    if (f.size() != 2) throw DataError("vocabulary file: malformed line '" + line + "'");
    words.emplace_back(f[0]);
    counts.push_back(text::parse_int<std::uint64_t>(text::trim(f[1]), "count"));
  }
  return Vocabulary(std::move(words), std::move(counts));
}

}  // namespace lexprop
