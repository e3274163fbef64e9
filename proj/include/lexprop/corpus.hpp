#pragma once

#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace lexprop {

using Document = std::vector<std::string>;
using WordSet = std::unordered_set<std::string>;

struct TokenizeOptions {
  bool lowercase = true;
};

// Bidirectional word <-> index map with occurrence counts. Immutable after
// construction.
class Vocabulary {
 public:
  Vocabulary() = default;
  // Words must be unique and every count >= 1; throws DataError otherwise.
  Vocabulary(std::vector<std::string> words, std::vector<std::uint64_t> counts);
  // All counts set to 1; used for vocabularies that come without frequencies.
  static Vocabulary from_words(std::vector<std::string> words);

  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::string& word(std::size_t i) const { return words_.at(i); }
  std::uint64_t count(std::size_t i) const { return counts_.at(i); }
  const std::vector<std::uint64_t>& counts() const { return counts_; }

  std::optional<std::size_t> find(std::string_view word) const;
  bool contains(std::string_view word) const { return find(word).has_value(); }
  // Throws DataError naming the word when absent.
  std::size_t index(std::string_view word) const;

  // Checksum over the ordered word list; binds matrices and graphs to it.
  std::string checksum() const;

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Symmetric word-word co-occurrence counts.
class SparseCountMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SparseCountMatrix() = default;
  // `m` must be square and symmetric with strictly positive stored values.
  SparseCountMatrix(Storage m, int window_size, std::string vocab_hash);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t nnz() const { return static_cast<std::size_t>(m_.nonZeros()); }
  int window_size() const { return window_size_; }
  const std::string& vocab_hash() const { return vocab_hash_; }
  const Storage& matrix() const { return m_; }

  double at(std::size_t i, std::size_t j) const;
  double total() const;
  std::vector<double> row_sums() const;

 private:
  Storage m_;
  int window_size_ = 0;
  std::string vocab_hash_;
};

std::vector<Document> tokenize_text(std::string_view text, const TokenizeOptions& opts = {});
std::vector<Document> read_corpus(std::istream& in, const TokenizeOptions& opts = {});
std::vector<Document> read_corpus_file(const std::filesystem::path& path,
                                       const TokenizeOptions& opts = {});

// One word per line; blank lines and surrounding whitespace ignored.
WordSet read_word_set(const std::filesystem::path& path, bool lowercase = true);

struct VocabularyOptions {
  std::uint64_t min_count = 1;
  std::optional<std::size_t> top_n;
  const WordSet* stopwords = nullptr;
};

// Words with count >= min_count, minus stopwords, truncated to the top_n most
// frequent. Ordered by descending count, ties lexicographic.
Vocabulary build_vocabulary(std::span<const Document> corpus, const VocabularyOptions& opts);

// Counts every in-vocabulary token pair at distance 1..window_size within a
// line. Out-of-vocabulary tokens keep their positions. Each pair adds 1 to
// (a,b) and 1 to (b,a); a pair of equal words therefore adds 2 to (a,a).
SparseCountMatrix count_cooccurrences(std::span<const Document> corpus, const Vocabulary& vocab,
                                      int window_size, unsigned threads = 1);

// "COOC <dim> <nnz> <window>" followed by "i j value" with i <= j.
void write_count_matrix(std::ostream& out, const SparseCountMatrix& m);
SparseCountMatrix read_count_matrix(std::istream& in, std::string vocab_hash = {});

void write_vocabulary(std::ostream& out, const Vocabulary& v);
Vocabulary read_vocabulary(std::istream& in);

}  // namespace lexprop
