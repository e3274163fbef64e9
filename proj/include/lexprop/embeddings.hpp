#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lexprop/corpus.hpp"
#include "lexprop/svd.hpp"

namespace lexprop {

// Positive PMI with context-distribution smoothing on the second argument.
// Not symmetric when smoothing < 1.
class PpmiMatrix {
 public:
  using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  PpmiMatrix() = default;
  PpmiMatrix(Storage m, double smoothing, std::string vocab_hash);

  std::size_t dim() const { return static_cast<std::size_t>(m_.rows()); }
  std::size_t nnz() const { return static_cast<std::size_t>(m_.nonZeros()); }
  double smoothing() const { return smoothing_; }
  const std::string& vocab_hash() const { return vocab_hash_; }
  const Storage& matrix() const { return m_; }
  double at(std::size_t i, std::size_t j) const;

 private:
  Storage m_;
  double smoothing_ = 1.0;
  std::string vocab_hash_;
};

// entry(i,j) = max(log(p(i,j) / (p(i) * p_c(j))), 0), natural log, where
// p_c(j) = colsum(j)^c / sum_k colsum(k)^c.
PpmiMatrix ppmi(const SparseCountMatrix& counts, double smoothing = 0.75);

// "PPMI <dim> <nnz> <smoothing>" followed by every stored "i j value".
void write_ppmi(std::ostream& out, const PpmiMatrix& m);
PpmiMatrix read_ppmi(std::istream& in, std::string vocab_hash = {});

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Row-per-word dense vectors.
class EmbeddingSet {
 public:
  EmbeddingSet() = default;
  EmbeddingSet(Vocabulary vocab, RowMatrix vectors);

  const Vocabulary& vocab() const { return vocab_; }
  std::size_t size() const { return vocab_.size(); }
  std::size_t width() const { return static_cast<std::size_t>(m_.cols()); }
  const RowMatrix& matrix() const { return m_; }

  std::span<const double> row(std::size_t i) const {
    return {m_.data() + i * width(), width()};
  }
  std::span<const double> vector(std::string_view word) const { return row(vocab_.index(word)); }

  // Rows whose norm is at or below `eps`; cosine is undefined on them.
  std::vector<std::size_t> zero_rows(double eps = 1e-12) const;

 private:
  Vocabulary vocab_;
  RowMatrix m_;
};

// Rows of U from the rank-d truncated SVD of the PPMI matrix, singular values
// dropped.
EmbeddingSet svd_embed(const PpmiMatrix& m, const Vocabulary& vocab, int d, std::uint64_t seed,
                       SvdOptions opts = {});

// Clamped to [-1, 1]. Throws DataError("zero vector") on a zero-norm input.
double cosine_similarity(std::span<const double> a, std::span<const double> b);

struct Neighbor {
  std::string word;
  double similarity = 0.0;
};

// The k most cosine-similar other words, descending; ties by vocabulary order.
std::vector<Neighbor> nearest_neighbors(const EmbeddingSet& emb, std::string_view word,
                                        std::size_t k);

struct EmbeddingLoadReport {
  std::vector<std::string> dropped;  // in the file, not in the expected vocabulary
  std::vector<std::string> missing;  // expected, not in the file
};

// Header "<N> <d>", then N lines "word v1 ... vd". With an expected
// vocabulary, rows follow its order and are restricted to it.
EmbeddingSet read_embeddings(std::istream& in, const Vocabulary* expected = nullptr,
                             EmbeddingLoadReport* report = nullptr);
EmbeddingSet load_embeddings(const std::filesystem::path& path, const Vocabulary* expected = nullptr,
                             EmbeddingLoadReport* report = nullptr);
void write_embeddings(std::ostream& out, const EmbeddingSet& emb);

}  // namespace lexprop
