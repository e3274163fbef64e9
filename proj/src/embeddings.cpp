#include "lexprop/embeddings.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "lexprop/error.hpp"
#include "lexprop/simd/kernels.hpp"
#include "lexprop/text.hpp"

namespace lexprop {

PpmiMatrix::PpmiMatrix(Storage m, double smoothing, std::string vocab_hash)
    : m_(std::move(m)), smoothing_(smoothing), vocab_hash_(std::move(vocab_hash)) {
  m_.prune(0.0, 0.0);
  m_.makeCompressed();
}

double PpmiMatrix::at(std::size_t i, std::size_t j) const {
  return m_.coeff(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

PpmiMatrix ppmi(const SparseCountMatrix& counts, double smoothing) {
  if (!(smoothing > 0.0 && smoothing <= 1.0)) throw UsageError("smoothing c must lie in (0, 1]");
  const auto& c = counts.matrix();
  const double total = counts.total();
  if (!(total > 0.0)) throw DataError("no co-occurrence mass");

  const std::vector<double> row = counts.row_sums();
  std::vector<double> col(counts.dim(), 0.0);
  for (Eigen::Index r = 0; r < c.outerSize(); ++r) {
    for (SparseCountMatrix::Storage::InnerIterator it(c, r); it; ++it) col[it.col()] += it.value();
  }
  std::vector<double> col_smoothed(col.size());
  double smoothed_total = 0.0;
  for (std::size_t j = 0; j < col.size(); ++j) {
    col_smoothed[j] = std::pow(col[j], smoothing);
    smoothed_total += col_smoothed[j];
  }

  std::vector<Eigen::Triplet<double>> kept;
  kept.reserve(static_cast<std::size_t>(c.nonZeros()));
  for (Eigen::Index r = 0; r < c.outerSize(); ++r) {
    const double p_row = row[r] / total;
    for (SparseCountMatrix::Storage::InnerIterator it(c, r); it; ++it) {
      const double p_joint = it.value() / total;
      const double p_ctx = col_smoothed[it.col()] / smoothed_total;
      const double pmi = std::log(p_joint / (p_row * p_ctx));
      if (pmi > 0.0) kept.emplace_back(static_cast<int>(r), static_cast<int>(it.col()), pmi);
    }
  }
  PpmiMatrix::Storage m(c.rows(), c.cols());
  m.setFromTriplets(kept.begin(), kept.end());
  return PpmiMatrix(std::move(m), smoothing, counts.vocab_hash());
}

void write_ppmi(std::ostream& out, const PpmiMatrix& m) {
  out << "PPMI " << m.dim() << ' ' << m.nnz() << ' ' << text::format_double(m.smoothing()) << '\n';
  const auto& s = m.matrix();
  for (Eigen::Index r = 0; r < s.outerSize(); ++r) {
    for (PpmiMatrix::Storage::InnerIterator it(s, r); it; ++it) {
      out << r << ' ' << it.col() << ' ' << text::format_double(it.value()) << '\n';
    }
  }
}

PpmiMatrix read_ppmi(std::istream& in, std::string vocab_hash) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("ppmi matrix: missing header");
  auto head = text::split_ws(line);
  if (head.size() != 4 || head[0] != "PPMI") throw DataError("ppmi matrix: bad header '" + line + "'");
  const auto dim = text::parse_int<std::int64_t>(head[1], "dim");
  const auto nnz = text::parse_int<std::int64_t>(head[2], "nnz");
  const double smoothing = text::parse_double(head[3], "smoothing");
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(nnz));
  while (std::getline(in, line)) {
    auto f = text::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 3) throw DataError("ppmi matrix: malformed entry '" + line + "'");
    const auto i = text::parse_int<std::int64_t>(f[0], "row");
    const auto j = text::parse_int<std::int64_t>(f[1], "col");
    const double v = text::parse_double(f[2], "value");
    if (i < 0 || j < 0 || i >= dim || j >= dim) throw DataError("ppmi matrix: index out of range '" + line + "'");
    if (!(v > 0.0)) throw DataError("ppmi matrix: non-positive value '" + line + "'");
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(j), v);
  }
  if (static_cast<std::int64_t>(triplets.size()) != nnz) {
    throw DataError("ppmi matrix: header nnz does not match entry count");
  }
  PpmiMatrix::Storage m(dim, dim);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return PpmiMatrix(std::move(m), smoothing, std::move(vocab_hash));
}

EmbeddingSet::EmbeddingSet(Vocabulary vocab, RowMatrix vectors)
    : vocab_(std::move(vocab)), m_(std::move(vectors)) {
  if (static_cast<std::size_t>(m_.rows()) != vocab_.size()) {
    throw DataError("embedding set: row count does not match vocabulary size");
  }
  if (!m_.allFinite()) throw DataError("embedding set: non-finite entry");
}

std::vector<std::size_t> EmbeddingSet::zero_rows(double eps) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::sqrt(simd::squared_norm(row(i))) <= eps) out.push_back(i);
  }
  return out;
}

EmbeddingSet svd_embed(const PpmiMatrix& m, const Vocabulary& vocab, int d, std::uint64_t seed,
                       SvdOptions opts) {
  if (vocab.size() != m.dim()) throw DataError("svd_embed: vocabulary does not match matrix");
  if (d < 1 || static_cast<std::size_t>(d) > m.dim()) {
    throw UsageError("embedding dimension " + std::to_string(d) + " outside [1, " +
                     std::to_string(m.dim()) + "]");
  }
  if (m.nnz() == 0) throw DataError("svd_embed: empty PPMI matrix");
  opts.seed = seed;
  TruncatedSvd svd = randomized_svd(m.matrix(), d, opts);
  RowMatrix u = svd.U;
  return EmbeddingSet(vocab, std::move(u));
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("cosine_similarity: length mismatch");
  const double na = simd::squared_norm(a);
  const double nb = simd::squared_norm(b);
  if (!(na > 0.0) || !(nb > 0.0)) throw DataError("zero vector");
  const double c = simd::dot(a, b) / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

std::vector<Neighbor> nearest_neighbors(const EmbeddingSet& emb, std::string_view word,
                                        std::size_t k) {
  const std::size_t q = emb.vocab().index(word);
  if (k < 1 || k >= emb.size()) {
    throw UsageError("neighbor count k must lie in [1, " + std::to_string(emb.size() - 1) + "]");
  }
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(emb.size() - 1);
  const auto query = emb.row(q);
  for (std::size_t j = 0; j < emb.size(); ++j) {
    if (j == q) continue;
    if (simd::squared_norm(emb.row(j)) <= 0.0) continue;
    scored.emplace_back(cosine_similarity(query, emb.row(j)), j);
  }
  auto better = [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  };
  const std::size_t take = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(take), scored.end(), better);
  std::vector<Neighbor> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back({emb.vocab().word(scored[i].second), scored[i].first});
  return out;
}

EmbeddingSet read_embeddings(std::istream& in, const Vocabulary* expected, EmbeddingLoadReport* report) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("embedding file: missing header");
  auto head = text::split_ws(line);
  if (head.size() != 2) throw DataError("embedding file: header must be '<N> <d>'");
  const auto n = text::parse_int<std::int64_t>(head[0], "N");
  const auto d = text::parse_int<std::int64_t>(head[1], "d");
  if (n < 0 || d < 1) throw DataError("embedding file: invalid header '" + line + "'");

  std::vector<std::string> words;
  std::vector<double> values;
  std::unordered_set<std::string> seen;
  words.reserve(static_cast<std::size_t>(n));
  values.reserve(static_cast<std::size_t>(n * d));
  std::int64_t rows = 0;
  while (std::getline(in, line)) {
    auto f = text::split_ws(line);
    if (f.empty()) continue;
    ++rows;
    if (static_cast<std::int64_t>(f.size()) != d + 1) {
      throw DataError("embedding file: dimension mismatch on row " + std::to_string(rows) + " (expected " +
                      std::to_string(d) + " values, got " + std::to_string(f.size() - 1) + ")");
    }
    std::string w(f[0]);
    if (!seen.insert(w).second) throw DataError("embedding file: duplicate word '" + w + "'");
    for (std::size_t c = 1; c < f.size(); ++c) values.push_back(text::parse_double(f[c], w));
    words.push_back(std::move(w));
  }
  if (rows != n) {
    throw DataError("embedding file: header declares " + std::to_string(n) + " rows, found " +
                    std::to_string(rows));
  }

  if (!expected) {
    RowMatrix m(n, d);
    std::copy(values.begin(), values.end(), m.data());
    return EmbeddingSet(Vocabulary::from_words(std::move(words)), std::move(m));
  }

  std::unordered_map<std::string, std::size_t> file_row;
  for (std::size_t i = 0; i < words.size(); ++i) file_row.emplace(words[i], i);
  std::vector<std::string> kept_words;
  std::vector<std::uint64_t> kept_counts;
  std::vector<std::size_t> src;
  EmbeddingLoadReport local;
  for (std::size_t i = 0; i < expected->size(); ++i) {
    auto it = file_row.find(expected->word(i));
    if (it == file_row.end()) {
      local.missing.push_back(expected->word(i));
      continue;
    }
    kept_words.push_back(expected->word(i));
    kept_counts.push_back(expected->count(i));
    src.push_back(it->second);
  }
  for (const auto& w : words) {
    if (!expected->contains(w)) local.dropped.push_back(w);
  }
  RowMatrix m(static_cast<Eigen::Index>(src.size()), d);
  for (std::size_t r = 0; r < src.size(); ++r) {
    std::copy_n(values.begin() + static_cast<std::ptrdiff_t>(src[r] * d), d, m.row(static_cast<Eigen::Index>(r)).data());
  }
  if (report) *report = std::move(local);
  return EmbeddingSet(Vocabulary(std::move(kept_words), std::move(kept_counts)), std::move(m));
}

EmbeddingSet load_embeddings(const std::filesystem::path& path, const Vocabulary* expected,
                             EmbeddingLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open embedding file " + path.string());
  return read_embeddings(in, expected, report);
}

void write_embeddings(std::ostream& out, const EmbeddingSet& emb) {
  out << emb.size() << ' ' << emb.width() << '\n';
  for (std::size_t i = 0; i < emb.size(); ++i) {
    out << emb.vocab().word(i);
    for (double v : emb.row(i)) out << ' ' << text::format_double(v);
    out << '\n';
  }
}

}  // namespace lexprop
