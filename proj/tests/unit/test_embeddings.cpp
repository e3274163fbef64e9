#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "lexprop/embeddings.hpp"
#include "lexprop/error.hpp"
#include "lexprop/svd.hpp"
#include "oracles.hpp"

using namespace lexprop;

namespace {

SparseCountMatrix counts_from(const Eigen::MatrixXd& dense) {
  SparseCountMatrix::Storage s = dense.sparseView();
  return SparseCountMatrix(s, 1, "");
}

SparseRowMatrix random_sparse(std::mt19937_64& rng, int rows, int cols, double density) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      if (u(rng) < density) m(i, j) = g(rng);
    }
  }
  return m.sparseView();
}

}  // namespace

TEST_CASE("ppmi closed forms") {
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(2, 2);
  CHECK(ppmi(counts_from(ones), 1.0).nnz() == 0);

  Eigen::MatrixXd off(2, 2);
  off << 0, 2, 2, 0;
  const PpmiMatrix p = ppmi(counts_from(off), 1.0);
  CHECK(p.nnz() == 2);
  CHECK(p.at(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(p.at(1, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));

  CHECK_THROWS_WITH_AS(ppmi(SparseCountMatrix(SparseCountMatrix::Storage(3, 3), 1, ""), 0.75),
                       "no co-occurrence mass", DataError);
  CHECK_THROWS_AS(ppmi(counts_from(off), 0.0), UsageError);
}

TEST_CASE("ppmi matches the dense formula on random counts") {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> cnt(0, 6);
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::MatrixXd c = Eigen::MatrixXd::Zero(20, 20);
    for (int i = 0; i < 20; ++i) {
      for (int j = i; j < 20; ++j) {
        const int v = cnt(rng) > 3 ? cnt(rng) : 0;
        c(i, j) = c(j, i) = v;
      }
    }
    for (double sm : {0.75, 1.0}) {
      const PpmiMatrix p = ppmi(counts_from(c), sm);
      const Eigen::MatrixXd expect = oracle::ppmi(c, sm);
      CHECK((Eigen::MatrixXd(p.matrix()) - expect).cwiseAbs().maxCoeff() < 1e-12);
      for (int k = 0; k < p.matrix().outerSize(); ++k) {
        for (PpmiMatrix::Storage::InnerIterator it(p.matrix(), k); it; ++it) CHECK(it.value() > 0.0);
      }
    }
  }
}

TEST_CASE("ppmi file round-trip keeps asymmetric entries") {
  Eigen::MatrixXd c(3, 3);
  c << 0, 5, 1, 5, 0, 2, 1, 2, 4;
  const PpmiMatrix p = ppmi(counts_from(c), 0.75);
  std::stringstream ss;
  write_ppmi(ss, p);
  const PpmiMatrix q = read_ppmi(ss);
  CHECK((Eigen::MatrixXd(q.matrix()) - Eigen::MatrixXd(p.matrix())).cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.smoothing() == 0.75);
}

TEST_CASE("svd of a diagonal matrix") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d.diagonal() << 3, 2, 1;
  const PpmiMatrix p(d.sparseView(), 1.0, "");
  const EmbeddingSet emb = svd_embed(p, Vocabulary::from_words({"a", "b", "c"}), 2, 1);
  CHECK(std::abs(emb.row(0)[0]) == doctest::Approx(1.0));
  CHECK(std::abs(emb.row(0)[1]) < 1e-10);
  CHECK(std::abs(emb.row(1)[1]) == doctest::Approx(1.0));
  CHECK(std::abs(emb.row(1)[0]) < 1e-10);
  CHECK(std::abs(emb.row(2)[0]) + std::abs(emb.row(2)[1]) < 1e-10);
  CHECK(emb.zero_rows() == std::vector<std::size_t>{2});
}

TEST_CASE("full-rank svd reconstructs the matrix") {
  std::mt19937_64 rng(9);
  const SparseRowMatrix a = random_sparse(rng, 30, 30, 0.3);
  const TruncatedSvd svd = randomized_svd(a, 30, {});
  const Eigen::MatrixXd recon = svd.U * svd.S.asDiagonal() * svd.V.transpose();
  const Eigen::MatrixXd dense(a);
  CHECK((recon - dense).norm() / dense.norm() < 1e-6);
}

TEST_CASE("truncated svd matches the Gram-matrix eigensolver") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseRowMatrix a = random_sparse(rng, 50, 50, 0.15);
    SvdOptions opts;
    opts.seed = static_cast<std::uint64_t>(trial);
    const TruncatedSvd svd = randomized_svd(a, 10, opts);
    const Eigen::MatrixXd dense(a);
    const Eigen::VectorXd sv = oracle::singular_values(dense);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(svd.S(i) - sv(i)) / sv(i) < 1e-6);
    const Eigen::MatrixXd gram = svd.U.transpose() * svd.U;
    CHECK((gram - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(oracle::subspace_angle(svd.U, oracle::left_subspace(dense, 10)) < 1e-4);
  }
}

TEST_CASE("svd sign convention and determinism") {
  std::mt19937_64 rng(4);
  const SparseRowMatrix a = random_sparse(rng, 40, 40, 0.2);
  const TruncatedSvd x = randomized_svd(a, 5, {});
  const TruncatedSvd y = randomized_svd(a, 5, {});
  CHECK(x.U == y.U);
  for (int c = 0; c < 5; ++c) {
    Eigen::Index at = 0;
    x.U.col(c).cwiseAbs().maxCoeff(&at);
    CHECK(x.U(at, c) > 0.0);
  }
}

TEST_CASE("svd reports non-convergence with the residual") {
  std::mt19937_64 rng(8);
  const SparseRowMatrix a = random_sparse(rng, 60, 60, 0.3);
  SvdOptions opts;
  opts.oversampling = 0;
  opts.min_power_iterations = 1;
  opts.max_power_iterations = 1;
  opts.tolerance = 1e-15;
  try {
    randomized_svd(a, 10, opts);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(e.residual() > 1e-15);
  }
}

TEST_CASE("svd_embed range checks") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Identity(3, 3);
  const PpmiMatrix p(d.sparseView(), 1.0, "");
  const Vocabulary v = Vocabulary::from_words({"a", "b", "c"});
  CHECK_THROWS_AS(svd_embed(p, v, 4, 0), UsageError);
  CHECK_THROWS_AS(svd_embed(p, v, 0, 0), UsageError);
}

TEST_CASE("cosine similarity") {
  const std::vector<double> a{1, 2, 3}, b{-1, -2, -3}, e1{1, 0, 0}, e2{0, 1, 0}, z{0, 0, 0};
  CHECK(cosine_similarity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(cosine_similarity(a, b) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(cosine_similarity(e1, e2) == 0.0);
  CHECK_THROWS_WITH_AS(cosine_similarity(a, z), "zero vector", DataError);
}

TEST_CASE("nearest neighbors") {
  RowMatrix m(3, 2);
  m << 1, 0, 1, 0, 0, 1;
  const EmbeddingSet emb(Vocabulary::from_words({"a", "b", "c"}), m);
  const auto nn = nearest_neighbors(emb, "a", 1);
  REQUIRE(nn.size() == 1);
  CHECK(nn[0].word == "b");
  CHECK(nn[0].similarity == doctest::Approx(1.0));
  CHECK(nearest_neighbors(emb, "a", 2).size() == 2);
  CHECK_THROWS_AS(nearest_neighbors(emb, "zzz", 1), DataError);
}

TEST_CASE("nearest neighbors agree with a linear scan") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  RowMatrix m(100, 10);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  const EmbeddingSet emb(oracle::numbered_vocab(100), m);
  std::uniform_int_distribution<std::size_t> pick(0, 99);
  for (int q = 0; q < 20; ++q) {
    const std::size_t w = pick(rng);
    std::vector<std::pair<double, std::size_t>> scan;
    for (std::size_t j = 0; j < 100; ++j) {
      if (j != w) scan.emplace_back(oracle::cosine(m.row(w).data(), m.row(j).data(), 10), j);
    }
    std::sort(scan.begin(), scan.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    const auto nn = nearest_neighbors(emb, emb.vocab().word(w), 7);
    for (std::size_t t = 0; t < 7; ++t) {
      CHECK(nn[t].word == emb.vocab().word(scan[t].second));
      CHECK(nn[t].similarity == doctest::Approx(scan[t].first).epsilon(1e-12));
    }
  }
}

TEST_CASE("embedding file reading") {
  std::stringstream f("2 3\na 1 0 0\nb 0 1 0\n");
  const EmbeddingSet e = read_embeddings(f);
  CHECK(e.size() == 2);
  CHECK(e.width() == 3);

  std::stringstream f2("2 3\na 1 0 0\nb 0 1 0\n");
  const Vocabulary only_a = Vocabulary::from_words({"a"});
  EmbeddingLoadReport report;
  const EmbeddingSet ea = read_embeddings(f2, &only_a, &report);
  CHECK(ea.size() == 1);
  CHECK(report.dropped == std::vector<std::string>{"b"});

  std::stringstream bad_dim("2 3\na 1 0\nb 0 1 0\n");
  CHECK_THROWS_AS(read_embeddings(bad_dim), DataError);
  std::stringstream bad_num("1 2\na 1 x\n");
  CHECK_THROWS_AS(read_embeddings(bad_num), DataError);
  std::stringstream dup("2 1\na 1\na 2\n");
  CHECK_THROWS_AS(read_embeddings(dup), DataError);
}

TEST_CASE("embedding round-trip") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  RowMatrix m(15, 4);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
  const EmbeddingSet e(oracle::numbered_vocab(15), m);
  std::stringstream ss;
  write_embeddings(ss, e);
  const EmbeddingSet back = read_embeddings(ss);
  CHECK(back.vocab().words() == e.vocab().words());
  CHECK((back.matrix() - e.matrix()).cwiseAbs().maxCoeff() == 0.0);
}
