#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "lexprop/corpus.hpp"
#include "lexprop/error.hpp"
#include "lexprop/propagation.hpp"
#include "oracles.hpp"

using namespace lexprop;

namespace {

LexicalGraph barbell(std::size_t clique) {
  std::vector<Edge> edges;
  for (std::size_t side = 0; side < 2; ++side) {
    const std::size_t base = side * clique;
    for (std::size_t i = 0; i < clique; ++i) {
      for (std::size_t j = i + 1; j < clique; ++j) edges.push_back({base + i, base + j, 1.0});
    }
  }
  edges.push_back({clique - 1, clique, 1.0});
  return LexicalGraph(oracle::numbered_vocab(2 * clique), 0, edges);
}

std::vector<std::string> names(std::initializer_list<std::size_t> ids) {
  std::vector<std::string> out;
  for (auto i : ids) out.push_back("n" + std::to_string(i));
  return out;
}

WalkParams tight(double beta) { return {beta, 1e-13, 100000}; }

}  // namespace

TEST_CASE("two-node walk fixed point") {
  const LexicalGraph g(oracle::numbered_vocab(2), 1, {{0, 1, 2.5}});
  const std::vector<std::size_t> seeds{0};
  const WalkResult r = random_walk(g, seeds, {0.5, 1e-12, 1000});
  CHECK(std::abs(r.scores[0] - 2.0 / 3.0) < 1e-9);
  CHECK(std::abs(r.scores[1] - 1.0 / 3.0) < 1e-9);
  CHECK(r.iterations == static_cast<int>(r.step_norms.size()));
}

TEST_CASE("tiny beta returns the teleport vector") {
  std::mt19937_64 rng(1);
  const LexicalGraph g = oracle::random_connected_graph(rng, 10, 10);
  const std::vector<std::size_t> seeds{2, 5};
  const WalkResult r = random_walk(g, seeds, {1e-9, 1e-12, 100});
  for (std::size_t i = 0; i < 10; ++i) {
    const double expect = (i == 2 || i == 5) ? 0.5 : 0.0;
    CHECK(std::abs(r.scores[i] - expect) < 1e-8);
  }
}

TEST_CASE("walk matches the dense linear solve") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 10; ++trial) {
    const LexicalGraph g = oracle::random_connected_graph(rng, 30, 40);
    const std::vector<std::size_t> seeds{0, 7, 19};
    const WalkResult r = random_walk(g, seeds, tight(0.85));
    const Eigen::VectorXd expect = oracle::walk_solve(g, seeds, 0.85);
    for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(r.scores[i] - expect(static_cast<Eigen::Index>(i))) < 1e-8);
  }
}

TEST_CASE("walk reports non-convergence") {
  std::mt19937_64 rng(5);
  const LexicalGraph g = oracle::random_connected_graph(rng, 20, 20);
  const std::vector<std::size_t> seeds{0};
  CHECK_THROWS_AS(random_walk(g, seeds, {0.99, 1e-14, 3}), ConvergenceError);
  CHECK_THROWS_AS(random_walk(g, std::vector<std::size_t>{}, {}), DataError);
  const std::vector<std::string> unknown{"nope"};
  CHECK_THROWS_AS(random_walk(g, unknown, {}), DataError);
}

TEST_CASE("transition matrix kinds") {
  const LexicalGraph g(oracle::numbered_vocab(3), 1, {{0, 1, 1.0}, {1, 2, 3.0}});
  const TransitionMatrix sym(g, TransitionMatrix::Kind::Symmetric);
  CHECK(sym.coeff(0, 1) == doctest::Approx(1.0 / std::sqrt(1.0 * 4.0)));
  CHECK(sym.coeff(1, 0) == doctest::Approx(sym.coeff(0, 1)));
  const TransitionMatrix row(g, TransitionMatrix::Kind::RowStochastic);
  CHECK(row.coeff(1, 0) == doctest::Approx(0.25));
  CHECK(row.coeff(1, 2) == doctest::Approx(0.75));
}

TEST_CASE("polarity combination") {
  const std::vector<double> pos{0.3, 0.0, 0.2}, neg{0.1, 0.0, 0.2};
  std::vector<bool> unreachable;
  const auto c = combine_polarities(pos, neg, &unreachable);
  CHECK(c[0] == doctest::Approx(0.75));
  CHECK(c[1] == 0.5);
  CHECK(c[2] == 0.5);
  CHECK(unreachable == std::vector<bool>{false, true, false});
}

TEST_CASE("mirror graph gives the midpoint word zero") {
  // Path 0 - 1 - 2 - 3 - 4 with the seeds at the ends.
  const LexicalGraph g(oracle::numbered_vocab(5), 1, {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 4, 1.0}});
  const Lexicon lex = sentprop_scores(g, {names({0}), names({4})}, tight(0.9));
  CHECK(std::abs(lex[2].score) < 1e-9);
  CHECK(lex[0].score > 0.0);
  CHECK(lex[4].score < 0.0);
  double mean = 0, var = 0;
  for (const auto& e : lex.entries()) mean += e.score;
  mean /= 5;
  for (const auto& e : lex.entries()) var += (e.score - mean) * (e.score - mean);
  CHECK(std::abs(mean) < 1e-9);
  CHECK(std::abs(var / 5 - 1.0) < 1e-9);
}

TEST_CASE("barbell ordering") {
  const LexicalGraph g = barbell(10);
  const SeedSet seeds{names({0, 1, 2}), names({17, 18, 19})};
  const Lexicon lex = sentprop_scores(g, seeds, tight(0.9));
  double min_a = 1e9, max_b = -1e9;
  for (std::size_t i = 0; i < 10; ++i) min_a = std::min(min_a, lex[i].score);
  for (std::size_t i = 10; i < 20; ++i) max_b = std::max(max_b, lex[i].score);
  CHECK(min_a > max_b);

  const auto pos = oracle::walk_solve(g, {0, 1, 2}, 0.9);
  const auto neg = oracle::walk_solve(g, {17, 18, 19}, 0.9);
  std::vector<double> raw(20);
  for (Eigen::Index i = 0; i < 20; ++i) raw[static_cast<std::size_t>(i)] = pos(i) / (pos(i) + neg(i));
  standardize(raw);
  for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs(raw[i] - lex[i].score) < 1e-6);
}

TEST_CASE("isolated nodes score neutral and are flagged") {
  const LexicalGraph g(oracle::numbered_vocab(4), 1, {{0, 1, 1.0}, {1, 2, 1.0}});
  const Lexicon lex = sentprop_scores(g, {names({0}), names({2})}, tight(0.5));
  CHECK(lex[3].unreachable);
  CHECK(lex.meta("unreachable_count") == "1");
}

TEST_CASE("seed resolution") {
  const Vocabulary v = oracle::numbered_vocab(4);
  const ResolvedSeeds r = resolve_seeds({names({0, 9}), names({1})}, v);
  CHECK(r.positive == std::vector<std::size_t>{0});
  CHECK(r.warnings.size() == 1);
  CHECK_THROWS_AS(resolve_seeds({names({9}), names({1})}, v), DataError);
  CHECK_THROWS_AS(resolve_seeds({names({1}), names({1})}, v), DataError);
}

TEST_CASE("seed file formats") {
  const auto dir = std::filesystem::temp_directory_path() / "lexprop_seed_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "mixed.txt");
    f << "# comment\n+Good\n- bad\n\n+\tnice\n";
  }
  const SeedSet s = read_seed_file(dir / "mixed.txt");
  CHECK(s.positive == std::vector<std::string>{"good", "nice"});
  CHECK(s.negative == std::vector<std::string>{"bad"});
  {
    std::ofstream p(dir / "p.txt");
    p << "good\nnice\n";
    std::ofstream n(dir / "n.txt");
    n << "bad\n";
  }
  const SeedSet s2 = read_seed_files(dir / "p.txt", dir / "n.txt");
  CHECK(s2.positive == s.positive);
  CHECK(s2.negative == s.negative);
  CHECK(seed_checksum(s) == seed_checksum({{"nice", "good"}, {"bad"}}));
  CHECK(seed_checksum(s) != seed_checksum({{"bad"}, {"nice", "good"}}));
  {
    std::ofstream f(dir / "bad.txt");
    f << "good\n";
  }
  CHECK_THROWS_AS(read_seed_file(dir / "bad.txt"), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("clamped propagation closed forms") {
  // One positive seed with a single dependent node; the negative seed sits apart.
  const LexicalGraph g(oracle::numbered_vocab(4), 1, {{0, 1, 0.7}, {2, 3, 1.0}});
  const ResolvedSeeds seeds = resolve_seeds({names({0}), names({2})}, g.vocab());
  const auto y = clamped_raw(g, seeds, {0.9, 1e-12, 10000});
  CHECK(std::abs(y[1] - 1.0) < 1e-9);

  const LexicalGraph p3(oracle::numbered_vocab(3), 1, {{0, 1, 1.0}, {1, 2, 1.0}});
  const auto z = clamped_raw(p3, resolve_seeds({names({0}), names({2})}, p3.vocab()), {0.9, 1e-12, 10000});
  CHECK(std::abs(z[1]) < 1e-12);
  CHECK(z[0] == 1.0);
  CHECK(z[2] == -1.0);
}

TEST_CASE("clamped propagation fixed-point residual") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 5; ++trial) {
    const LexicalGraph g = oracle::random_connected_graph(rng, 20, 25);
    const ResolvedSeeds seeds = resolve_seeds({names({0, 1}), names({2, 3})}, g.vocab());
    const auto y = clamped_raw(g, seeds, {0.9, 1e-12, 100000});
    const TransitionMatrix t(g, TransitionMatrix::Kind::RowStochastic);
    for (std::size_t u = 4; u < 20; ++u) {
      double s = 0.0;
      for (std::size_t v = 0; v < 20; ++v) s += t.coeff(u, v) * y[v];
      CHECK(std::abs(y[u] - s) < 1e-6);
    }
  }
}

TEST_CASE("best paths") {
  const LexicalGraph single(oracle::numbered_vocab(2), 1, {{0, 1, 0.8}});
  const std::vector<std::size_t> src{0};
  CHECK(max_product_paths(single, src, 1)[1] == doctest::Approx(0.8));

  // s=0, a=1, w=2: 0-1 (0.9), 1-2 (0.9), 0-2 (0.5).
  const LexicalGraph tri(oracle::numbered_vocab(3), 1, {{0, 1, 0.9}, {1, 2, 0.9}, {0, 2, 0.5}});
  CHECK(max_product_paths(tri, src, 2)[2] == doctest::Approx(0.81));
  CHECK(max_product_paths(tri, src, 1)[2] == doctest::Approx(0.5));

  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const LexicalGraph g = oracle::random_connected_graph(rng, 30, 30, 0.05, 1.0);
    const std::vector<std::size_t> sources{0, 11};
    const auto got = max_product_paths(g, sources, 4);
    const auto expect = oracle::best_paths(g, sources, 4);
    for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(got[i] - expect[i]) < 1e-15);
  }
}

TEST_CASE("bestpath scores on a cosine graph") {
  // 0 positive seed, 3 negative seed; word 1 hangs off the positive side.
  const LexicalGraph g(oracle::numbered_vocab(5), 1, {{0, 1, 0.8}, {1, 2, 0.5}, {2, 3, 0.5}, {3, 4, 0.9}});
  const Lexicon lex = bestpath_scores(g, {names({0}), names({3})}, 5);
  CHECK(lex[1].score > lex[2].score);
  CHECK(lex[2].score > lex[4].score);
  const LexicalGraph heavy(oracle::numbered_vocab(2), 1, {{0, 1, 2.0}});
  CHECK_THROWS_AS(bestpath_scores(heavy, {names({0}), names({1})}, 2), DataError);
}

TEST_CASE("pmi baseline") {
  // p and n are seeds with equal totals; x sits only next to p, y once next to each.
  const auto docs = tokenize_text("p x p x\nn z n z\np y n\n");
  const Vocabulary v = build_vocabulary(docs, {});
  const auto counts = count_cooccurrences(docs, v, 1);
  const ResolvedSeeds seeds = resolve_seeds({{"p"}, {"n"}}, v);
  const auto raw = pmi_raw(counts, seeds, {});
  CHECK(raw[v.index("x")] > 0.0);
  CHECK(std::abs(raw[v.index("y")]) < 1e-12);
  const Lexicon lex = pmi_baseline(counts, v, {{"p"}, {"n"}}, {});
  CHECK(lex.meta("method") == "pmi");
}

TEST_CASE("pmi baseline matches dense summation") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    auto docs = oracle::random_corpus(rng, 10, 20, 15);
    const Vocabulary v = build_vocabulary(docs, {});
    if (v.size() < 6) continue;
    const auto counts = count_cooccurrences(docs, v, 2);
    const Eigen::MatrixXd c = oracle::to_dense(counts.matrix());
    const ResolvedSeeds seeds = resolve_seeds({{v.word(0), v.word(1)}, {v.word(2)}}, v);
    const PmiBaselineParams params{0.75, 0.01};
    const auto raw = pmi_raw(counts, seeds, params);

    const double total = c.sum();
    double ctx_norm = 0;
    for (Eigen::Index j = 0; j < c.cols(); ++j) ctx_norm += std::pow(c.col(j).sum(), 0.75);
    auto pmi = [&](Eigen::Index w, Eigen::Index s) {
      const double joint = (c(w, s) > 0 ? c(w, s) : 0.01) / total;
      return std::log(joint / ((c.row(w).sum() / total) * (std::pow(c.col(s).sum(), 0.75) / ctx_norm)));
    };
    for (Eigen::Index w = 0; w < c.rows(); ++w) {
      if (c.row(w).sum() == 0) {
        CHECK(std::isnan(raw[static_cast<std::size_t>(w)]));
        continue;
      }
      const double expect = pmi(w, 0) + pmi(w, 1) - pmi(w, 2);
      CHECK(std::abs(raw[static_cast<std::size_t>(w)] - expect) < 1e-10);
    }
  }
}

TEST_CASE("bootstrap with full subsets has zero spread") {
  const LexicalGraph g = barbell(6);
  const SeedSet seeds{names({0, 1, 2}), names({9, 10, 11})};
  BootstrapParams bp;
  bp.samples = 5;
  bp.subset_size = 3;
  const Lexicon lex = bootstrap(g, seeds, tight(0.9), bp);
  const Lexicon plain = sentprop_scores(g, seeds, tight(0.9));
  for (std::size_t i = 0; i < lex.size(); ++i) {
    REQUIRE(lex[i].std.has_value());
    CHECK(*lex[i].std == 0.0);
    CHECK(lex[i].score == doctest::Approx(plain[i].score).epsilon(1e-12));
  }
}

TEST_CASE("bootstrap composes independent runs") {
  const LexicalGraph g = barbell(6);
  const SeedSet seeds{names({0, 1, 2, 3}), names({8, 9, 10, 11})};
  BootstrapParams bp;
  bp.samples = 2;
  bp.subset_size = 2;
  bp.rng_seed = 99;
  const auto subsets = draw_bootstrap_subsets(seeds, 2, 2, 99);
  REQUIRE(subsets.size() == 2);
  const Lexicon a = sentprop_scores(g, subsets[0], tight(0.9));
  const Lexicon b = sentprop_scores(g, subsets[1], tight(0.9));
  const Lexicon lex = bootstrap(g, seeds, tight(0.9), bp);
  for (std::size_t i = 0; i < lex.size(); ++i) {
    const double mean = (a[i].score + b[i].score) / 2;
    const double sd = std::sqrt(((a[i].score - mean) * (a[i].score - mean) + (b[i].score - mean) * (b[i].score - mean)) / 1.0);
    CHECK(lex[i].score == doctest::Approx(mean).epsilon(1e-12));
    CHECK(*lex[i].std == doctest::Approx(sd).epsilon(1e-9));
  }
}

TEST_CASE("bootstrap separates the barbell under the defaults") {
  const LexicalGraph g = barbell(10);
  const SeedSet seeds{names({0, 1, 2, 3, 4, 5, 6, 7, 8, 9}), names({10, 11, 12, 13, 14, 15, 16, 17, 18, 19})};
  const BootstrapParams bp;
  CHECK(bp.samples == 50);
  CHECK(bp.subset_size == 7);
  const Lexicon lex = bootstrap(g, seeds, tight(0.9), bp);
  for (std::size_t i = 0; i < 10; ++i) CHECK(lex[i].score > 0.0);
  for (std::size_t i = 10; i < 20; ++i) CHECK(lex[i].score < 0.0);
}

TEST_CASE("bootstrap argument checks") {
  const LexicalGraph g = barbell(4);
  BootstrapParams bp;
  bp.subset_size = 3;
  CHECK_THROWS_AS(bootstrap(g, {names({0, 1}), names({6, 7})}, tight(0.9), bp), UsageError);
}
