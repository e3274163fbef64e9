#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lexprop/corpus.hpp"
#include "lexprop/embeddings.hpp"
#include "lexprop/graph.hpp"
#include "lexprop/lexicon.hpp"

namespace lexprop {

struct SeedSet {
  std::vector<std::string> positive;
  std::vector<std::string> negative;
};

// Either "+word" / "-word" lines (also "+ word" or "+\tword"), or plain words
// when read as one side of a two-file pair.
SeedSet read_seed_file(const std::filesystem::path& path);
SeedSet read_seed_files(const std::filesystem::path& positive, const std::filesystem::path& negative);

// Order-independent fingerprint of a seed set.
std::string seed_checksum(const SeedSet& seeds);

struct ResolvedSeeds {
  std::vector<std::size_t> positive;
  std::vector<std::size_t> negative;
  std::vector<std::string> warnings;
};

// Maps seed words to vocabulary ids. Unknown words (and, when `usable` is
// given, words on unusable nodes) are dropped with a warning; an emptied side
// or a word on both sides is a DataError.
ResolvedSeeds resolve_seeds(const SeedSet& seeds, const Vocabulary& vocab,
                            const std::vector<bool>* usable = nullptr);

struct WalkParams {
  double beta = 0.9;
  double tol = 1e-6;
  int max_iter = 500;
};

struct WalkResult {
  std::vector<double> scores;
  int iterations = 0;
  double residual = 0.0;  // final max-norm step
  std::vector<double> step_norms;  // Euclidean norm of each step
};

// Symmetric normalization D^{-1/2} E D^{-1/2} of the graph's edge weights.
// Rows of isolated nodes are zero.
class TransitionMatrix {
 public:
  enum class Kind { Symmetric, RowStochastic };
  TransitionMatrix(const LexicalGraph& g, Kind kind);
  std::size_t size() const { return offsets_.size() - 1; }
  // y = T x
  void apply(std::span<const double> x, std::span<double> y) const;
  double coeff(std::size_t i, std::size_t j) const;

 private:
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> cols_;
  std::vector<double> values_;
};

// Iterates p <- beta T p + (1 - beta) s from p = 1/|V| until the max-norm
// step drops below tol. s puts 1/|S| on each seed. Throws ConvergenceError
// after max_iter iterations.
WalkResult random_walk(const LexicalGraph& g, std::span<const std::size_t> seeds,
                       const WalkParams& params);
WalkResult random_walk(const LexicalGraph& g, std::span<const std::string> seeds,
                       const WalkParams& params);

// p+/(p+ + p-) per word; words with p+ + p- == 0 get 0.5 and are flagged.
std::vector<double> combine_polarities(std::span<const double> pos, std::span<const double> neg,
                                       std::vector<bool>* unreachable = nullptr);

Lexicon sentprop_scores(const LexicalGraph& g, const SeedSet& seeds, const WalkParams& params = {});

// Seed-clamped label propagation with a row-stochastic transition matrix.
// Returns raw label values in [-1, 1].
std::vector<double> clamped_raw(const LexicalGraph& g, const ResolvedSeeds& seeds,
                                const WalkParams& params, int* iterations = nullptr);
Lexicon clamped_propagation(const LexicalGraph& g, const SeedSet& seeds, const WalkParams& params = {});

// Best product of edge weights over walks of at most max_hops edges from any
// source (1 at the sources). Weights must lie in [0, 1].
std::vector<double> max_product_paths(const LexicalGraph& g, std::span<const std::size_t> sources,
                                      int max_hops);

struct BestPathParams {
  std::size_t k = 25;
  int max_hops = 5;
  unsigned threads = 1;
};

// Shortest-path style baseline over the PPMI row-cosine graph:
// pol+(w) - lambda pol-(w), lambda = sum pol+ / sum pol-, standardized.
Lexicon bestpath_scores(const PpmiMatrix& m, const Vocabulary& vocab, const SeedSet& seeds,
                        const BestPathParams& params = {});
Lexicon bestpath_scores(const LexicalGraph& cosine_graph, const SeedSet& seeds, int max_hops);

struct PmiBaselineParams {
  double smoothing = 0.75;
  // Count substituted for word-seed pairs that never co-occur.
  double absent_count = 0.01;
};

// sum_{s in pos} PMI(w, s) - sum_{s in neg} PMI(w, s) with unclamped smoothed
// PMI; standardized. Words with zero total count are left out.
Lexicon pmi_baseline(const SparseCountMatrix& counts, const Vocabulary& vocab, const SeedSet& seeds,
                     const PmiBaselineParams& params = {});
// Raw (unstandardized) scores; NaN for excluded words.
std::vector<double> pmi_raw(const SparseCountMatrix& counts, const ResolvedSeeds& seeds,
                            const PmiBaselineParams& params = {});

struct BootstrapParams {
  int samples = 50;
  std::size_t subset_size = 7;
  std::uint64_t rng_seed = 0;
  unsigned threads = 1;
};

using SeedScorer = std::function<Lexicon(const SeedSet&)>;

// Subsets for each run; run r draws its positive side from stream (seed, r, 0)
// and its negative side from (seed, r, 1), so the sequence is independent of
// execution order.
std::vector<SeedSet> draw_bootstrap_subsets(const SeedSet& seeds, int samples,
                                            std::size_t subset_size, std::uint64_t rng_seed);

// Mean of the per-run scores and their sample standard deviation. All runs
// must list the same words in the same order.
Lexicon aggregate_bootstrap(std::span<const Lexicon> runs);

Lexicon bootstrap(const SeedScorer& scorer, const SeedSet& seeds, const BootstrapParams& params);
Lexicon bootstrap(const LexicalGraph& g, const SeedSet& seeds, const WalkParams& walk,
                  const BootstrapParams& params = {});

}  // namespace lexprop
