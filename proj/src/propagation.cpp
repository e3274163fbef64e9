#include "lexprop/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "lexprop/checksum.hpp"
#include "lexprop/error.hpp"
#include "lexprop/parallel.hpp"
#include "lexprop/rng.hpp"
#include "lexprop/simd/kernels.hpp"
#include "lexprop/text.hpp"

namespace lexprop {

namespace {

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open seed file " + path.string());
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = text::trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

std::string join(const std::vector<std::string>& items, char sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

std::string fmt(double v) { return text::format_double(v); }

void annotate_unreachable(Lexicon& lex) {
  std::vector<std::string> words;
  for (const auto& e : lex.entries()) {
    if (e.unreachable) words.push_back(e.word);
  }
  lex.set_meta("unreachable_count", std::to_string(words.size()));
  lex.set_meta("unreachable", join(words, ','));
}

void annotate_seeds(Lexicon& lex, const SeedSet& seeds, const ResolvedSeeds& resolved) {
  lex.set_meta("seed_checksum", seed_checksum(seeds));
  lex.set_meta("seeds_used", std::to_string(resolved.positive.size()) + "+/" +
                                 std::to_string(resolved.negative.size()) + "-");
  if (!resolved.warnings.empty()) lex.set_meta("seed_warnings", join(resolved.warnings, ';'));
}

std::vector<bool> connected_nodes(const LexicalGraph& g) {
  std::vector<bool> usable(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) usable[i] = !g.isolated(i);
  return usable;
}

void check_walk_params(const WalkParams& p) {
  if (!(p.beta > 0.0 && p.beta < 1.0)) throw UsageError("beta must lie in (0, 1)");
  if (!(p.tol > 0.0)) throw UsageError("tol must be positive");
  if (p.max_iter < 1) throw UsageError("max_iter must be >= 1");
}

}  // namespace

SeedSet read_seed_file(const std::filesystem::path& path) {
  SeedSet seeds;
  for (const auto& line : read_lines(path)) {
    std::string_view rest = line;
    bool positive;
    if (rest.starts_with("+")) {
      positive = true;
      rest.remove_prefix(1);
    } else if (rest.starts_with("-")) {
      positive = false;
      rest.remove_prefix(1);
    } else if (rest.starts_with("−")) {
      positive = false;
      rest.remove_prefix(std::string_view("−").size());
    } else {
      throw DataError("seed file " + path.string() + ": line '" + line + "' lacks a +/- prefix");
    }
    auto word = text::trim(rest);
    if (word.empty()) throw DataError("seed file " + path.string() + ": empty seed word");
    (positive ? seeds.positive : seeds.negative).push_back(text::to_lower(word));
  }
  return seeds;
}

SeedSet read_seed_files(const std::filesystem::path& positive, const std::filesystem::path& negative) {
  SeedSet seeds;
  for (auto& w : read_lines(positive)) seeds.positive.push_back(text::to_lower(w));
  for (auto& w : read_lines(negative)) seeds.negative.push_back(text::to_lower(w));
  return seeds;
}

std::string seed_checksum(const SeedSet& seeds) {
  std::vector<std::string> pos = seeds.positive;
  std::vector<std::string> neg = seeds.negative;
  std::sort(pos.begin(), pos.end());
  std::sort(neg.begin(), neg.end());
  return sha256_hex("+" + join(pos, ',') + "|-" + join(neg, ',')).substr(0, 16);
}

ResolvedSeeds resolve_seeds(const SeedSet& seeds, const Vocabulary& vocab, const std::vector<bool>* usable) {
  ResolvedSeeds out;
  auto resolve_side = [&](const std::vector<std::string>& words, std::vector<std::size_t>& ids,
                          const char* side) {
    std::set<std::size_t> seen;
    for (const auto& w : words) {
      auto i = vocab.find(w);
      if (!i) {
        out.warnings.push_back(std::string(side) + " seed '" + w + "' not in vocabulary; dropped");
        continue;
      }
      if (usable && !(*usable)[*i]) {
        out.warnings.push_back(std::string(side) + " seed '" + w + "' is an isolated node; dropped");
        continue;
      }
      if (seen.insert(*i).second) ids.push_back(*i);
    }
    if (ids.empty()) throw DataError(std::string("no resolvable ") + side + " seeds");
  };
  if (seeds.positive.empty() || seeds.negative.empty()) {
    throw DataError("seed set must be non-empty on both sides");
  }
  resolve_side(seeds.positive, out.positive, "positive");
  resolve_side(seeds.negative, out.negative, "negative");
  for (std::size_t p : out.positive) {
    if (std::find(out.negative.begin(), out.negative.end(), p) != out.negative.end()) {
      throw DataError("seed '" + vocab.word(p) + "' is both positive and negative");
    }
  }
  return out;
}

TransitionMatrix::TransitionMatrix(const LexicalGraph& g, Kind kind) {
  const std::size_t n = g.size();
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + g.neighbors(i).size();
  cols_.resize(offsets_[n]);
  values_.resize(offsets_[n]);
  std::vector<double> inv_sqrt(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.degree(i) > 0.0) inv_sqrt[i] = 1.0 / std::sqrt(g.degree(i));
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pos = offsets_[i];
    for (const auto& arc : g.neighbors(i)) {
      cols_[pos] = arc.target;
      values_[pos] = kind == Kind::Symmetric ? arc.weight * inv_sqrt[i] * inv_sqrt[arc.target]
                                             : arc.weight / g.degree(i);
      ++pos;
    }
  }
}

void TransitionMatrix::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) s += values_[p] * x[cols_[p]];
    y[i] = s;
  }
}

double TransitionMatrix::coeff(std::size_t i, std::size_t j) const {
  for (std::size_t p = offsets_[i]; p < offsets_[i + 1]; ++p) {
    if (cols_[p] == j) return values_[p];
  }
  return 0.0;
}

namespace {

WalkResult walk_with(const TransitionMatrix& t, std::span<const std::size_t> seeds, const WalkParams& params) {
  check_walk_params(params);
  const std::size_t n = t.size();
  if (seeds.empty()) throw DataError("random walk: no resolvable seeds");
  std::vector<double> s(n, 0.0);
  for (std::size_t i : seeds) s[i] = 1.0 / static_cast<double>(seeds.size());
  std::vector<double> p(n, 1.0 / static_cast<double>(n));
  std::vector<double> next(n, 0.0);

  WalkResult out;
  for (int it = 1; it <= params.max_iter; ++it) {
    t.apply(p, next);
    simd::axpby(1.0 - params.beta, s, params.beta, next);
    const double step = simd::max_abs_diff(next, p);
    out.step_norms.push_back(std::sqrt(simd::squared_distance(next, p)));
    p.swap(next);
    out.iterations = it;
    out.residual = step;
    if (step < params.tol) {
      out.scores = std::move(p);
      return out;
    }
  }
  std::ostringstream msg;
  msg << "random walk did not converge in " << params.max_iter << " iterations (residual " << out.residual
      << ", tol " << params.tol << ")";
  throw ConvergenceError(msg.str(), out.residual);
}

}  // namespace

WalkResult random_walk(const LexicalGraph& g, std::span<const std::size_t> seeds, const WalkParams& params) {
  for (std::size_t i : seeds) {
    if (i >= g.size()) throw DataError("random walk: seed index out of range");
  }
  std::vector<std::size_t> kept;
  for (std::size_t i : seeds) {
    if (!g.isolated(i)) kept.push_back(i);
  }
  return walk_with(TransitionMatrix(g, TransitionMatrix::Kind::Symmetric), kept, params);
}

WalkResult random_walk(const LexicalGraph& g, std::span<const std::string> seeds, const WalkParams& params) {
  std::vector<std::size_t> ids;
  for (const auto& w : seeds) {
    if (auto i = g.vocab().find(w); i && !g.isolated(*i)) ids.push_back(*i);
  }
  return random_walk(g, ids, params);
}

std::vector<double> combine_polarities(std::span<const double> pos, std::span<const double> neg,
                                       std::vector<bool>* unreachable) {
  if (pos.size() != neg.size()) throw DataError("combine_polarities: length mismatch");
  std::vector<double> out(pos.size());
  if (unreachable) unreachable->assign(pos.size(), false);
  for (std::size_t i = 0; i < pos.size(); ++i) {
    const double total = pos[i] + neg[i];
    if (total > 0.0) {
      out[i] = pos[i] / total;
    } else {
      out[i] = 0.5;
      if (unreachable) (*unreachable)[i] = true;
    }
  }
  return out;
}

Lexicon sentprop_scores(const LexicalGraph& g, const SeedSet& seeds, const WalkParams& params) {
  const auto usable = connected_nodes(g);
  const ResolvedSeeds resolved = resolve_seeds(seeds, g.vocab(), &usable);
  const TransitionMatrix t(g, TransitionMatrix::Kind::Symmetric);
  const WalkResult pos = walk_with(t, resolved.positive, params);
  const WalkResult neg = walk_with(t, resolved.negative, params);
  std::vector<bool> unreachable;
  std::vector<double> raw = combine_polarities(pos.scores, neg.scores, &unreachable);

  Lexicon lex = standardized_lexicon(g.vocab().words(), std::move(raw));
  for (std::size_t i = 0; i < lex.size(); ++i) lex[i].unreachable = unreachable[i];
  lex.set_meta("method", "sentprop");
  lex.set_meta("beta", fmt(params.beta));
  lex.set_meta("tol", fmt(params.tol));
  lex.set_meta("max_iter", std::to_string(params.max_iter));
  lex.set_meta("k", std::to_string(g.k()));
  lex.set_meta("iterations", std::to_string(pos.iterations) + "/" + std::to_string(neg.iterations));
  annotate_seeds(lex, seeds, resolved);
  annotate_unreachable(lex);
  return lex;
}

std::vector<double> clamped_raw(const LexicalGraph& g, const ResolvedSeeds& seeds, const WalkParams& params,
                                int* iterations) {
  check_walk_params(params);
  const std::size_t n = g.size();
  const TransitionMatrix t(g, TransitionMatrix::Kind::RowStochastic);
  std::vector<double> y(n, 0.0);
  std::vector<double> next(n, 0.0);
  auto clamp_seeds = [&](std::vector<double>& v) {
    for (std::size_t i : seeds.positive) v[i] = 1.0;
    for (std::size_t i : seeds.negative) v[i] = -1.0;
  };
  clamp_seeds(y);
  double change = 0.0;
  for (int it = 1; it <= params.max_iter; ++it) {
    t.apply(y, next);
    clamp_seeds(next);
    change = simd::max_abs_diff(next, y);
    y.swap(next);
    if (change < params.tol) {
      if (iterations) *iterations = it;
      return y;
    }
  }
  std::ostringstream msg;
  msg << "clamped propagation did not converge in " << params.max_iter << " iterations (residual " << change
      << ", tol " << params.tol << ")";
  throw ConvergenceError(msg.str(), change);
}

Lexicon clamped_propagation(const LexicalGraph& g, const SeedSet& seeds, const WalkParams& params) {
  const ResolvedSeeds resolved = resolve_seeds(seeds, g.vocab());
  int iterations = 0;
  std::vector<double> raw = clamped_raw(g, resolved, params, &iterations);
  Lexicon lex = standardized_lexicon(g.vocab().words(), std::move(raw));
  for (std::size_t i = 0; i < lex.size(); ++i) lex[i].unreachable = g.isolated(i);
  lex.set_meta("method", "clamped");
  lex.set_meta("tol", fmt(params.tol));
  lex.set_meta("max_iter", std::to_string(params.max_iter));
  lex.set_meta("k", std::to_string(g.k()));
  lex.set_meta("iterations", std::to_string(iterations));
  annotate_seeds(lex, seeds, resolved);
  annotate_unreachable(lex);
  return lex;
}

std::vector<double> max_product_paths(const LexicalGraph& g, std::span<const std::size_t> sources, int max_hops) {
  if (max_hops < 1) throw UsageError("max_hops must be >= 1");
  std::vector<double> best(g.size(), 0.0);
  for (std::size_t s : sources) best.at(s) = 1.0;
  std::vector<double> next = best;
  for (int hop = 0; hop < max_hops; ++hop) {
    bool changed = false;
    for (std::size_t v = 0; v < g.size(); ++v) {
      double b = best[v];
      for (const auto& arc : g.neighbors(v)) b = std::max(b, best[arc.target] * arc.weight);
      if (b != best[v]) changed = true;
      next[v] = b;
    }
    best.swap(next);
    if (!changed) break;
  }
  return best;
}

Lexicon bestpath_scores(const LexicalGraph& cosine_graph, const SeedSet& seeds, int max_hops) {
  for (const auto& e : cosine_graph.edges()) {
    if (e.weight > 1.0) throw DataError("best-path propagation needs edge weights in [0, 1]");
  }
  const ResolvedSeeds resolved = resolve_seeds(seeds, cosine_graph.vocab());
  const auto pos = max_product_paths(cosine_graph, resolved.positive, max_hops);
  const auto neg = max_product_paths(cosine_graph, resolved.negative, max_hops);
  double pos_sum = 0.0;
  double neg_sum = 0.0;
  for (std::size_t i = 0; i < pos.size(); ++i) {
    pos_sum += pos[i];
    neg_sum += neg[i];
  }
  const double lambda = neg_sum > 0.0 ? pos_sum / neg_sum : 1.0;
  std::vector<double> raw(pos.size());
  for (std::size_t i = 0; i < raw.size(); ++i) raw[i] = pos[i] - lambda * neg[i];
  Lexicon lex = standardized_lexicon(cosine_graph.vocab().words(), std::move(raw));
  for (std::size_t i = 0; i < lex.size(); ++i) lex[i].unreachable = pos[i] == 0.0 && neg[i] == 0.0;
  lex.set_meta("method", "bestpath");
  lex.set_meta("k", std::to_string(cosine_graph.k()));
  lex.set_meta("max_hops", std::to_string(max_hops));
  lex.set_meta("lambda", fmt(lambda));
  annotate_seeds(lex, seeds, resolved);
  annotate_unreachable(lex);
  return lex;
}

Lexicon bestpath_scores(const PpmiMatrix& m, const Vocabulary& vocab, const SeedSet& seeds,
                        const BestPathParams& params) {
  if (params.k < 1) throw UsageError("k must be >= 1");
  const LexicalGraph g = build_cosine_graph(m, vocab, params.k, params.threads);
  return bestpath_scores(g, seeds, params.max_hops);
}

std::vector<double> pmi_raw(const SparseCountMatrix& counts, const ResolvedSeeds& seeds,
                            const PmiBaselineParams& params) {
  if (!(params.smoothing > 0.0 && params.smoothing <= 1.0)) throw UsageError("smoothing c must lie in (0, 1]");
  if (!(params.absent_count > 0.0)) throw UsageError("absent_count must be positive");
  const double total = counts.total();
  if (!(total > 0.0)) throw DataError("no co-occurrence mass");
  const std::vector<double> row = counts.row_sums();  // symmetric, so also the column sums
  double smoothed_total = 0.0;
  for (double r : row) smoothed_total += std::pow(r, params.smoothing);

  auto pmi = [&](std::size_t w, std::size_t s) {
    double joint = counts.at(w, s);
    if (joint <= 0.0) joint = params.absent_count;
    const double p_joint = joint / total;
    const double p_word = row[w] / total;
    const double p_ctx = std::pow(row[s], params.smoothing) / smoothed_total;
    return std::log(p_joint / (p_word * p_ctx));
  };

  std::vector<double> raw(counts.dim(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t w = 0; w < counts.dim(); ++w) {
    if (!(row[w] > 0.0)) continue;
    double score = 0.0;
    for (std::size_t s : seeds.positive) score += pmi(w, s);
    for (std::size_t s : seeds.negative) score -= pmi(w, s);
    raw[w] = score;
  }
  return raw;
}

Lexicon pmi_baseline(const SparseCountMatrix& counts, const Vocabulary& vocab, const SeedSet& seeds,
                     const PmiBaselineParams& params) {
  if (vocab.size() != counts.dim()) throw DataError("pmi baseline: vocabulary does not match count matrix");
  const std::vector<double> row = counts.row_sums();
  std::vector<bool> usable(row.size());
  for (std::size_t i = 0; i < row.size(); ++i) usable[i] = row[i] > 0.0;
  const ResolvedSeeds resolved = resolve_seeds(seeds, vocab, &usable);
  const std::vector<double> raw = pmi_raw(counts, resolved, params);

  std::vector<std::string> words;
  std::vector<double> kept;
  std::vector<std::string> excluded;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (std::isnan(raw[i])) {
      excluded.push_back(vocab.word(i));
      continue;
    }
    words.push_back(vocab.word(i));
    kept.push_back(raw[i]);
  }
  Lexicon lex = standardized_lexicon(words, std::move(kept));
  lex.set_meta("method", "pmi");
  lex.set_meta("smoothing", fmt(params.smoothing));
  lex.set_meta("absent_count", fmt(params.absent_count));
  lex.set_meta("excluded_zero_count", join(excluded, ','));
  annotate_seeds(lex, seeds, resolved);
  return lex;
}

std::vector<SeedSet> draw_bootstrap_subsets(const SeedSet& seeds, int samples, std::size_t subset_size,
                                            std::uint64_t rng_seed) {
  if (samples < 2) throw UsageError("bootstrap needs at least 2 samples");
  if (subset_size < 1) throw UsageError("bootstrap subset size must be >= 1");
  if (subset_size > seeds.positive.size() || subset_size > seeds.negative.size()) {
    throw UsageError("bootstrap subset size " + std::to_string(subset_size) + " exceeds a seed side (" +
                     std::to_string(seeds.positive.size()) + " positive, " +
                     std::to_string(seeds.negative.size()) + " negative)");
  }
  std::vector<SeedSet> out(static_cast<std::size_t>(samples));
  auto draw = [&](const std::vector<std::string>& side, Rng rng) {
    auto idx = rng.sample_without_replacement(side.size(), subset_size);
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> words;
    for (std::size_t i : idx) words.push_back(side[i]);
    return words;
  };
  for (int r = 0; r < samples; ++r) {
    out[r].positive = draw(seeds.positive, Rng(rng_seed, static_cast<std::uint64_t>(r), 0));
    out[r].negative = draw(seeds.negative, Rng(rng_seed, static_cast<std::uint64_t>(r), 1));
  }
  return out;
}

Lexicon aggregate_bootstrap(std::span<const Lexicon> runs) {
  if (runs.size() < 2) throw UsageError("bootstrap needs at least 2 runs");
  const std::size_t n = runs[0].size();
  for (const auto& r : runs) {
    if (r.size() != n) throw DataError("bootstrap runs disagree on vocabulary");
    for (std::size_t i = 0; i < n; ++i) {
      if (r[i].word != runs[0][i].word) throw DataError("bootstrap runs disagree on word order");
    }
  }
  std::vector<LexiconEntry> entries(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Welford updates: identical runs give exactly their common score and a zero spread.
    double mean = 0.0;
    double m2 = 0.0;
    double count = 0.0;
    bool unreachable = true;
    for (const auto& r : runs) {
      count += 1.0;
      const double delta = r[i].score - mean;
      mean += delta / count;
      m2 += delta * (r[i].score - mean);
      unreachable = unreachable && r[i].unreachable;
    }
    entries[i].word = runs[0][i].word;
    entries[i].score = mean;
    entries[i].std = std::sqrt(m2 / (count - 1.0));
    entries[i].unreachable = unreachable;
  }
  Lexicon lex(std::move(entries));
  for (const auto& [k, v] : runs[0].metadata()) {
    if (k == "seeds_used" || k == "seed_warnings" || k == "seed_checksum" || k == "iterations" ||
        k.starts_with("unreachable"))
      continue;
    lex.set_meta(k, v);
  }
  annotate_unreachable(lex);
  return lex;
}

Lexicon bootstrap(const SeedScorer& scorer, const SeedSet& seeds, const BootstrapParams& params) {
  const auto subsets = draw_bootstrap_subsets(seeds, params.samples, params.subset_size, params.rng_seed);
  std::vector<Lexicon> runs(subsets.size());
  parallel_for(subsets.size(), params.threads, [&](std::size_t r) { runs[r] = scorer(subsets[r]); });
  Lexicon lex = aggregate_bootstrap(runs);
  lex.set_meta("bootstrap_samples", std::to_string(params.samples));
  lex.set_meta("subset_size", std::to_string(params.subset_size));
  lex.set_meta("rng_seed", std::to_string(params.rng_seed));
  lex.set_meta("seed_checksum", seed_checksum(seeds));
  return lex;
}

Lexicon bootstrap(const LexicalGraph& g, const SeedSet& seeds, const WalkParams& walk,
                  const BootstrapParams& params) {
  // Draw only from seeds the graph can use, so every subset has full size.
  const auto usable = connected_nodes(g);
  const ResolvedSeeds resolved = resolve_seeds(seeds, g.vocab(), &usable);
  SeedSet usable_seeds;
  for (std::size_t i : resolved.positive) usable_seeds.positive.push_back(g.vocab().word(i));
  for (std::size_t i : resolved.negative) usable_seeds.negative.push_back(g.vocab().word(i));
  Lexicon lex = bootstrap([&](const SeedSet& s) { return sentprop_scores(g, s, walk); }, usable_seeds, params);
  lex.set_meta("seed_checksum", seed_checksum(seeds));
  if (!resolved.warnings.empty()) lex.set_meta("seed_warnings", join(resolved.warnings, ';'));
  return lex;
}

}  // namespace lexprop
