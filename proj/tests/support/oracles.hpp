#pragma once

// Brute-force reference implementations shared by the unit and acceptance
// tests. They avoid the library's algorithms in favor of dense matrices and
// exhaustive enumeration.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "lexprop/corpus.hpp"
#include "lexprop/graph.hpp"
#include "lexprop/lexicon.hpp"

namespace oracle {

using Dense = Eigen::MatrixXd;

inline std::vector<lexprop::Document> random_corpus(std::mt19937_64& rng, std::size_t lines,
                                                    std::size_t max_len, std::size_t word_types) {
  std::uniform_int_distribution<std::size_t> len(0, max_len);
  std::uniform_int_distribution<std::size_t> word(0, word_types - 1);
  std::vector<lexprop::Document> docs(lines);
  for (auto& d : docs) {
    const std::size_t n = len(rng);
    for (std::size_t i = 0; i < n; ++i) d.push_back("w" + std::to_string(word(rng)));
  }
  return docs;
}

// Every ordered position pair within the window, counted directly.
inline Dense cooccurrence(const std::vector<lexprop::Document>& docs, const lexprop::Vocabulary& vocab,
                          int window) {
  const auto n = static_cast<Eigen::Index>(vocab.size());
  Dense c = Dense::Zero(n, n);
  for (const auto& d : docs) {
    for (std::size_t p = 0; p < d.size(); ++p) {
      for (std::size_t q = 0; q < d.size(); ++q) {
        if (p == q) continue;
        const std::size_t gap = p > q ? p - q : q - p;
        if (gap > static_cast<std::size_t>(window)) continue;
        const auto a = vocab.find(d[p]);
        const auto b = vocab.find(d[q]);
        if (a && b) c(static_cast<Eigen::Index>(*a), static_cast<Eigen::Index>(*b)) += 1.0;
      }
    }
  }
  return c;
}

inline Dense to_dense(const lexprop::SparseCountMatrix::Storage& m) { return Dense(m); }

// max(log(p(i,j) / (p(i) p_c(j))), 0) evaluated cell by cell.
inline Dense ppmi(const Dense& counts, double c) {
  const double total = counts.sum();
  Dense out = Dense::Zero(counts.rows(), counts.cols());
  double ctx_norm = 0.0;
  for (Eigen::Index j = 0; j < counts.cols(); ++j) ctx_norm += std::pow(counts.col(j).sum(), c);
  for (Eigen::Index i = 0; i < counts.rows(); ++i) {
    for (Eigen::Index j = 0; j < counts.cols(); ++j) {
      if (counts(i, j) <= 0.0) continue;
      const double pij = counts(i, j) / total;
      const double pi = counts.row(i).sum() / total;
      const double pj = std::pow(counts.col(j).sum(), c) / ctx_norm;
      out(i, j) = std::max(std::log(pij / (pi * pj)), 0.0);
    }
  }
  return out;
}

// Descending singular values from the eigenvalues of A^T A.
inline Eigen::VectorXd singular_values(const Dense& a) {
  Eigen::SelfAdjointEigenSolver<Dense> es(a.transpose() * a);
  Eigen::VectorXd ev = es.eigenvalues().reverse();
  for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = std::sqrt(std::max(ev(i), 0.0));
  return ev;
}

// Top-r eigenvectors of A A^T.
inline Dense left_subspace(const Dense& a, int r) {
  Eigen::SelfAdjointEigenSolver<Dense> es(a * a.transpose());
  return es.eigenvectors().rightCols(r).rowwise().reverse();
}

// Largest principal angle between the column spaces of two orthonormal bases.
inline double subspace_angle(const Dense& u, const Dense& w) {
  Eigen::JacobiSVD<Dense> svd(u.transpose() * w);
  const double smin = std::clamp(svd.singularValues().minCoeff(), -1.0, 1.0);
  return std::acos(smin);
}

inline double cosine(const double* a, const double* b, std::size_t n) {
  long double ab = 0, aa = 0, bb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ab += static_cast<long double>(a[i]) * b[i];
    aa += static_cast<long double>(a[i]) * a[i];
    bb += static_cast<long double>(b[i]) * b[i];
  }
  return static_cast<double>(ab / std::sqrt(aa * bb));
}

// All-pairs cosine, per-node top-k by (similarity desc, index asc), union
// symmetrized, weight acos(-cos).
inline std::map<std::pair<std::size_t, std::size_t>, double> knn_edges(const Dense& emb, std::size_t k) {
  const std::size_t n = static_cast<std::size_t>(emb.rows());
  const std::size_t d = static_cast<std::size_t>(emb.cols());
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rows = emb;
  std::map<std::pair<std::size_t, std::size_t>, double> edges;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::pair<double, std::size_t>> sims;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) sims.emplace_back(cosine(rows.row(i).data(), rows.row(j).data(), d), j);
    }
    std::sort(sims.begin(), sims.end(), [](const auto& x, const auto& y) {
      return x.first != y.first ? x.first > y.first : x.second < y.second;
    });
    for (std::size_t t = 0; t < k && t < sims.size(); ++t) {
      const std::size_t j = sims[t].second;
      const double cs = std::clamp(sims[t].first, -1.0, 1.0);
      edges[{std::min(i, j), std::max(i, j)}] = std::acos(-cs);
    }
  }
  return edges;
}

inline lexprop::Vocabulary numbered_vocab(std::size_t n) {
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back("n" + std::to_string(i));
  return lexprop::Vocabulary::from_words(words);
}

// Random spanning tree plus extra random edges, weights in [lo, hi].
inline lexprop::LexicalGraph random_connected_graph(std::mt19937_64& rng, std::size_t n, std::size_t extra,
                                                    double lo = 0.1, double hi = 3.0) {
  std::uniform_real_distribution<double> w(lo, hi);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<lexprop::Edge> edges;
  auto add = [&](std::size_t a, std::size_t b) {
    if (a == b) return;
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    if (seen.insert(key).second) edges.push_back({key.first, key.second, w(rng)});
  };
  for (std::size_t i = 1; i < n; ++i) add(i, std::uniform_int_distribution<std::size_t>(0, i - 1)(rng));
  std::uniform_int_distribution<std::size_t> node(0, n - 1);
  for (std::size_t e = 0; e < extra; ++e) add(node(rng), node(rng));
  return lexprop::LexicalGraph(numbered_vocab(n), 0, edges);
}

inline Dense adjacency(const lexprop::LexicalGraph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Dense w = Dense::Zero(n, n);
  for (const auto& e : g.edges()) {
    w(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)) = e.weight;
    w(static_cast<Eigen::Index>(e.j), static_cast<Eigen::Index>(e.i)) = e.weight;
  }
  return w;
}

// Solves (I - beta T) p = (1 - beta) s with T = D^{-1/2} W D^{-1/2}.
inline Eigen::VectorXd walk_solve(const lexprop::LexicalGraph& g, const std::vector<std::size_t>& seeds,
                                  double beta) {
  const Dense w = adjacency(g);
  const auto n = w.rows();
  Eigen::VectorXd dinv = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = w.row(i).sum();
    if (d > 0) dinv(i) = 1.0 / std::sqrt(d);
  }
  const Dense t = dinv.asDiagonal() * w * dinv.asDiagonal();
  Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
  for (auto i : seeds) s(static_cast<Eigen::Index>(i)) = 1.0 / static_cast<double>(seeds.size());
  const Dense a = Dense::Identity(n, n) - beta * t;
  return a.partialPivLu().solve((1.0 - beta) * s);
}

// Exhaustive DFS over simple paths of at most max_hops edges; best product.
inline std::vector<double> best_paths(const lexprop::LexicalGraph& g, const std::vector<std::size_t>& sources,
                                      int max_hops) {
  const std::size_t n = g.size();
  std::vector<double> best(n, 0.0);
  std::vector<char> on_path(n, 0);
  auto dfs = [&](auto&& self, std::size_t u, double prod, int hops) -> void {
    best[u] = std::max(best[u], prod);
    if (hops == max_hops) return;
    for (const auto& arc : g.neighbors(u)) {
      if (on_path[arc.target]) continue;
      on_path[arc.target] = 1;
      self(self, arc.target, prod * arc.weight, hops + 1);
      on_path[arc.target] = 0;
    }
  };
  for (auto s : sources) {
    on_path[s] = 1;
    dfs(dfs, s, 1.0, 0);
    on_path[s] = 0;
  }
  return best;
}

inline double auc_pairs(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos) {
    for (double q : neg) wins += p > q ? 1.0 : (p == q ? 0.5 : 0.0);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

inline double tau_b_pairs(const std::vector<double>& x, const std::vector<double>& y) {
  std::int64_t concordant = 0, discordant = 0, tie_x = 0, tie_y = 0;
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0 && dy == 0) continue;
      if (dx == 0) {
        ++tie_x;
      } else if (dy == 0) {
        ++tie_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  // Pairs untied in x, and pairs untied in y.
  const std::int64_t untied_x = concordant + discordant + tie_y;
  const std::int64_t untied_y = concordant + discordant + tie_x;
  return static_cast<double>(concordant - discordant) /
         std::sqrt(static_cast<double>(untied_x) * static_cast<double>(untied_y));
}

inline double macro_f1(const std::vector<lexprop::Label>& pred, const std::vector<lexprop::Label>& gold) {
  double conf[3][3] = {};
  for (std::size_t i = 0; i < pred.size(); ++i) conf[static_cast<int>(gold[i])][static_cast<int>(pred[i])] += 1;
  double sum = 0.0;
  for (int c = 0; c < 3; ++c) {
    const double tp = conf[c][c];
    double predicted = 0, actual = 0;
    for (int o = 0; o < 3; ++o) {
      predicted += conf[o][c];
      actual += conf[c][o];
    }
    const double p = predicted > 0 ? tp / predicted : 0.0;
    const double r = actual > 0 ? tp / actual : 0.0;
    sum += p + r > 0 ? 2 * p * r / (p + r) : 0.0;
  }
  return sum / 3.0;
}

inline lexprop::Lexicon make_lexicon(const std::vector<std::string>& words, const std::vector<double>& scores) {
  std::vector<lexprop::LexiconEntry> entries;
  for (std::size_t i = 0; i < words.size(); ++i) entries.push_back({words[i], scores[i], {}, {}, false});
  return lexprop::Lexicon(std::move(entries));
}

}  // namespace oracle
