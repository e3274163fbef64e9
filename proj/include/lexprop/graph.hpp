#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "lexprop/corpus.hpp"
#include "lexprop/embeddings.hpp"

namespace lexprop {

struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Arc {
  std::size_t target = 0;
  double weight = 0.0;
};

// Sparse symmetric weighted graph over a vocabulary, stored as adjacency
// lists sorted by target. No self-loops; zero-weight edges are not stored.
class LexicalGraph {
 public:
  LexicalGraph() = default;
  // Edges are undirected; duplicates and self-loops are rejected.
  LexicalGraph(Vocabulary vocab, std::size_t k, std::vector<Edge> edges);

  const Vocabulary& vocab() const { return vocab_; }
  std::size_t size() const { return vocab_.size(); }
  std::size_t k() const { return k_; }
  std::size_t edge_count() const { return edges_.size(); }
  // Undirected edges with i < j, sorted by (i, j).
  const std::vector<Edge>& edges() const { return edges_; }
  std::span<const Arc> neighbors(std::size_t i) const {
    return {arcs_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  // Sum of incident edge weights.
  double degree(std::size_t i) const { return degree_[i]; }
  bool isolated(std::size_t i) const { return offsets_[i + 1] == offsets_[i]; }
  std::vector<std::size_t> isolated_nodes() const;

  // Same topology with every weight multiplied by `factor` > 0.
  LexicalGraph scaled(double factor) const;

 private:
  Vocabulary vocab_;
  std::size_t k_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Arc> arcs_;
  std::vector<double> degree_;
};

// Edge weight for a pair of words with cosine similarity `cos`:
// arccos(-cos), increasing from 0 (cos = -1) to pi (cos = 1).
double angular_edge_weight(double cos);

// Union-symmetrized k-nearest-neighbor graph under cosine similarity. Ties in
// the k-th place are broken by vocabulary order. Zero rows do not take part
// and end up isolated.
LexicalGraph build_knn_graph(const EmbeddingSet& emb, std::size_t k, unsigned threads = 1);

// Same construction over the sparse rows of a PPMI matrix, with edge weight
// max(cos, 0) instead of the angular weight.
LexicalGraph build_cosine_graph(const PpmiMatrix& m, const Vocabulary& vocab, std::size_t k,
                                unsigned threads = 1);

// "GRAPH <dim> <nnz> <k>" followed by "i j weight", i < j.
void write_graph(std::ostream& out, const LexicalGraph& g);
LexicalGraph read_graph(std::istream& in, const Vocabulary& vocab);

}  // namespace lexprop
