#include "lexprop/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include "lexprop/error.hpp"
#include "lexprop/parallel.hpp"
#include "lexprop/simd/kernels.hpp"
#include "lexprop/text.hpp"

namespace lexprop {

LexicalGraph::LexicalGraph(Vocabulary vocab, std::size_t k, std::vector<Edge> edges)
    : vocab_(std::move(vocab)), k_(k) {
  const std::size_t n = vocab_.size();
  for (auto& e : edges) {
    if (e.i == e.j) throw DataError("graph: self-loop at " + std::to_string(e.i));
    if (e.i >= n || e.j >= n) throw DataError("graph: edge index out of range");
    if (!(e.weight >= 0.0) || !std::isfinite(e.weight)) throw DataError("graph: invalid edge weight");
    if (e.i > e.j) std::swap(e.i, e.j);
  }
  std::erase_if(edges, [](const Edge& e) { return e.weight == 0.0; });
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  for (std::size_t e = 1; e < edges.size(); ++e) {
    if (edges[e].i == edges[e - 1].i && edges[e].j == edges[e - 1].j) {
      throw DataError("graph: duplicate edge (" + std::to_string(edges[e].i) + ", " +
                      std::to_string(edges[e].j) + ")");
    }
  }
  edges_ = std::move(edges);

  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : edges_) {
    ++deg[e.i];
    ++deg[e.j];
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + deg[i];
  arcs_.resize(offsets_[n]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges_) {
    arcs_[fill[e.i]++] = {e.j, e.weight};
    arcs_[fill[e.j]++] = {e.i, e.weight};
  }
  degree_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    auto span = std::span<Arc>(arcs_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]);
    std::sort(span.begin(), span.end(), [](const Arc& a, const Arc& b) { return a.target < b.target; });
    for (const auto& a : span) degree_[i] += a.weight;
  }
}

std::vector<std::size_t> LexicalGraph::isolated_nodes() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < size(); ++i) {
    if (isolated(i)) out.push_back(i);
  }
  return out;
}

LexicalGraph LexicalGraph::scaled(double factor) const {
  if (!(factor > 0.0)) throw UsageError("graph scale factor must be positive");
  std::vector<Edge> e = edges_;
  for (auto& x : e) x.weight *= factor;
  return LexicalGraph(vocab_, k_, std::move(e));
}

double angular_edge_weight(double cos) { return std::acos(-std::clamp(cos, -1.0, 1.0)); }

namespace {

using Candidate = std::pair<double, std::size_t>;  // (similarity, index)

bool more_similar(const Candidate& a, const Candidate& b) {
  if (a.first != b.first) return a.first > b.first;
  return a.second < b.second;
}

void keep_top_k(std::vector<Candidate>& c, std::size_t k) {
  if (c.size() > k) {
    std::nth_element(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(k), c.end(), more_similar);
    c.resize(k);
  }
  std::sort(c.begin(), c.end(), more_similar);
}

// Merges per-node neighbor lists into undirected edges (union rule).
std::vector<Edge> union_edges(const std::vector<std::vector<Candidate>>& lists,
                              double (*weight_of)(double)) {
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (const auto& [sim, j] : lists[i]) {
      edges.push_back({std::min(i, j), std::max(i, j), weight_of(sim)});
    }
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
  // both directions computed the same similarity up to rounding; keep the first
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](const Edge& a, const Edge& b) { return a.i == b.i && a.j == b.j; }),
              edges.end());
  return edges;
}

double clipped_weight(double cos) { return std::max(cos, 0.0); }

}  // namespace

LexicalGraph build_knn_graph(const EmbeddingSet& emb, std::size_t k, unsigned threads) {
  const std::size_t n = emb.size();
  if (k < 1 || k >= n) throw UsageError("k must lie in [1, |V|-1] = [1, " + std::to_string(n - 1) + "]");
  const std::size_t d = emb.width();

  RowMatrix unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  std::vector<char> usable(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(simd::squared_norm(emb.row(i)));
    if (norm > 1e-12) {
      usable[i] = 1;
      unit.row(static_cast<Eigen::Index>(i)) = emb.matrix().row(static_cast<Eigen::Index>(i)) / norm;
    } else {
      unit.row(static_cast<Eigen::Index>(i)).setZero();
    }
  }
  auto unit_row = [&](std::size_t i) { return std::span<const double>(unit.data() + i * d, d); };

  std::vector<std::vector<Candidate>> lists(n);
  parallel_for(n, threads, [&](std::size_t i) {
    if (!usable[i]) return;
    std::vector<Candidate> c;
    c.reserve(n);
    const auto qi = unit_row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || !usable[j]) continue;
      c.emplace_back(std::clamp(simd::dot(qi, unit_row(j)), -1.0, 1.0), j);
    }
    keep_top_k(c, k);
    lists[i] = std::move(c);
  });
  return LexicalGraph(emb.vocab(), k, union_edges(lists, angular_edge_weight));
}

LexicalGraph build_cosine_graph(const PpmiMatrix& m, const Vocabulary& vocab, std::size_t k,
                                unsigned threads) {
  const std::size_t n = m.dim();
  if (vocab.size() != n) throw DataError("cosine graph: vocabulary does not match matrix");
  if (k < 1 || k >= n) throw UsageError("k must lie in [1, |V|-1] = [1, " + std::to_string(n - 1) + "]");

  const auto& a = m.matrix();
  std::vector<double> norm(n, 0.0);
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    for (PpmiMatrix::Storage::InnerIterator it(a, r); it; ++it) norm[r] += it.value() * it.value();
    norm[r] = std::sqrt(norm[r]);
  }
  // Column-major copy gives, for each context, the rows that use it.
  const Eigen::SparseMatrix<double, Eigen::ColMajor> by_context = a;

  std::vector<std::vector<Candidate>> lists(n);
  parallel_for(n, threads, [&](std::size_t i) {
    if (norm[i] == 0.0) return;
    std::vector<double> acc(n, 0.0);
    std::vector<std::size_t> touched;
    for (PpmiMatrix::Storage::InnerIterator it(a, static_cast<Eigen::Index>(i)); it; ++it) {
      for (Eigen::SparseMatrix<double>::InnerIterator jt(by_context, it.col()); jt; ++jt) {
        const auto j = static_cast<std::size_t>(jt.row());
        if (j == i) continue;
        if (acc[j] == 0.0) touched.push_back(j);
        acc[j] += it.value() * jt.value();
      }
    }
    std::sort(touched.begin(), touched.end());
    std::vector<Candidate> c;
    for (std::size_t j : touched) {
      const double cos = std::clamp(acc[j] / (norm[i] * norm[j]), -1.0, 1.0);
      if (cos > 0.0) c.emplace_back(cos, j);
    }
    keep_top_k(c, k);
    lists[i] = std::move(c);
  });
  return LexicalGraph(vocab, k, union_edges(lists, clipped_weight));
}

void write_graph(std::ostream& out, const LexicalGraph& g) {
  out << "GRAPH " << g.size() << ' ' << g.edge_count() << ' ' << g.k() << '\n';
  for (const auto& e : g.edges()) out << e.i << ' ' << e.j << ' ' << text::format_double(e.weight) << '\n';
}

LexicalGraph read_graph(std::istream& in, const Vocabulary& vocab) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("graph file: missing header");
  auto head = text::split_ws(line);
  if (head.size() != 4 || head[0] != "GRAPH") throw DataError("graph file: bad header '" + line + "'");
  const auto dim = text::parse_int<std::size_t>(head[1], "dim");
  const auto nnz = text::parse_int<std::size_t>(head[2], "nnz");
  const auto k = text::parse_int<std::size_t>(head[3], "k");
  if (dim != vocab.size()) throw DataError("graph file: dimension does not match vocabulary");
  std::vector<Edge> edges;
  edges.reserve(nnz);
  while (std::getline(in, line)) {
    auto f = text::split_ws(line);
    if (f.empty()) continue;
    if (f.size() != 3) throw DataError("graph file: malformed edge '" + line + "'");
    Edge e{text::parse_int<std::size_t>(f[0], "i"), text::parse_int<std::size_t>(f[1], "j"),
           text::parse_double(f[2], "weight")};
    if (e.i >= e.j) throw DataError("graph file: edges must have i < j: '" + line + "'");
    edges.push_back(e);
  }
  if (edges.size() != nnz) throw DataError("graph file: header nnz does not match edge count");
  return LexicalGraph(vocab, k, std::move(edges));
}

}  // namespace lexprop
