#include "diffgt/graph/interaction_graph.hpp"

#include <algorithm>
#include <cmath>

#include "diffgt/error.hpp"

namespace diffgt {
namespace {

SparseMatrix build_adjacency(std::size_t num_users, std::size_t num_nodes,
                             const std::vector<Edge>& edges, const std::vector<NodePair>& extra) {
  std::vector<Triplet> entries;
  entries.reserve(2 * (edges.size() + extra.size()));
  for (const Edge& e : edges) {
    const std::size_t item_node = num_users + e.item;
    entries.push_back({e.user, item_node, 1.0});
    entries.push_back({item_node, e.user, 1.0});
  }
  for (const auto& [a, b] : extra) {
    entries.push_back({a, b, 1.0});
    entries.push_back({b, a, 1.0});
  }
  return SparseMatrix::from_triplets(num_nodes, num_nodes, std::move(entries));
}

}  // namespace

InteractionGraph::InteractionGraph(std::size_t num_users, std::size_t num_items, std::vector<Edge> edges)
    : num_users_(num_users), num_items_(num_items), edges_(std::move(edges)) {
  for (const Edge& e : edges_) {
    if (e.user >= num_users_ || e.item >= num_items_) {
      throw ShapeError("edge (" + std::to_string(e.user) + ", " + std::to_string(e.item) +
                       ") outside " + std::to_string(num_users_) + " users x " +
                       std::to_string(num_items_) + " items");
    }
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  base_ = build_adjacency(num_users_, num_nodes(), edges_, {});
  enriched_ = base_;
}

InteractionGraph InteractionGraph::with_similarity_edges(std::vector<NodePair> pairs) const {
  for (auto& [a, b] : pairs) {
    if (a > b) std::swap(a, b);
    if (a == b) throw ShapeError("similarity edge would be a self-loop");
    if (b >= num_nodes()) throw ShapeError("similarity edge outside the graph");
    const bool both_users = b < num_users_;
    const bool both_items = a >= num_users_;
    if (!both_users && !both_items) throw ShapeError("similarity edge must join entities of one class");
  }
  InteractionGraph out = *this;
  out.similarity_edges_.insert(out.similarity_edges_.end(), pairs.begin(), pairs.end());
  std::sort(out.similarity_edges_.begin(), out.similarity_edges_.end());
  out.similarity_edges_.erase(std::unique(out.similarity_edges_.begin(), out.similarity_edges_.end()),
                              out.similarity_edges_.end());
  out.enriched_ = build_adjacency(num_users_, num_nodes(), edges_, out.similarity_edges_);
  return out;
}

double InteractionGraph::density() const {
  if (num_users_ == 0 || num_items_ == 0) return 0.0;
  return static_cast<double>(edges_.size()) /
         (static_cast<double>(num_users_) * static_cast<double>(num_items_));
}

SparseMatrix normalize_adjacency(const SparseMatrix& adjacency) {
  if (adjacency.rows() != adjacency.cols()) throw ShapeError("adjacency must be square");
  const auto& ptr = adjacency.row_ptr();
  const auto& cols = adjacency.col_idx();
  const auto& vals = adjacency.values();
  std::vector<double> inv_sqrt(adjacency.rows(), 0.0);
  for (std::size_t r = 0; r < adjacency.rows(); ++r) {
    double degree = 0.0;
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) degree += vals[k];
    if (degree > 0.0) inv_sqrt[r] = 1.0 / std::sqrt(degree);
  }
  std::vector<Triplet> entries;
  entries.reserve(vals.size());
  for (std::size_t r = 0; r < adjacency.rows(); ++r) {
    for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) {
      // Fixed operand order keeps (r, c) and (c, r) bitwise equal.
      const std::size_t lo = std::min(r, cols[k]);
      const std::size_t hi = std::max(r, cols[k]);
      entries.push_back({r, cols[k], (inv_sqrt[lo] * inv_sqrt[hi]) * vals[k]});
    }
  }
  return SparseMatrix::from_triplets(adjacency.rows(), adjacency.cols(), std::move(entries));
}

SparseMatrix normalize_adjacency(const InteractionGraph& g) {
  return normalize_adjacency(g.enriched_adjacency());
}

}  // namespace diffgt
