#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "diffgt/numerics/matrix.hpp"
#include "diffgt/numerics/sparse.hpp"

namespace diffgt {

/// User-item interaction; `item` is the item's own zero-based index, its node
/// index in the adjacency is num_users + item.
struct Edge {
  std::uint32_t user = 0;
  std::uint32_t item = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Node-index pair (first < second) of a user-user or item-item similarity edge.
using NodePair = std::pair<std::size_t, std::size_t>;

/// Bipartite user-item graph. `base_adjacency` holds the interactions only;
/// `enriched_adjacency` additionally carries side-information similarity
/// edges. Both are symmetric 0/1 matrices with a zero diagonal, sized
/// (N_u + N_i)².
class InteractionGraph {
 public:
  InteractionGraph() = default;
  /// Edges are deduplicated and sorted. Throws ShapeError for out-of-range indices.
  InteractionGraph(std::size_t num_users, std::size_t num_items, std::vector<Edge> edges);

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }
  std::size_t num_nodes() const { return num_users_ + num_items_; }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<NodePair>& similarity_edges() const { return similarity_edges_; }

  const SparseMatrix& base_adjacency() const { return base_; }
  const SparseMatrix& enriched_adjacency() const { return enriched_; }

  /// Copy of this graph whose enriched adjacency also contains `pairs`.
  /// Pairs must join two users or two items.
  InteractionGraph with_similarity_edges(std::vector<NodePair> pairs) const;

  double density() const;

 private:
  std::size_t num_users_ = 0;
  std::size_t num_items_ = 0;
  std::vector<Edge> edges_;
  std::vector<NodePair> similarity_edges_;
  SparseMatrix base_;
  SparseMatrix enriched_;
};

/// Symmetric normalisation D^(-1/2)·A·D^(-1/2); isolated nodes keep zero rows.
SparseMatrix normalize_adjacency(const SparseMatrix& adjacency);

/// Normalised enriched adjacency of `g` (equal to the base one without enrichment).
SparseMatrix normalize_adjacency(const InteractionGraph& g);

}  // namespace diffgt
