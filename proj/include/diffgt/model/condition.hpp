#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "diffgt/graph/interaction_graph.hpp"
#include "diffgt/numerics/sparse.hpp"
#include "diffgt/numerics/tape.hpp"

namespace diffgt {

/// Linear map from encoded node embeddings to per-token conditions. Row u < N_u
/// averages the user's training items; users without training items, and all
/// item tokens, receive the global item mean.
class ConditionOperator {
 public:
  ConditionOperator(std::size_t num_users, std::size_t num_items, std::span<const Edge> train_edges);

  std::size_t num_users() const { return num_users_; }
  std::size_t num_items() const { return num_items_; }

  /// N_u × d per-user conditions.
  Matrix user_conditions(const Matrix& encoded) const;
  /// N × d token conditions (users followed by items).
  Matrix token_conditions(const Matrix& encoded) const;
  Var token_conditions(Var encoded) const;

 private:
  std::size_t num_users_;
  std::size_t num_items_;
  /// (N_u + 1) × N; the last row is the global item mean.
  std::shared_ptr<const SparseMatrix> means_;
  std::vector<std::size_t> token_rows_;
};

/// Per-user mean of training-item rows of `encoded` (N_u × d).
Matrix build_condition(std::size_t num_users, std::size_t num_items, std::span<const Edge> train_edges,
                       const Matrix& encoded);

}  // namespace diffgt
