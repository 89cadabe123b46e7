#include "diffgt/model/condition.hpp"

#include "diffgt/error.hpp"

namespace diffgt {

ConditionOperator::ConditionOperator(std::size_t num_users, std::size_t num_items,
                                     std::span<const Edge> train_edges)
    : num_users_(num_users), num_items_(num_items) {
  if (num_items == 0) throw ShapeError("condition needs at least one item");
  std::vector<std::vector<std::size_t>> items_of(num_users);
  for (const Edge& e : train_edges) {
    if (e.user >= num_users || e.item >= num_items) throw ShapeError("condition: edge out of range");
    items_of[e.user].push_back(e.item);
  }
  const std::size_t n = num_users + num_items;
  std::vector<Triplet> entries;
  const double global = 1.0 / static_cast<double>(num_items);
  for (std::size_t u = 0; u <= num_users; ++u) {
    if (u < num_users && !items_of[u].empty()) {
      const double w = 1.0 / static_cast<double>(items_of[u].size());
      for (std::size_t i : items_of[u]) entries.push_back({u, num_users + i, w});
    } else {
      for (std::size_t i = 0; i < num_items; ++i) entries.push_back({u, num_users + i, global});
    }
  }
  means_ = std::make_shared<const SparseMatrix>(SparseMatrix::from_triplets(num_users + 1, n, std::move(entries)));
  token_rows_.resize(n, num_users);
  for (std::size_t u = 0; u < num_users; ++u) token_rows_[u] = u;
}

Matrix ConditionOperator::user_conditions(const Matrix& encoded) const {
  const Matrix all = means_->multiply(encoded);
  std::vector<std::size_t> rows(num_users_);
  for (std::size_t u = 0; u < num_users_; ++u) rows[u] = u;
  return gather_rows(all, rows);
}

Matrix ConditionOperator::token_conditions(const Matrix& encoded) const {
  return gather_rows(means_->multiply(encoded), token_rows_);
}

Var ConditionOperator::token_conditions(Var encoded) const {
  return ad::gather_rows(ad::spmm(means_, encoded), token_rows_);
}

Matrix build_condition(std::size_t num_users, std::size_t num_items, std::span<const Edge> train_edges,
                       const Matrix& encoded) {
  return ConditionOperator(num_users, num_items, train_edges).user_conditions(encoded);
}

}  // namespace diffgt
