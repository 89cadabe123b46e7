#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "diffgt/graph/interaction_graph.hpp"
#include "diffgt/numerics/matrix.hpp"

namespace diffgt {

/// Inner products of the listed users' rows with every item row of
/// `embeddings` (users first, then items): |users| × N_i.
Matrix score(std::span<const std::size_t> users, const Matrix& embeddings, std::size_t num_users);

/// Items each user interacted with, sorted.
std::vector<std::vector<std::size_t>> items_by_user(std::size_t num_users, std::span<const Edge> edges);

/// Sets the score of every listed (user row, item) pair to −∞.
void mask_items(Matrix& scores, std::span<const std::size_t> users,
                const std::vector<std::vector<std::size_t>>& masked);

/// Indices of the k largest entries, best first; ties go to the lower index.
/// −∞ entries are never returned.
std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k);

}  // namespace diffgt
