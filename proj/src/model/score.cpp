#include "diffgt/model/score.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "diffgt/error.hpp"

namespace diffgt {

Matrix score(std::span<const std::size_t> users, const Matrix& embeddings, std::size_t num_users) {
  if (num_users > embeddings.rows()) throw ShapeError("score: more users than embedding rows");
  std::vector<std::size_t> item_rows(embeddings.rows() - num_users);
  std::iota(item_rows.begin(), item_rows.end(), num_users);
  for (std::size_t u : users)
    if (u >= num_users) throw ShapeError("score: user index out of range");
  return matmul_nt(gather_rows(embeddings, users), gather_rows(embeddings, item_rows));
}

std::vector<std::vector<std::size_t>> items_by_user(std::size_t num_users, std::span<const Edge> edges) {
  std::vector<std::vector<std::size_t>> out(num_users);
  for (const Edge& e : edges) out.at(e.user).push_back(e.item);
  for (auto& items : out) std::sort(items.begin(), items.end());
  return out;
}

void mask_items(Matrix& scores, std::span<const std::size_t> users,
                const std::vector<std::vector<std::size_t>>& masked) {
  if (scores.rows() != users.size()) throw ShapeError("mask_items: one score row per user expected");
  for (std::size_t r = 0; r < users.size(); ++r)
    for (std::size_t i : masked.at(users[r])) scores(r, i) = -std::numeric_limits<double>::infinity();
}

std::vector<std::size_t> top_k(std::span<const double> scores, std::size_t k) {
  std::vector<std::size_t> idx;
  idx.reserve(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i)
    if (scores[i] != -std::numeric_limits<double>::infinity()) idx.push_back(i);
  const std::size_t keep = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                    [&scores](std::size_t a, std::size_t b) {
                      return scores[a] != scores[b] ? scores[a] > scores[b] : a < b;
                    });
  idx.resize(keep);
  return idx;
}

}  // namespace diffgt
