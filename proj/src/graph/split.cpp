#include "diffgt/graph/split.hpp"

#include <algorithm>
#include <cmath>

#include "diffgt/numerics/random.hpp"

namespace diffgt {
namespace {

template <typename T>
void shuffle(std::vector<T>& v, RandomSource& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = rng.uniform_index(i);
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

SplitCounts split_counts(std::size_t n) {
  if (n == 0) return {};
  const auto nearest = [](double x) { return static_cast<std::size_t>(std::floor(x + 0.5)); };
  SplitCounts c;
  c.train = std::clamp<std::size_t>(nearest(0.7 * static_cast<double>(n)), 1, n);
  c.validation = std::min(nearest(0.1 * static_cast<double>(n)), n - c.train);
  c.test = n - c.train - c.validation;
  return c;
}

DataSplit split(const InteractionGraph& g, std::uint64_t seed) {
  std::vector<std::vector<Edge>> by_user(g.num_users());
  for (const Edge& e : g.edges()) by_user[e.user].push_back(e);

  DataSplit out;
  out.seed = seed;
  out.draws.resize(DataSplit::kNumDraws);
  for (std::size_t d = 0; d < DataSplit::kNumDraws; ++d) out.draws[d].seed = seed + d;

  const RandomSource train_rng(seed);
  for (std::size_t u = 0; u < by_user.size(); ++u) {
    auto edges = by_user[u];
    if (edges.empty()) continue;
    const SplitCounts counts = split_counts(edges.size());
    RandomSource rng = train_rng.derive(u);
    shuffle(edges, rng);
    out.train.insert(out.train.end(), edges.begin(), edges.begin() + static_cast<std::ptrdiff_t>(counts.train));
    std::vector<Edge> pool(edges.begin() + static_cast<std::ptrdiff_t>(counts.train), edges.end());
    std::sort(pool.begin(), pool.end());
    for (auto& draw : out.draws) {
      auto held = pool;
      RandomSource draw_rng = RandomSource(draw.seed).derive(u);
      shuffle(held, draw_rng);
      draw.validation.insert(draw.validation.end(), held.begin(),
                             held.begin() + static_cast<std::ptrdiff_t>(counts.validation));
      draw.test.insert(draw.test.end(), held.begin() + static_cast<std::ptrdiff_t>(counts.validation),
                       held.end());
    }
  }
  std::sort(out.train.begin(), out.train.end());
  for (auto& draw : out.draws) {
    std::sort(draw.validation.begin(), draw.validation.end());
    std::sort(draw.test.begin(), draw.test.end());
  }
  return out;
}

}  // namespace diffgt
