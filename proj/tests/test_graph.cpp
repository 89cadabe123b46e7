#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "diffgt/error.hpp"
#include "diffgt/graph/bundle.hpp"
#include "diffgt/graph/dataset.hpp"
#include "diffgt/graph/split.hpp"
#include "diffgt/numerics/random.hpp"
#include "support/oracles.hpp"

using namespace diffgt;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "diffgt_graph_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string write(const std::string& name, const std::string& content) {
  const fs::path p = scratch(name);
  std::ofstream(p) << content;
  return p.string();
}

InteractionGraph star(std::size_t items) {
  std::vector<Edge> edges;
  for (std::uint32_t i = 0; i < items; ++i) edges.push_back({0, i});
  return InteractionGraph(1, items, edges);
}

}  // namespace

TEST_CASE("ingest: minimal graph, dedup, reindexing, extra columns") {
  const Dataset one = ingest(write("one.tsv", "0\t0\n"));
  CHECK(one.graph.num_users() == 1);
  CHECK(one.graph.num_items() == 1);
  CHECK(dataset_stats(one.graph).density == 1.0);

  const Dataset d = ingest(write("dup.tsv", "alice\tm9\t5\t100\nbob\tm2\nalice\tm9\t3\t200\n\nbob\tm9\n"));
  CHECK(d.graph.edges().size() == 3);
  CHECK(d.user_ids == std::vector<std::string>{"alice", "bob"});
  CHECK(d.item_ids == std::vector<std::string>{"m9", "m2"});
  CHECK(d.graph.edges().front() == Edge{0, 0});
}

TEST_CASE("ingest: errors carry paths and line numbers") {
  CHECK_THROWS_AS(ingest(scratch("missing.tsv").string()), IoError);
  CHECK_THROWS_AS(ingest(write("empty.tsv", "")), EmptyDatasetError);
  try {
    ingest(write("bad.tsv", "u\ti\nu2\ti2\nonlyonefield\n"));
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(std::string(e.what()).find("bad.tsv:3") != std::string::npos);
  }
}

TEST_CASE("ingest: Foursquare-shaped statistics give density 0.46%") {
  const std::size_t users = 2060, items = 2876, target = 27149;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  for (std::size_t u = 0; u < users; ++u) edges.insert({u, u % items});
  for (std::size_t i = 0; i < items; ++i) edges.insert({i % users, i});
  RandomSource rng(1);
  while (edges.size() < target) edges.insert({rng.uniform_index(users), rng.uniform_index(items)});
  std::string text;
  for (const auto& [u, i] : edges) text += "u" + std::to_string(u) + "\tv" + std::to_string(i) + "\n";
  const Dataset d = ingest(write("fsq.tsv", text));
  const DatasetStats s = dataset_stats(d.graph);
  CHECK(s.num_users == users);
  CHECK(s.num_items == items);
  CHECK(s.num_edges == target);
  CHECK(std::round(s.density * 10000.0) / 100.0 == doctest::Approx(0.46));
}

TEST_CASE("ingest: side files are multi-hot and ignore unknown entities") {
  const std::string inter = write("side_inter.tsv", "u1\ti1\nu1\ti2\nu2\ti3\n");
  const std::string side = write("side_items.tsv", "i2\tDrama|Comedy\ni1\tComedy\nghost\tHorror\n");
  const Dataset d = ingest(inter, side);
  CHECK(d.side.items.vocabulary == std::vector<std::string>{"Comedy", "Drama"});
  CHECK(d.side.items.attributes_of(0) == std::vector<std::size_t>{0});
  CHECK(d.side.items.attributes_of(1) == std::vector<std::size_t>{0, 1});
  CHECK(d.side.items.attributes_of(2).empty());
  CHECK(d.side.users.empty());
}

TEST_CASE("normalize_adjacency: hand cases, isolation, exact symmetry") {
  const SparseMatrix pair = normalize_adjacency(InteractionGraph(1, 1, {{0, 0}}));
  CHECK(pair.at(0, 1) == 1.0);
  CHECK(pair.at(1, 0) == 1.0);

  const SparseMatrix s = normalize_adjacency(star(4));
  for (std::size_t i = 1; i <= 4; ++i) CHECK(s.at(0, i) == 0.5);

  const InteractionGraph with_isolated(2, 2, {{0, 0}, {0, 1}});
  const Matrix dense = normalize_adjacency(with_isolated).to_dense();
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(dense(1, c) == 0.0);
    CHECK(dense(c, 1) == 0.0);
  }

  const Dataset d = diffgt::testing::toy_dataset();
  const InteractionGraph enriched = enrich_with_side_info(d.graph, d.side, 2);
  const SparseMatrix n = normalize_adjacency(enriched);
  CHECK(n.is_symmetric());
  CHECK(n == n.transposed());
  CHECK(enriched.base_adjacency().is_symmetric());
  CHECK(enriched.enriched_adjacency().is_symmetric());
  for (std::size_t i = 0; i < enriched.num_nodes(); ++i) CHECK(enriched.base_adjacency().at(i, i) == 0.0);
}

TEST_CASE("enrich_with_side_info: disabled, identical vectors, brute-force oracle, zero norm") {
  const Dataset d = diffgt::testing::toy_dataset();
  const InteractionGraph same = enrich_with_side_info(d.graph, d.side, 0);
  CHECK(same.enriched_adjacency() == same.base_adjacency());

  SUBCASE("identical genre vectors become mutual neighbours") {
    SideFeatures side;
    side.items.vocabulary = {"A", "B"};
    side.items.features = Matrix::from_rows({{1, 0}, {0, 1}, {1, 0}});
    const InteractionGraph g(1, 3, {{0, 0}, {0, 1}, {0, 2}});
    const InteractionGraph e = enrich_with_side_info(g, side, 1);
    CHECK(e.enriched_adjacency().at(1, 3) == 1.0);
    CHECK(e.enriched_adjacency().at(3, 1) == 1.0);
    CHECK(e.base_adjacency().at(1, 3) == 0.0);
  }

  SUBCASE("five hand-set items against exhaustive cosine ranking") {
    SideFeatures side;
    side.items.vocabulary = {"a", "b", "c", "d"};
    side.items.features = Matrix::from_rows({{1, 1, 0, 0}, {1, 0, 0, 0}, {0, 1, 1, 0}, {1, 1, 1, 1}, {0, 0, 0, 1}});
    const InteractionGraph g(2, 5, {{0, 0}, {0, 2}, {1, 1}, {1, 3}, {1, 4}});
    const std::size_t top_n = 2;
    std::set<NodePair> expected;
    const Matrix& f = side.items.features;
    const auto cosine = [&](std::size_t a, std::size_t b) {
      double dot = 0, na = 0, nb = 0;
      for (std::size_t c = 0; c < f.cols(); ++c) {
        dot += f(a, c) * f(b, c);
        na += f(a, c) * f(a, c);
        nb += f(b, c) * f(b, c);
      }
      return dot / std::sqrt(na * nb);
    };
    for (std::size_t i = 0; i < 5; ++i) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t j = 0; j < 5; ++j)
        if (j != i && cosine(i, j) > 0) all.push_back({-cosine(i, j), j});
      std::sort(all.begin(), all.end());
      for (std::size_t k = 0; k < std::min(top_n, all.size()); ++k) {
        const std::size_t a = 2 + i, b = 2 + all[k].second;
        expected.insert({std::min(a, b), std::max(a, b)});
      }
    }
    const InteractionGraph e = enrich_with_side_info(g, side, top_n);
    const std::set<NodePair> got(e.similarity_edges().begin(), e.similarity_edges().end());
    CHECK(got == expected);
    for (const Edge& edge : g.edges()) CHECK(e.enriched_adjacency().at(edge.user, 2 + edge.item) == 1.0);
    CHECK(e.base_adjacency() == g.base_adjacency());
  }

  SUBCASE("zero-norm vectors contribute nothing and are reported") {
    SideFeatures side;
    side.items.vocabulary = {"a"};
    side.items.features = Matrix::from_rows({{1}, {0}, {1}});
    const InteractionGraph g(1, 3, {{0, 0}, {0, 1}, {0, 2}});
    std::vector<std::size_t> skipped;
    const InteractionGraph e = enrich_with_side_info(g, side, 5, &skipped);
    CHECK(skipped == std::vector<std::size_t>{2});
    for (const auto& [a, b] : e.similarity_edges()) {
      CHECK(a != 2);
      CHECK(b != 2);
    }
  }
}

TEST_CASE("split: ratios, starvation guard, determinism, partition per draw") {
  CHECK(split_counts(10).train == 7);
  CHECK(split_counts(10).validation == 1);
  CHECK(split_counts(10).test == 2);
  CHECK(split_counts(1).train == 1);
  CHECK(split_counts(1).validation + split_counts(1).test == 0);
  CHECK(split_counts(2).train >= 1);

  const InteractionGraph lone = star(1);
  const DataSplit one = split(lone, 9);
  CHECK(one.train.size() == 1);
  for (const auto& draw : one.draws) CHECK(draw.test.empty());

  std::vector<Edge> edges;
  RandomSource rng(3);
  for (std::uint32_t u = 0; u < 30; ++u)
    for (std::uint32_t k = 0; k < 5 + u % 17; ++k) edges.push_back({u, static_cast<std::uint32_t>(rng.uniform_index(60))});
  const InteractionGraph g(30, 60, edges);
  const DataSplit a = split(g, 11);
  CHECK(a == split(g, 11));
  CHECK_FALSE(a == split(g, 12));
  REQUIRE(a.draws.size() == 10);
  std::set<std::uint64_t> seeds;
  std::set<std::vector<Edge>> tests;
  for (const auto& draw : a.draws) {
    seeds.insert(draw.seed);
    tests.insert(draw.test);
    std::multiset<Edge> all(a.train.begin(), a.train.end());
    all.insert(draw.validation.begin(), draw.validation.end());
    all.insert(draw.test.begin(), draw.test.end());
    CHECK(std::set<Edge>(all.begin(), all.end()).size() == all.size());
    CHECK(std::vector<Edge>(all.begin(), all.end()) == g.edges());
  }
  CHECK(seeds.size() == 10);
  CHECK(*seeds.begin() == 11);
  CHECK(tests.size() == 10);

  // Ratios within ±1 edge per user.
  for (std::uint32_t u = 0; u < 30; ++u) {
    const auto count = [u](const std::vector<Edge>& es) {
      return static_cast<double>(std::count_if(es.begin(), es.end(), [u](const Edge& e) { return e.user == u; }));
    };
    const double n = count(g.edges());
    CHECK(std::abs(count(a.train) - 0.7 * n) <= 1.0 + 1e-9);
    CHECK(std::abs(count(a.draws[0].validation) - 0.1 * n) <= 1.0 + 1e-9);
    CHECK(std::abs(count(a.draws[0].test) - 0.2 * n) <= 1.0 + 1e-9);
  }
}

TEST_CASE("bundle round-trips through JSON with a stable hash") {
  const DatasetBundle b = diffgt::testing::toy_bundle();
  const std::string text = bundle_to_json(b);
  const DatasetBundle back = bundle_from_json(text);
  CHECK(bundle_to_json(back) == text);
  CHECK(dataset_hash(back) == dataset_hash(b));
  CHECK(back.split == b.split);
  CHECK(back.dataset.side.items.features == b.dataset.side.items.features);

  const std::string path = scratch("bundle.json").string();
  save_bundle(b, path);
  CHECK(dataset_hash(load_bundle(path)) == dataset_hash(b));
  CHECK(dataset_hash(diffgt::testing::toy_bundle(4)) != dataset_hash(b));
  CHECK_THROWS_AS(bundle_from_json("{\"format\":\"nope\"}"), IoError);
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
}

TEST_CASE("dominant_attribute picks the globally most frequent carried attribute") {
  SideFeatureTable t;
  t.vocabulary = {"a", "b", "c"};
  t.features = Matrix::from_rows({{1, 1, 0}, {0, 1, 0}, {0, 1, 1}, {1, 0, 1}, {0, 0, 0}});
  // Frequencies: a=2, b=3, c=2.
  CHECK(dominant_attribute(t) == std::vector<int>{1, 1, 1, 0, -1});
}
