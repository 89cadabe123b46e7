#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "diffgt/graph/interaction_graph.hpp"
#include "diffgt/numerics/matrix.hpp"

namespace diffgt {

/// Multi-hot attributes for one entity class; row i describes entity i.
struct SideFeatureTable {
  std::vector<std::string> vocabulary;
  Matrix features;

  bool empty() const { return features.empty(); }
  /// Attribute indices set for entity `row`, ascending.
  std::vector<std::size_t> attributes_of(std::size_t row) const;
};

struct SideFeatures {
  SideFeatureTable users;
  SideFeatureTable items;
};

struct Dataset {
  InteractionGraph graph;
  SideFeatures side;
  std::vector<std::string> user_ids;  ///< raw id of user index i
  std::vector<std::string> item_ids;  ///< raw id of item index i
};

struct DatasetStats {
  std::size_t num_users = 0;
  std::size_t num_items = 0;
  std::size_t num_edges = 0;
  double density = 0.0;
};

/// Reads `user \t item [\t ...]` rows. Ids are reindexed to contiguous
/// zero-based indices in order of first appearance; duplicate pairs collapse.
/// Optional side files hold `entity_id \t attr1|attr2|...`; rows for unknown
/// entities are ignored and entities without a row get an all-zero vector.
/// Throws IoError, ParseError (with line number) or EmptyDatasetError.
Dataset ingest(const std::string& path, const std::optional<std::string>& item_side_path = std::nullopt,
               const std::optional<std::string>& user_side_path = std::nullopt);

DatasetStats dataset_stats(const InteractionGraph& g);

/// Adds, for every user (and every item) with side features, symmetric edges
/// to its `top_n` most cosine-similar peers of the same class: self excluded,
/// only positive similarity, ties broken by lower index. Entities with a
/// zero-norm feature vector contribute nothing; their node indices are
/// appended to `skipped` when given. The interaction edges are untouched.
InteractionGraph enrich_with_side_info(const InteractionGraph& g, const SideFeatures& side,
                                       std::size_t top_n, std::vector<std::size_t>* skipped = nullptr);

/// Per item, the attribute with the highest global frequency among those it
/// carries (ties to the lower attribute index); -1 when it has none.
std::vector<int> dominant_attribute(const SideFeatureTable& table);

}  // namespace diffgt
