#pragma once

#include <cstdint>
#include <string>

#include "diffgt/graph/dataset.hpp"
#include "diffgt/graph/split.hpp"

namespace diffgt {

/// Everything `train` and `evaluate` need from an ingested dataset.
struct DatasetBundle {
  Dataset dataset;
  DataSplit split;
};

/// Canonical JSON text of a bundle; identical bundles give identical bytes.
std::string bundle_to_json(const DatasetBundle& bundle);
DatasetBundle bundle_from_json(const std::string& text);

void save_bundle(const DatasetBundle& bundle, const std::string& path);
DatasetBundle load_bundle(const std::string& path);

/// FNV-1a 64 of a byte string, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& bytes);

/// Hash identifying the bundle content (graph, side features, split).
std::string dataset_hash(const DatasetBundle& bundle);

}  // namespace diffgt
