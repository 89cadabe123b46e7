#include "diffgt/graph/bundle.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diffgt/error.hpp"

namespace diffgt {
namespace {

using nlohmann::json;

constexpr int kBundleVersion = 1;

json edges_to_json(const std::vector<Edge>& edges) {
  json out = json::array();
  for (const Edge& e : edges) out.push_back({e.user, e.item});
  return out;
}

std::vector<Edge> edges_from_json(const json& j) {
  std::vector<Edge> out;
  out.reserve(j.size());
  for (const auto& e : j) out.push_back({e.at(0).get<std::uint32_t>(), e.at(1).get<std::uint32_t>()});
  return out;
}

json table_to_json(const SideFeatureTable& t) {
  json attrs = json::array();
  for (std::size_t r = 0; r < t.features.rows(); ++r) attrs.push_back(t.attributes_of(r));
  return {{"vocabulary", t.vocabulary}, {"attributes", attrs}};
}

SideFeatureTable table_from_json(const json& j) {
  SideFeatureTable t;
  t.vocabulary = j.at("vocabulary").get<std::vector<std::string>>();
  const auto& attrs = j.at("attributes");
  if (t.vocabulary.empty()) return t;
  t.features = Matrix(attrs.size(), t.vocabulary.size());
  for (std::size_t r = 0; r < attrs.size(); ++r)
    for (const auto& c : attrs[r]) t.features(r, c.get<std::size_t>()) = 1.0;
  return t;
}

}  // namespace

std::string bundle_to_json(const DatasetBundle& b) {
  const Dataset& ds = b.dataset;
  json draws = json::array();
  for (const auto& d : b.split.draws) {
    draws.push_back({{"seed", d.seed}, {"validation", edges_to_json(d.validation)}, {"test", edges_to_json(d.test)}});
  }
  json j = {
      {"format", "diffgt-bundle"},
      {"version", kBundleVersion},
      {"user_ids", ds.user_ids},
      {"item_ids", ds.item_ids},
      {"edges", edges_to_json(ds.graph.edges())},
      {"side", {{"users", table_to_json(ds.side.users)}, {"items", table_to_json(ds.side.items)}}},
      {"split", {{"seed", b.split.seed}, {"train", edges_to_json(b.split.train)}, {"draws", draws}}},
  };
  return j.dump();
}

DatasetBundle bundle_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("bundle is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("format") != "diffgt-bundle") throw IoError("not a diffgt dataset bundle");
    if (j.at("version").get<int>() != kBundleVersion) throw IoError("unsupported bundle version");
    DatasetBundle b;
    b.dataset.user_ids = j.at("user_ids").get<std::vector<std::string>>();
    b.dataset.item_ids = j.at("item_ids").get<std::vector<std::string>>();
    b.dataset.graph = InteractionGraph(b.dataset.user_ids.size(), b.dataset.item_ids.size(),
                                       edges_from_json(j.at("edges")));
    b.dataset.side.users = table_from_json(j.at("side").at("users"));
    b.dataset.side.items = table_from_json(j.at("side").at("items"));
    const auto& s = j.at("split");
    b.split.seed = s.at("seed").get<std::uint64_t>();
    b.split.train = edges_from_json(s.at("train"));
    for (const auto& d : s.at("draws")) {
      b.split.draws.push_back({d.at("seed").get<std::uint64_t>(), edges_from_json(d.at("validation")),
                               edges_from_json(d.at("test"))});
    }
    return b;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed bundle: ") + e.what());
  }
}

void save_bundle(const DatasetBundle& bundle, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << bundle_to_json(bundle);
}

DatasetBundle load_bundle(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream text;
  text << in.rdbuf();
  return bundle_from_json(text.str());
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string dataset_hash(const DatasetBundle& bundle) { return fnv1a_hex(bundle_to_json(bundle)); }

}  // namespace diffgt
