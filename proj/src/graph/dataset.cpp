#include "diffgt/graph/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "diffgt/error.hpp"

namespace diffgt {
namespace {

std::vector<std::string> split_fields(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, sep)) out.push_back(field);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string strip(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
  std::size_t first = 0;
  while (first < s.size() && s[first] == ' ') ++first;
  return s.substr(first);
}

std::ifstream open_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  return in;
}

SideFeatureTable read_side_file(const std::string& path, const std::vector<std::string>& ids) {
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

  std::map<std::string, std::size_t> vocab;
  std::vector<std::vector<std::string>> attrs(ids.size());
  auto in = open_or_throw(path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() < 2 || strip(fields[0]).empty()) {
      throw ParseError(path, line_no, "expected 'entity_id<TAB>attr1|attr2|...'");
    }
    const auto it = index.find(strip(fields[0]));
    if (it == index.end()) continue;
    for (const auto& raw : split_fields(fields[1], '|')) {
      const std::string a = strip(raw);
      if (a.empty()) continue;
      vocab.emplace(a, 0);
      attrs[it->second].push_back(a);
    }
  }
  SideFeatureTable table;
  for (auto& [name, slot] : vocab) {
    slot = table.vocabulary.size();
    table.vocabulary.push_back(name);
  }
  table.features = Matrix(ids.size(), std::max<std::size_t>(table.vocabulary.size(), 1));
  if (table.vocabulary.empty()) table.features = Matrix();
  for (std::size_t i = 0; i < attrs.size(); ++i)
    for (const auto& a : attrs[i]) table.features(i, vocab.at(a)) = 1.0;
  return table;
}

// Appends the top_n most similar peers of every row; `offset` maps row to node.
void add_similarity_pairs(const Matrix& features, std::size_t offset, std::size_t top_n,
                          std::vector<NodePair>& pairs, std::vector<std::size_t>* skipped) {
  const std::size_t n = features.rows();
  std::vector<double> norm(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double sq = 0.0;
    for (double v : features.row(i)) sq += v * v;
    norm[i] = std::sqrt(sq);
    if (norm[i] == 0.0 && skipped) skipped->push_back(offset + i);
  }
  std::vector<std::pair<double, std::size_t>> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    if (norm[i] == 0.0) continue;
    candidates.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || norm[j] == 0.0) continue;
      double dot = 0.0;
      auto a = features.row(i);
      auto b = features.row(j);
      for (std::size_t c = 0; c < a.size(); ++c) dot += a[c] * b[c];
      const double cosine = dot / (norm[i] * norm[j]);
      if (cosine > 0.0) candidates.emplace_back(cosine, j);
    }
    const std::size_t keep = std::min(top_n, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(keep),
                      candidates.end(), [](const auto& x, const auto& y) {
                        return x.first != y.first ? x.first > y.first : x.second < y.second;
                      });
    for (std::size_t k = 0; k < keep; ++k) {
      const std::size_t a = offset + i;
      const std::size_t b = offset + candidates[k].second;
      pairs.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
}

}  // namespace

std::vector<std::size_t> SideFeatureTable::attributes_of(std::size_t row) const {
  std::vector<std::size_t> out;
  if (empty()) return out;
  auto r = features.row(row);
  for (std::size_t c = 0; c < r.size(); ++c)
    if (r[c] != 0.0) out.push_back(c);
  return out;
}

Dataset ingest(const std::string& path, const std::optional<std::string>& item_side_path,
               const std::optional<std::string>& user_side_path) {
  auto in = open_or_throw(path);
  Dataset ds;
  std::unordered_map<std::string, std::uint32_t> users;
  std::unordered_map<std::string, std::uint32_t> items;
  std::vector<Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip(line);
    if (line.empty()) continue;
    const auto fields = split_fields(line, '\t');
    if (fields.size() < 2) throw ParseError(path, line_no, "expected 'user_id<TAB>item_id[<TAB>...]'");
    const std::string user = strip(fields[0]);
    const std::string item = strip(fields[1]);
    if (user.empty() || item.empty()) throw ParseError(path, line_no, "empty user or item id");
    auto [uit, unew] = users.emplace(user, static_cast<std::uint32_t>(ds.user_ids.size()));
    if (unew) ds.user_ids.push_back(user);
    auto [iit, inew] = items.emplace(item, static_cast<std::uint32_t>(ds.item_ids.size()));
    if (inew) ds.item_ids.push_back(item);
    edges.push_back({uit->second, iit->second});
  }
  if (edges.empty()) throw EmptyDatasetError("'" + path + "' contains no interactions");
  ds.graph = InteractionGraph(ds.user_ids.size(), ds.item_ids.size(), std::move(edges));
  if (item_side_path) ds.side.items = read_side_file(*item_side_path, ds.item_ids);
  if (user_side_path) ds.side.users = read_side_file(*user_side_path, ds.user_ids);
  return ds;
}

DatasetStats dataset_stats(const InteractionGraph& g) {
  return {g.num_users(), g.num_items(), g.edges().size(), g.density()};
}

InteractionGraph enrich_with_side_info(const InteractionGraph& g, const SideFeatures& side,
                                       std::size_t top_n, std::vector<std::size_t>* skipped) {
  if (top_n == 0) return g;
  std::vector<NodePair> pairs;
  if (!side.users.empty()) {
    if (side.users.features.rows() != g.num_users()) throw ShapeError("user side features do not cover all users");
    add_similarity_pairs(side.users.features, 0, top_n, pairs, skipped);
  }
  if (!side.items.empty()) {
    if (side.items.features.rows() != g.num_items()) throw ShapeError("item side features do not cover all items");
    add_similarity_pairs(side.items.features, g.num_users(), top_n, pairs, skipped);
  }
  return g.with_similarity_edges(std::move(pairs));
}

std::vector<int> dominant_attribute(const SideFeatureTable& table) {
  if (table.empty()) return {};
  std::vector<double> frequency(table.features.cols(), 0.0);
  for (std::size_t r = 0; r < table.features.rows(); ++r)
    for (std::size_t c = 0; c < table.features.cols(); ++c) frequency[c] += table.features(r, c) != 0.0;
  std::vector<int> labels(table.features.rows(), -1);
  for (std::size_t r = 0; r < table.features.rows(); ++r) {
    for (std::size_t c = 0; c < table.features.cols(); ++c) {
      if (table.features(r, c) == 0.0) continue;
      if (labels[r] < 0 || frequency[c] > frequency[static_cast<std::size_t>(labels[r])]) {
        labels[r] = static_cast<int>(c);
      }
    }
  }
  return labels;
}

}  // namespace diffgt
