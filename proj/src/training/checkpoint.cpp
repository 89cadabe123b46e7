#include "diffgt/training/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diffgt/diffusion/schedule.hpp"
#include "diffgt/error.hpp"

namespace diffgt {
namespace {

static_assert(std::endian::native == std::endian::little, "checkpoint layout assumes a little-endian host");

using nlohmann::ordered_json;

constexpr char kMagic[8] = {'D', 'I', 'F', 'F', 'G', 'T', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void put(std::string& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw IoError("checkpoint is truncated");
  T value;
  std::memcpy(&value, in.data() + pos, sizeof(T));
  pos += sizeof(T);
  return value;
}

}  // namespace

std::string checkpoint_bytes(const ModelState& state) {
  const auto& c = state.config;
  const NoiseSchedule schedule = make_schedule(c.steps, c.beta_start, c.beta_end);
  ordered_json betas = ordered_json::array();
  for (std::size_t t = 1; t <= schedule.steps(); ++t) betas.push_back(schedule.beta(t));
  ordered_json index = ordered_json::array();
  for (const auto& [name, m] : state.params) index.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}});

  ordered_json header{
      {"config", ordered_json::parse(config_to_json(c))},
      {"config_hash", config_hash(c)},
      {"dataset_hash", state.dataset_hash},
      {"best_epoch", state.best_epoch},
      {"betas", betas},
      {"params", index},
  };
  const std::string text = header.dump();

  std::string out(kMagic, sizeof(kMagic));
  put<std::uint32_t>(out, kVersion);
  put<std::uint64_t>(out, text.size());
  out += text;
  for (const auto& [_, m] : state.params) {
    out.append(reinterpret_cast<const char*>(m.data()), m.size() * sizeof(double));
  }
  return out;
}

ModelState checkpoint_from_bytes(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
    throw IoError("not a DiffGT checkpoint (bad magic)");
  }
  std::size_t pos = sizeof(kMagic);
  const auto version = take<std::uint32_t>(bytes, pos);
  if (version != kVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto header_len = take<std::uint64_t>(bytes, pos);
  if (pos + header_len > bytes.size()) throw IoError("checkpoint header is truncated");

  ordered_json header;
  try {
    header = ordered_json::parse(bytes.substr(pos, header_len));
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("checkpoint header is not valid JSON: ") + e.what());
  }
  pos += header_len;

  ModelState state;
  try {
    state.config = config_from_json(header.at("config").dump());
    if (header.at("config_hash").get<std::string>() != config_hash(state.config)) {
      throw IntegrityError("checkpoint config hash does not match its stored config");
    }
    state.dataset_hash = header.at("dataset_hash").get<std::string>();
    state.best_epoch = header.at("best_epoch").get<std::size_t>();
    for (const auto& entry : header.at("params")) {
      const auto rows = entry.at("rows").get<std::size_t>();
      const auto cols = entry.at("cols").get<std::size_t>();
      const std::size_t n = rows * cols;
      if (pos + n * sizeof(double) > bytes.size()) throw IoError("checkpoint payload is truncated");
      std::vector<double> values(n);
      std::memcpy(values.data(), bytes.data() + pos, n * sizeof(double));
      pos += n * sizeof(double);
      state.params.emplace(entry.at("name").get<std::string>(), Matrix(rows, cols, std::move(values)));
    }
  } catch (const ordered_json::exception& e) {
    throw IoError(std::string("checkpoint header is malformed: ") + e.what());
  } catch (const ConfigError& e) {
    throw IoError(std::string("checkpoint config is invalid: ") + e.what());
  }
  if (pos != bytes.size()) throw IoError("checkpoint has trailing bytes");
  return state;
}

void save_checkpoint(const ModelState& state, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write checkpoint '" + path + "'");
  const std::string bytes = checkpoint_bytes(state);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing checkpoint '" + path + "'");
}

ModelState load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return checkpoint_from_bytes(buf.str());
}

}  // namespace diffgt
