#include "diffgt/cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "diffgt/error.hpp"
#include "diffgt/eval/ablation.hpp"
#include "diffgt/eval/diagnostics.hpp"
#include "diffgt/eval/metrics.hpp"
#include "diffgt/eval/svg.hpp"
#include "diffgt/eval/timing.hpp"
#include "diffgt/graph/bundle.hpp"
#include "diffgt/training/trainer.hpp"

#ifndef DIFFGT_SOURCE_REVISION
#define DIFFGT_SOURCE_REVISION "unknown"
#endif

namespace diffgt {
namespace {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

constexpr const char* kBundleFile = "bundle.json";
constexpr const char* kCheckpointFile = "checkpoint.bin";

void write_file(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
}

std::string join(const std::vector<std::string>& args) {
  std::string out;
  for (const auto& a : args) out += (out.empty() ? "" : " ") + a;
  return out;
}

/// One manifest per output directory; each command owns one entry under
/// "runs" so re-running a command rewrites identical bytes.
void update_manifest(const fs::path& dir, const std::string& command, ordered_json run) {
  const fs::path path = dir / "manifest.json";
  ordered_json manifest{{"format", "diffgt-manifest"}, {"version", 1}, {"runs", ordered_json::object()}};
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      ordered_json existing = ordered_json::parse(in);
      if (existing.contains("runs") && existing["runs"].is_object()) manifest["runs"] = existing["runs"];
    } catch (const ordered_json::exception&) {
      // A corrupt manifest is replaced.
    }
  }
  run["source_revision"] = DIFFGT_SOURCE_REVISION;
  run["output_dir"] = dir.string();
  manifest["runs"][command] = std::move(run);
  write_file(path, manifest.dump(2) + "\n");
}

ordered_json config_entry(const TrainConfig& c) {
  return ordered_json{{"config_hash", config_hash(c)},
                      {"seed", c.seed},
                      {"ablation", c.ablation},
                      {"noise", to_string(c.noise)},
                      {"config", ordered_json::parse(config_to_json(c))}};
}

DatasetBundle load_bundle_dir(const fs::path& dir) {
  const fs::path file = fs::is_directory(dir) ? dir / kBundleFile : dir;
  return load_bundle(file.string());
}

TrainConfig config_with_env_seed(TrainConfig c) {
  if (const char* env = std::getenv("DIFFGT_SEED"); env != nullptr && *env != '\0') {
    try {
      std::size_t used = 0;
      c.seed = std::stoull(env, &used);
      if (used != std::string(env).size()) throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw ConfigError(std::string("DIFFGT_SEED must be an unsigned integer, got '") + env + "'");
    }
  }
  return c;
}

std::vector<int> item_labels(const DatasetBundle& bundle) {
  if (bundle.dataset.side.items.empty()) throw ConfigError("diagnostics need item side information for class labels");
  return dominant_attribute(bundle.dataset.side.items);
}

Matrix item_rows(const Matrix& embeddings, std::size_t num_users) {
  std::vector<std::size_t> rows(embeddings.rows() - num_users);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = num_users + i;
  return gather_rows(embeddings, rows);
}

struct Options {
  std::string data;
  std::string side;
  std::string user_side;
  std::string out;
  std::string config;
  std::string ablation;
  std::string checkpoint;
  std::string mode;
  std::size_t k = 20;
  std::uint64_t seed = 2024;
  std::size_t nodes = 1000;
  std::size_t repeats = 3;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  std::vector<std::string> variants;
};

int cmd_ingest(const Options& o, const std::string& command_line) {
  const Dataset dataset = ingest(o.data, o.side.empty() ? std::nullopt : std::optional<std::string>(o.side),
                                 o.user_side.empty() ? std::nullopt : std::optional<std::string>(o.user_side));
  const DatasetBundle bundle{dataset, split(dataset.graph, o.seed)};
  const fs::path out(o.out);
  fs::create_directories(out);
  save_bundle(bundle, (out / kBundleFile).string());
  const DatasetStats s = dataset_stats(dataset.graph);
  ordered_json stats{{"num_users", s.num_users},
                     {"num_items", s.num_items},
                     {"num_edges", s.num_edges},
                     {"density", s.density},
                     {"density_percent", s.density * 100.0},
                     {"train_edges", bundle.split.train.size()},
                     {"user_attributes", dataset.side.users.vocabulary.size()},
                     {"item_attributes", dataset.side.items.vocabulary.size()}};
  write_file(out / "stats.json", stats.dump(2) + "\n");
  update_manifest(out, "ingest",
                  {{"command_line", command_line}, {"seed", o.seed}, {"dataset_id", dataset_hash(bundle)}});
  std::cout << stats.dump(2) << '\n';
  return kExitOk;
}

int cmd_train(const Options& o, const std::string& command_line) {
  TrainConfig config = config_with_env_seed(load_config(o.config));
  if (!o.ablation.empty()) config = apply_ablation(config, o.ablation);
  const DatasetBundle bundle = load_bundle_dir(o.data);
  const fs::path out(o.out);
  fs::create_directories(out / "logs");

  TrainOptions options;
  options.dump_path = (out / "divergence_dump.bin").string();
  options.on_epoch = [](const EpochLog& r) {
    std::cerr << "epoch " << r.epoch << " total=" << r.total << " val_loss=" << r.val_loss << '\n';
  };
  const TrainResult result = train(bundle, config, options);
  save_checkpoint(result.state, (out / kCheckpointFile).string());
  write_file(out / "logs" / "train_log.csv", log_to_csv(result.log));

  ordered_json run = config_entry(config);
  run["command_line"] = command_line;
  run["dataset_id"] = result.state.dataset_hash;
  run["epochs"] = result.log.size();
  run["best_epoch"] = result.state.best_epoch;
  run["stopped_early"] = result.stopped_early;
  update_manifest(out, "train", std::move(run));
  std::cout << "trained " << result.log.size() << " epochs, best epoch " << result.state.best_epoch << ", checkpoint "
            << (out / kCheckpointFile).string() << '\n';
  return kExitOk;
}

int cmd_evaluate(const Options& o, const std::string& command_line) {
  const ModelState state = load_checkpoint(o.checkpoint);
  const DatasetBundle bundle = load_bundle_dir(o.data);
  const MetricReport report = evaluate(state, bundle, o.k);
  const fs::path out = o.out.empty() ? fs::path(o.checkpoint).parent_path() : fs::path(o.out);
  const std::string tag = "metrics_at_" + std::to_string(o.k);
  write_file(out / "reports" / (tag + ".csv"), report_to_csv(report, bundle.split));
  write_file(out / "reports" / (tag + ".txt"), report_to_table(report));
  ordered_json run = config_entry(state.config);
  run["command_line"] = command_line;
  run["dataset_id"] = state.dataset_hash;
  run["k"] = o.k;
  update_manifest(out, "evaluate@" + std::to_string(o.k), std::move(run));
  std::cout << report_to_table(report);
  return kExitOk;
}

int cmd_diagnose(const Options& o, const std::string& command_line) {
  const ModelState state = load_checkpoint(o.checkpoint);
  const fs::path out(o.out);
  ordered_json run = config_entry(state.config);
  run["command_line"] = command_line;
  run["mode"] = o.mode;

  if (o.mode == "timing") {
    TimingSetup setup;
    setup.nodes = o.nodes;
    setup.steps = state.config.steps;
    setup.samples = state.config.reverse_samples;
    setup.dim = state.config.model.dim;
    setup.encoder_layers = state.config.model.encoder_layers;
    setup.denoiser_layers = state.config.model.denoiser_layers;
    setup.k_lin = state.config.model.k_lin;
    setup.repeats = o.repeats;
    setup.seed = state.config.seed;
    auto reports = timing_harness(setup, timing_variants());
    if (!o.data.empty()) {
      const DatasetBundle bundle = load_bundle_dir(o.data);
      if (dataset_hash(bundle) != state.dataset_hash) throw IntegrityError("checkpoint and dataset hashes differ");
      attach_metrics(reports, state, bundle, o.k);
    }
    write_file(out / "reports" / "timing.csv", timing_to_csv(reports));
    write_file(out / "reports" / "timing.txt", timing_to_table(reports));
    std::cout << timing_to_table(reports);
    update_manifest(out, "diagnose-timing", std::move(run));
    return kExitOk;
  }

  const DatasetBundle bundle = load_bundle_dir(o.data);
  if (dataset_hash(bundle) != state.dataset_hash) {
    throw IntegrityError("checkpoint was trained on dataset " + state.dataset_hash + ", bundle hashes to " +
                         dataset_hash(bundle));
  }
  run["dataset_id"] = state.dataset_hash;
  const ModelContext ctx = make_context(bundle, state.config);
  const std::vector<int> labels = item_labels(bundle);
  const Matrix items = item_rows(encoded_embeddings(state.params, state.config, ctx), ctx.graph.num_users());

  if (o.mode == "snr") {
    std::vector<std::size_t> steps = {0};
    const std::size_t stride = std::max<std::size_t>(1, state.config.steps / 10);
    for (std::size_t t = stride; t <= state.config.steps; t += stride) steps.push_back(t);
    if (steps.back() != state.config.steps) steps.push_back(state.config.steps);
    // Classes with a single item have no within-class scatter; leave them out.
    std::vector<int> snr_labels = labels;
    std::map<int, std::size_t> sizes;
    for (int l : labels) ++sizes[l];
    for (int& l : snr_labels)
      if (sizes[l] < 2) l = -1;
    std::vector<SnrCurve> curves;
    std::vector<Series> series;
    for (NoiseMode mode : {NoiseMode::kIsotropic, NoiseMode::kDirectional}) {
      RandomSource rng = RandomSource(state.config.seed).derive(0x5a7);
      curves.push_back(snr_curve(items, snr_labels, ctx.schedule, mode, steps, rng));
      Series s{std::string(to_string(mode)), {}, curves.back().snr};
      for (auto t : steps) s.x.push_back(static_cast<double>(t));
      series.push_back(std::move(s));
    }
    std::string csv = "# item embeddings encoded by the supplied checkpoint; labels = dominant item attribute\n";
    csv += snr_to_csv(curves);
    write_file(out / "reports" / "snr.csv", csv);
    write_file(out / "figures" / "snr.svg", svg_line_chart(series, "SNR of noisy item embeddings", "step t", "Fisher ratio"));
    std::cout << csv;
  } else if (o.mode == "svd") {
    const SvdExport e = svd_export(items, labels);
    write_file(out / "reports" / "svd.csv", svd_to_csv(e));
    std::ostringstream title;
    title << "Top-2 SVD projection (sigma1/sigma2 = " << e.anisotropy() << ")";
    write_file(out / "figures" / "svd.svg", svg_scatter(e.points, e.labels, title.str()));
    std::cout << "sigma1=" << e.sigma1 << " sigma2=" << e.sigma2 << " anisotropy=" << e.anisotropy() << '\n';
  } else {
    throw ConfigError("unknown diagnose mode '" + o.mode + "' (expected snr|svd|timing)");
  }
  update_manifest(out, "diagnose-" + o.mode, std::move(run));
  return kExitOk;
}

int cmd_ablate(const Options& o, const std::string& command_line) {
  const TrainConfig base = config_with_env_seed(load_config(o.config));
  const DatasetBundle bundle = load_bundle_dir(o.data);
  const std::vector<std::string> variants = o.variants.empty() ? ablation_variants() : o.variants;
  for (const auto& v : variants) variant_config(base, v);  // reject unknown names before any training
  const auto reports = ablate(bundle.dataset, base, variants, o.seeds, o.k,
                              [](const std::string& line) { std::cerr << line << '\n'; });
  const fs::path out(o.out);
  write_file(out / "reports" / "ablation.csv", ablation_to_csv(reports));
  write_file(out / "reports" / "ablation.txt", ablation_to_table(reports));
  ordered_json run = config_entry(base);
  run["command_line"] = command_line;
  run["dataset_id"] = dataset_hash(bundle);
  run["seeds"] = o.seeds;
  run["variants"] = variants;
  update_manifest(out, "ablate", std::move(run));
  std::cout << ablation_to_table(reports);
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"DiffGT: graph diffusion recommender with directional noise", "diffgt"};
  app.require_subcommand(1);
  Options o;

  auto* ingest_cmd = app.add_subcommand("ingest", "Parse interactions and side information into a dataset bundle");
  ingest_cmd->add_option("--data", o.data, "Interaction TSV (user<TAB>item[...])")->required();
  ingest_cmd->add_option("--side", o.side, "Item side-information TSV (item<TAB>a|b|c)");
  ingest_cmd->add_option("--user-side", o.user_side, "User side-information TSV (user<TAB>a|b|c)");
  ingest_cmd->add_option("--seed", o.seed, "Split seed")->capture_default_str();
  ingest_cmd->add_option("--out", o.out, "Output directory")->required();

  auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint, log and manifest");
  train_cmd->add_option("--config", o.config, "JSON config")->required();
  train_cmd->add_option("--data", o.data, "Bundle directory written by ingest")->required();
  train_cmd->add_option("--out", o.out, "Output directory")->required();
  train_cmd->add_option("--ablate", o.ablation, "Ablation variant (-Direction, -Condition, ...)");

  auto* eval_cmd = app.add_subcommand("evaluate", "Recall@k / NDCG@k over the ten test draws");
  eval_cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
  eval_cmd->add_option("--data", o.data, "Bundle directory")->required();
  eval_cmd->add_option("--k", o.k, "Cutoff")->capture_default_str()->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", o.out, "Output directory (defaults to the checkpoint's)");

  auto* diag_cmd = app.add_subcommand("diagnose", "SNR curves, SVD projection or timing table");
  diag_cmd->add_option("--checkpoint", o.checkpoint, "Checkpoint file")->required();
  diag_cmd->add_option("--mode", o.mode, "snr|svd|timing")->required();
  diag_cmd->add_option("--data", o.data, "Bundle directory (required for snr/svd; adds metrics to timing)");
  diag_cmd->add_option("--out", o.out, "Output directory")->required();
  diag_cmd->add_option("--nodes", o.nodes, "Synthetic graph size for timing")->capture_default_str();
  diag_cmd->add_option("--repeats", o.repeats, "Timing repeats (minimum is kept)")->capture_default_str();
  diag_cmd->add_option("--k", o.k, "Metric cutoff for timing metrics")->capture_default_str();

  auto* ablate_cmd = app.add_subcommand("ablate", "Train base and variants over several seeds and compare");
  ablate_cmd->add_option("--config", o.config, "Base JSON config")->required();
  ablate_cmd->add_option("--data", o.data, "Bundle directory")->required();
  ablate_cmd->add_option("--out", o.out, "Output directory")->required();
  ablate_cmd->add_option("--variant", o.variants, "Variants (repeatable); default: all six");
  ablate_cmd->add_option("--seeds", o.seeds, "Seeds")->delimiter(',')->capture_default_str();
  ablate_cmd->add_option("--k", o.k, "Cutoff")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  if (!reversed.empty()) reversed.pop_back();  // program name
  const std::string command_line = join(args);
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInputError;
  }

  try {
    if (ingest_cmd->parsed()) return cmd_ingest(o, command_line);
    if (train_cmd->parsed()) return cmd_train(o, command_line);
    if (eval_cmd->parsed()) return cmd_evaluate(o, command_line);
    if (diag_cmd->parsed()) return cmd_diagnose(o, command_line);
    if (ablate_cmd->parsed()) return cmd_ablate(o, command_line);
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    std::cerr << "diagnostic dump: " << (e.dump_path().empty() ? "(none written)" : e.dump_path()) << '\n';
    return kExitDivergence;
  } catch (const IntegrityError& e) {
    std::cerr << "error: integrity mismatch: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace diffgt
