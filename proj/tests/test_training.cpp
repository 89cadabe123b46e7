#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "diffgt/error.hpp"
#include "diffgt/training/checkpoint.hpp"
#include "diffgt/training/losses.hpp"
#include "diffgt/training/optimizer.hpp"
#include "diffgt/training/trainer.hpp"
#include "support/oracles.hpp"

using namespace diffgt;

namespace {

TrainConfig toy_config() {
  TrainConfig c;
  c.model.dim = 4;
  c.model.k_lin = 3;
  c.steps = 10;
  c.reverse_samples = 3;
  c.batch_size = 4;
  c.max_epochs = 5;
  c.patience = 50;
  c.top_n = 1;
  return c;
}

}  // namespace

TEST_CASE("bpr: hand values and ordering") {
  const std::vector<double> same = {0.3, -1.0}, pos = {5.0, 2.0}, neg = {-5.0, 1.0};
  CHECK(bpr_loss(same, same) == doctest::Approx(std::log(2.0)));
  CHECK(bpr_loss(pos, neg) == doctest::Approx((std::log1p(std::exp(-10.0)) + std::log1p(std::exp(-1.0))) / 2));
  CHECK(bpr_loss(pos, neg) < bpr_loss(neg, pos));
  const std::vector<double> huge_pos = {800.0}, huge_neg = {-800.0};
  CHECK(std::isfinite(bpr_loss(huge_neg, huge_pos)));
  CHECK(bpr_loss(huge_neg, huge_pos) == doctest::Approx(1600.0));
}

TEST_CASE("contrastive: hand value, bounds, errors") {
  const Matrix eye = Matrix::identity(3);
  const double tau = 0.5;
  const double expected = std::log(std::exp(2.0) + 2.0) - 2.0;
  CHECK(contrastive_loss(eye, eye, tau) == doctest::Approx(expected));
  // Row scaling does not matter after normalisation.
  CHECK(contrastive_loss(3.0 * eye, eye, tau) == doctest::Approx(expected));
  RandomSource rng(1);
  const Matrix a = standard_normal(rng, 6, 4), b = standard_normal(rng, 6, 4);
  CHECK(contrastive_loss(a, b, 0.2) >= 0.0);
  CHECK(contrastive_loss(a, a, 0.2) < contrastive_loss(a, b, 0.2));
  CHECK_THROWS_AS(contrastive_loss(a, b, 0.0), ConfigError);
  CHECK_THROWS_AS(contrastive_loss(a, standard_normal(rng, 5, 4), 0.2), ShapeError);

  const auto check = testing::check_gradients({{"a", a}, {"b", b}}, [](Tape& t) {
    return contrastive_loss(t.param("a"), t.param("b"), 0.2);
  });
  CHECK(check.max_rel_error < 1e-6);
}

TEST_CASE("total loss weights the parts and skips zero-weighted terms") {
  const LossWeights w{0.5, 0.1, 0.2};
  CHECK(total_loss(LossParts{1.0, 2.0, 3.0}, w) == doctest::Approx(1.0 + 1.0 + 0.3));
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK(total_loss(LossParts{1.0, nan, nan}, LossWeights{0.0, 0.0, 0.2}) == 1.0);
  CHECK(diffusion_loss(Matrix::from_rows({{1, 2}}), Matrix::from_rows({{3, 2}})) == doctest::Approx(2.0));
}

TEST_CASE("adam: first step moves by lr·sign(g); zero gradient is a fixed point") {
  ParamSet p{{"w", Matrix::from_rows({{1.0, -2.0, 0.5}})}};
  Tape tape;
  register_params(tape, p);
  const Gradients g = tape.gradient_of(ad::sum(ad::hadamard(tape.param("w"), tape.constant(Matrix::from_rows({{3, -0.01, 0}})))));
  Adam adam(0.1);
  adam.step(p, g);
  CHECK(adam.steps_taken() == 1);
  CHECK(p["w"](0, 0) == doctest::Approx(0.9));
  CHECK(p["w"](0, 1) == doctest::Approx(-1.9));
  CHECK(p["w"](0, 2) == 0.5);
}

TEST_CASE("early stopping: strict improvement and patience") {
  EarlyStopping es(2);
  CHECK_FALSE(es.observe(1, 5.0));
  CHECK(es.improved());
  CHECK_FALSE(es.observe(2, 4.0));
  CHECK_FALSE(es.observe(3, 4.0));
  CHECK_FALSE(es.improved());
  CHECK(es.observe(4, 4.5));
  CHECK(es.best_epoch() == 2);
  CHECK(es.best_value() == 4.0);
}

TEST_CASE("config: JSON round trip, strictness, ablations") {
  TrainConfig c = toy_config();
  c.model.attention = AttentionKind::kFull;
  c.inference = InferenceMode::kChain;
  CHECK(config_from_json(config_to_json(c)) == c);
  CHECK(config_hash(c) == config_hash(config_from_json(config_to_json(c))));
  CHECK(config_from_json("{}") == TrainConfig{});
  CHECK_THROWS_AS(config_from_json(R"({"sed": 1})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"seed": "one"})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"version": 2})"), ConfigError);
  CHECK_THROWS_AS(config_from_json(R"({"reverse_samples": 60})"), ConfigError);
  CHECK_THROWS_AS(config_from_json("not json"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), IoError);

  const TrainConfig base;
  CHECK(apply_ablation(base, "-Direction").noise == NoiseMode::kIsotropic);
  CHECK_FALSE(apply_ablation(base, "-Condition").model.use_condition);
  CHECK(apply_ablation(base, "-Transformer").model.denoiser == DenoiserKind::kWeightedMatrix);
  CHECK_FALSE(apply_ablation(base, "-Side").use_side);
  CHECK(apply_ablation(base, "-CL").weights.contrastive == 0.0);
  CHECK(apply_ablation(base, "-DiffL").weights.diffusion == 0.0);
  CHECK(apply_ablation(base, "-DiffL").ablation == "-DiffL");
  CHECK(ablation_variants().size() == 6);
  CHECK_THROWS_AS(apply_ablation(base, "-Everything"), ConfigError);
}

TEST_CASE("composite objective: gradients agree with finite differences") {
  const DatasetBundle bundle = testing::toy_bundle();
  for (auto attention : {AttentionKind::kLinear, AttentionKind::kFull}) {
    TrainConfig cfg = toy_config();
    cfg.model.attention = attention;
    const ModelContext ctx = make_context(bundle, cfg);
    ParamSet params = init_params(cfg, ctx.graph.num_nodes());
    RandomSource rng(9);
    for (auto& [name, m] : params)
      if (!name.ends_with(".compress")) for (double& v : m.values()) v += 0.2 * rng.normal();
    Minibatch batch;
    batch.users = {0, 1, 2, 0};
    batch.positive_rows = {4, 5, 4, 6};
    batch.negative_rows = {7, 4, 5, 7};
    batch.step = 4;
    batch.noise = standard_normal(rng, ctx.graph.num_nodes(), cfg.model.dim);
    const auto check = testing::check_gradients(params, [&](Tape& t) { return batch_losses(t, ctx, cfg, batch).total; });
    INFO(check.worst);
    CHECK(check.max_rel_error < 1e-4);
  }
}

TEST_CASE("checkpoint: byte round trip and corruption handling") {
  const DatasetBundle bundle = testing::toy_bundle();
  const TrainResult r = train(bundle, toy_config());
  const std::string bytes = checkpoint_bytes(r.state);
  CHECK(checkpoint_from_bytes(bytes) == r.state);
  CHECK(checkpoint_bytes(checkpoint_from_bytes(bytes)) == bytes);

  CHECK_THROWS_AS(checkpoint_from_bytes("NOTACKPT" + bytes.substr(8)), IoError);
  CHECK_THROWS_AS(checkpoint_from_bytes(bytes.substr(0, bytes.size() - 3)), IoError);
  CHECK_THROWS_AS(checkpoint_from_bytes(bytes + "x"), IoError);

  std::string tampered = bytes;
  const auto at = tampered.find("\"seed\":");
  REQUIRE(at != std::string::npos);
  std::size_t digit = at + 7;
  while (tampered[digit] == ' ') ++digit;
  tampered[digit] = tampered[digit] == '1' ? '2' : '1';
  CHECK_THROWS_AS(checkpoint_from_bytes(tampered), IntegrityError);

  const auto path = (std::filesystem::temp_directory_path() / "diffgt_test_ckpt.bin").string();
  save_checkpoint(r.state, path);
  CHECK(load_checkpoint(path) == r.state);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), IoError);
}

TEST_CASE("training: deterministic, logs every epoch, decreasing on the toy graph") {
  const DatasetBundle bundle = testing::toy_bundle();
  TrainConfig cfg = toy_config();
  cfg.max_epochs = 60;
  cfg.learning_rate = 1e-2;
  std::size_t seen = 0;
  TrainOptions opts;
  opts.on_epoch = [&](const EpochLog&) { ++seen; };
  const TrainResult a = train(bundle, cfg, opts);
  const TrainResult b = train(bundle, cfg);
  CHECK(checkpoint_bytes(a.state) == checkpoint_bytes(b.state));
  CHECK(log_to_csv(a.log) == log_to_csv(b.log));
  CHECK(seen == a.log.size());
  CHECK(log_to_csv(a.log).starts_with("epoch,bpr,diff,cl,total,val_loss\n"));
  REQUIRE(a.log.size() == 60);
  CHECK(a.log.back().total < a.log.front().total);
  CHECK(a.state.dataset_hash == dataset_hash(bundle));
  for (const auto& [name, m] : a.state.params) CHECK(all_finite(m));

  TrainConfig other = cfg;
  other.seed = cfg.seed + 1;
  CHECK(checkpoint_bytes(train(bundle, other).state) != checkpoint_bytes(a.state));
}

TEST_CASE("training: early stopping on a plateau") {
  TrainConfig cfg = toy_config();
  cfg.learning_rate = 0.0;
  cfg.patience = 3;
  cfg.max_epochs = 100;
  const TrainResult r = train(testing::toy_bundle(), cfg);
  CHECK(r.stopped_early);
  CHECK(r.log.size() <= cfg.patience + 1);
  CHECK(r.state.best_epoch == 1);
}

TEST_CASE("training: divergence raises and dumps the last finite parameters") {
  TrainConfig cfg = toy_config();
  cfg.learning_rate = 1e150;
  cfg.max_epochs = 50;
  TrainOptions opts;
  opts.dump_path = (std::filesystem::temp_directory_path() / "diffgt_test_dump.bin").string();
  std::filesystem::remove(opts.dump_path);
  try {
    train(testing::toy_bundle(), cfg, opts);
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(e.dump_path() == opts.dump_path);
    CHECK(std::filesystem::exists(opts.dump_path));
    for (const auto& [name, m] : load_checkpoint(opts.dump_path).params) CHECK(all_finite(m));
  }
  std::filesystem::remove(opts.dump_path);
}
