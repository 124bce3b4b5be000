#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "graphdis/canonical.hpp"
#include "graphdis/checkpoint.hpp"
#include "graphdis/dataset_io.hpp"
#include "graphdis/error.hpp"
#include "graphdis/graphgen.hpp"
#include "graphdis/training.hpp"
#include "helpers.hpp"

using namespace graphdis;

namespace {

Dataset er_dataset(int count, Seed seed, int n_hi = 8, bool attributes = false) {
  DatasetSpec spec;
  spec.ranges = {{"n", {1, static_cast<double>(n_hi)}}, {"p", {0, 1}}};
  spec.count = count;
  spec.seed = seed;
  spec.attributes = attributes;
  return gen_dataset(spec);
}

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.model.n_max = 8;
  cfg.model.gcn_layers = {8, 8};
  cfg.model.encoder_dense_layers = {16};
  cfg.model.dense_decoder_layers = {16, 32};
  cfg.batch_size = 16;
  cfg.epochs = 3;
  cfg.seed = 4;
  return cfg;
}

}  // namespace

TEST(Loss, NoRegularizersMeansReconstructionOnly) {
  TrainConfig cfg = tiny_config();
  cfg.beta = 0.0;
  cfg.lambda_param = 0.0;
  Dataset ds = er_dataset(5, 1);
  std::vector<EncodedSample> batch;
  std::vector<std::vector<double>> targets;
  for (const auto& r : ds.records) {
    batch.push_back(to_padded(r.graph, 8));
    targets.push_back({0.5, 0.5});
  }
  ParamStore w = init_params(cfg.model, 2);
  auto v = compute_loss(w, batch, targets, cfg, 3);
  EXPECT_EQ(v.total, v.recon);
  EXPECT_GT(v.kl, 0.0);
  EXPECT_GE(v.param_loss, 0.0);
}

TEST(Loss, UniformPredictionsCostLnTwoPerTerm) {
  // Zeroed output layer: every probability is exactly 0.5.
  TrainConfig cfg = tiny_config();
  cfg.model.n_max = 4;
  cfg.model.param_dim = 0;
  cfg.beta = 0.0;
  ParamStore w = init_params(cfg.model, 2);
  w.at("dec.out.weight").value.fill(0.0);
  w.at("dec.out.bias").value.fill(0.0);
  Graph g(2);
  g.add_edge(0, 1);
  std::vector<EncodedSample> batch{to_padded(g, 4)};
  auto v = compute_loss(w, batch, {}, cfg, 1);
  // One counted adjacency pair plus four mask entries.
  EXPECT_NEAR(v.recon, 5 * std::log(2.0), 1e-12);
}

TEST(Loss, SaturatedCorrectPredictionsHitTheClamp) {
  TrainConfig cfg = tiny_config();
  cfg.model.n_max = 3;
  cfg.model.param_dim = 0;
  cfg.beta = 0.0;
  ParamStore w = init_params(cfg.model, 2);
  w.at("dec.out.weight").value.fill(0.0);
  // Target: K3 -> every adjacency and mask entry is 1.
  w.at("dec.out.bias").value.fill(100.0);
  std::vector<EncodedSample> batch{to_padded(gdtest::complete_graph(3), 3)};
  auto v = compute_loss(w, batch, {}, cfg, 1);
  const double per_term = -std::log(1.0 - kProbClamp);
  EXPECT_NEAR(v.recon, 6 * per_term, 1e-12);
  EXPECT_LT(v.recon, 6 * 1.1e-7);
}

TEST(Loss, ComponentsNonNegativeAndKlPerDimSums) {
  TrainConfig cfg = tiny_config();
  cfg.model.use_attributes = true;
  Dataset ds = er_dataset(40, 3, 8, true);
  std::vector<EncodedSample> batch;
  std::vector<std::vector<double>> targets;
  for (const auto& r : ds.records) {
    batch.push_back(to_padded(r.graph, 8));
    targets.push_back(normalize_factors(factor_values(r.params), {1, 0}, {8, 1}));
  }
  for (Seed s = 0; s < 20; ++s) {
    ParamStore w = init_params(cfg.model, s);
    auto v = compute_loss(w, batch, targets, cfg, s);
    EXPECT_GE(v.recon, 0.0);
    EXPECT_GE(v.kl, 0.0);
    EXPECT_GE(v.param_loss, 0.0);
    EXPECT_NEAR(std::accumulate(v.kl_per_dim.begin(), v.kl_per_dim.end(), 0.0), v.kl, 1e-9);
  }
}

TEST(Loss, AttributeTermScalesWithItsWeight) {
  TrainConfig cfg = tiny_config();
  cfg.model.use_attributes = true;
  Dataset ds = er_dataset(10, 5, 8, true);
  std::vector<EncodedSample> batch;
  std::vector<std::vector<double>> targets;
  for (const auto& r : ds.records) {
    batch.push_back(to_padded(r.graph, 8));
    targets.push_back({0.5, 0.5});
  }
  ParamStore w = init_params(cfg.model, 6);
  std::vector<double> recon;
  for (double a : {0.0, 1.0, 3.0}) {
    cfg.attr_weight = a;
    recon.push_back(compute_loss(w, batch, targets, cfg, 7).recon);
  }
  EXPECT_GT(recon[1], recon[0]);
  EXPECT_NEAR(recon[2] - recon[0], 3.0 * (recon[1] - recon[0]), 1e-9);
  cfg.attr_weight = -1.0;
  EXPECT_THROW(validate(cfg), ValidationError);
}

TEST(Loss, EmptyBatchIsAnError) {
  TrainConfig cfg = tiny_config();
  ParamStore w = init_params(cfg.model, 1);
  EXPECT_THROW(compute_loss(w, {}, {}, cfg, 1), ValidationError);
}

TEST(Loss, NormalizeFactors) {
  EXPECT_EQ(normalize_factors({12, 0.25}, {1, 0}, {23, 1}), (std::vector<double>{0.5, 0.25}));
  EXPECT_EQ(normalize_factors({5}, {5}, {5}), (std::vector<double>{0.0}));
}

TEST(Train, ZeroEpochsReturnsInitialization) {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 0;
  Dataset ds = er_dataset(10, 1);
  auto res = train(ds, cfg);
  EXPECT_TRUE(res.history.epochs.empty());
  EXPECT_TRUE(res.weights.same_values(init_params(res.config.model, derive_seed(cfg.seed, 1))));
}

TEST(Train, Deterministic) {
  TrainConfig cfg = tiny_config();
  Dataset ds = er_dataset(40, 2);
  auto a = train(ds, cfg);
  auto b = train(ds, cfg);
  EXPECT_EQ(a.history.to_csv(), b.history.to_csv());
  EXPECT_EQ(serialize_checkpoint(a.weights, a.config), serialize_checkpoint(b.weights, b.config));
}

TEST(Train, LossDecreasesOnToySet) {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 30;
  Dataset ds = er_dataset(50, 3);
  auto res = train(ds, cfg);
  ASSERT_EQ(res.history.epochs.size(), 30u);
  EXPECT_LT(res.history.epochs.back().total, res.history.epochs.front().total);
}

TEST(Train, MovingAverageMakesProgress) {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 40;
  Dataset ds = er_dataset(200, 4);
  auto res = train(ds, cfg);
  const auto& h = res.history.epochs;
  auto window = [&](std::size_t end) {
    double s = 0.0;
    for (std::size_t i = end - 10; i < end; ++i) s += h[i].total;
    return s / 10;
  };
  EXPECT_LT(window(h.size()), h[9].total);
  EXPECT_LT(window(h.size()), window(10));
}

TEST(Train, HistoryCsvColumns) {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;
  auto res = train(er_dataset(10, 1), cfg);
  const std::string csv = res.history.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "epoch,recon,kl,kl_dim_0,kl_dim_1,kl_dim_2,kl_dim_3,param_loss,total");
  for (const auto& e : res.history.epochs) {
    EXPECT_NEAR(std::accumulate(e.kl_per_dim.begin(), e.kl_per_dim.end(), 0.0), e.kl, 1e-9);
  }
}

TEST(Train, FillsFactorMetadata) {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 1;
  auto res = train(er_dataset(30, 5), cfg);
  EXPECT_EQ(res.config.family, "ER");
  EXPECT_EQ(res.config.factor_names, (std::vector<std::string>{"n", "p"}));
  EXPECT_EQ(res.config.model.param_dim, 2);
  EXPECT_EQ(res.config.factor_lo.size(), 2u);
}

TEST(Train, Errors) {
  TrainConfig cfg = tiny_config();
  EXPECT_THROW(train(Dataset{}, cfg), ValidationError);
  cfg.batch_size = 0;
  EXPECT_THROW(train(er_dataset(5, 1), cfg), ValidationError);
  cfg = tiny_config();
  EXPECT_THROW(train(er_dataset(5, 1, 12), cfg), CapacityError);
}

TEST(Train, NonFiniteLossNamesEpochAndBatch) {
  TrainConfig cfg = tiny_config();
  cfg.learning_rate = 1e6;
  cfg.epochs = 50;
  try {
    train(er_dataset(64, 1), cfg);
    GTEST_SKIP() << "did not diverge";
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch"), std::string::npos) << msg;
    EXPECT_NE(msg.find("batch"), std::string::npos) << msg;
  }
}

TEST(Checkpoint, SaveLoadSaveIsByteIdentical) {
  TrainConfig cfg = tiny_config();
  cfg.epochs = 2;
  auto res = train(er_dataset(20, 1), cfg);
  auto dir = gdtest::temp_dir("ckpt");
  save_checkpoint(res.weights, res.config, dir / "a.bin");
  Checkpoint ck = load_checkpoint(dir / "a.bin");
  save_checkpoint(ck.weights, ck.config, dir / "b.bin");
  EXPECT_EQ(read_file(dir / "a.bin"), read_file(dir / "b.bin"));
  EXPECT_EQ(ck.config, res.config);
  EXPECT_TRUE(ck.weights.same_values(res.weights));
  EncodedSample x = to_padded(gen_graph(ErParams{6, 0.5}, 1), 8);
  EXPECT_EQ(encode(ck.weights, ck.config.model, x).mu,
            encode(res.weights, res.config.model, x).mu);
}

TEST(Checkpoint, CorruptionIsDetected) {
  TrainConfig cfg = tiny_config();
  ParamStore w = init_params(cfg.model, 1);
  const std::string bytes = serialize_checkpoint(w, cfg);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, bytes.size() / 2)), FormatError);
  EXPECT_THROW(deserialize_checkpoint(bytes.substr(0, 10)), FormatError);
  std::string flipped = bytes;
  flipped[flipped.size() / 2] ^= 0x40;
  EXPECT_THROW(deserialize_checkpoint(flipped), FormatError);
  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  EXPECT_THROW(deserialize_checkpoint(wrong_magic), FormatError);
}

TEST(Checkpoint, VersionMismatchIsReported) {
  TrainConfig cfg = tiny_config();
  std::string bytes = serialize_checkpoint(init_params(cfg.model, 1), cfg);
  bytes[8] = 9;  // u32 version follows the 8-byte magic
  try {
    deserialize_checkpoint(bytes);
    FAIL();
  } catch (const FormatError& e) {
    EXPECT_NE(std::string(e.what()).find("version"), std::string::npos) << e.what();
  }
}

TEST(Checkpoint, ConfigJsonRoundTrip) {
  TrainConfig cfg = tiny_config();
  cfg.family = "SW";
  cfg.factor_names = {"n", "k", "p_rewire"};
  cfg.factor_lo = {7, 2, 0};
  cfg.factor_hi = {24, 6, 1};
  cfg.model.use_attributes = true;
  EXPECT_EQ(config_from_json(config_to_json(cfg)), cfg);
}
