#include <cmath>

#include <gtest/gtest.h>

#include "graphdis/canonical.hpp"
#include "graphdis/error.hpp"
#include "graphdis/graphgen.hpp"
#include "graphdis/model.hpp"
#include "helpers.hpp"

using namespace graphdis;

namespace {

ModelConfig small_config() {
  ModelConfig cfg;
  cfg.n_max = 8;
  cfg.j_latent = 4;
  return cfg;
}

}  // namespace

TEST(Model, EncodeShapes) {
  ModelConfig cfg = small_config();
  ParamStore w = init_params(cfg, 1);
  auto d = encode(w, cfg, to_padded(gen_graph(ErParams{6, 0.5}, 2), cfg.n_max));
  EXPECT_EQ(d.mu.size(), 4u);
  EXPECT_EQ(d.log_var.size(), 4u);
}

TEST(Model, EncodeIsDeterministicAcrossRelabelings) {
  ModelConfig cfg = small_config();
  ParamStore w = init_params(cfg, 1);
  std::mt19937_64 rng(5);
  int checked = 0;
  for (int t = 0; t < 100 && checked < 10; ++t) {
    Graph g = gdtest::random_graph(8, 0.4, rng);
    if (!bosam_refine(g).singleton_classes()) continue;
    ++checked;
    auto d0 = encode(w, cfg, to_padded(g, 8));
    auto d1 = encode(w, cfg, to_padded(g.relabeled(gdtest::random_permutation(8, rng)), 8));
    EXPECT_EQ(d0.mu, d1.mu);
    EXPECT_EQ(d0.log_var, d1.log_var);
  }
  EXPECT_GT(checked, 0);
}

TEST(Model, AllPaddingInputIsFinite) {
  ModelConfig cfg = small_config();
  ParamStore w = init_params(cfg, 1);
  auto d = encode(w, cfg, EncodedSample(cfg.n_max));
  for (double x : d.mu) EXPECT_TRUE(std::isfinite(x));
  for (double x : d.log_var) EXPECT_TRUE(std::isfinite(x));
}

TEST(Model, EncodeRejectsWrongPadding) {
  ModelConfig cfg = small_config();
  ParamStore w = init_params(cfg, 1);
  EXPECT_THROW(encode(w, cfg, EncodedSample(5)), ShapeError);
}

TEST(Model, EncodeManyMatchesEncode) {
  ModelConfig cfg = small_config();
  ParamStore w = init_params(cfg, 3);
  std::vector<EncodedSample> xs;
  for (int i = 0; i < 300; ++i) xs.push_back(to_padded(gen_graph(ErParams{1 + i % 8, 0.4}, i), 8));
  auto many = encode_many(w, cfg, xs);
  for (int i : {0, 17, 255, 299}) EXPECT_EQ(many[i].mu, encode(w, cfg, xs[i]).mu);
}

TEST(Model, DecodeIsSymmetricAndInOpenUnitInterval) {
  ModelConfig cfg = small_config();
  cfg.use_attributes = true;
  ParamStore w = init_params(cfg, 4);
  Rng rng = make_rng(9);
  for (int t = 0; t < 1000; ++t) {
    LatentVector z;
    for (int j = 0; j < cfg.j_latent; ++j) z.z.push_back(3 * standard_normal(rng));
    EncodedSample s = decode(w, cfg, z);
    for (int i = 0; i < cfg.n_max; ++i) {
      ASSERT_EQ(s.adj_at(i, i), 0.0);
      ASSERT_GT(s.mask[i], 0.0);
      ASSERT_LT(s.mask[i], 1.0);
      for (int k = 0; k < cfg.n_max; ++k) {
        ASSERT_EQ(s.adj_at(i, k), s.adj_at(k, i));
        if (i != k) {
          ASSERT_GT(s.adj_at(i, k), 0.0);
          ASSERT_LT(s.adj_at(i, k), 1.0);
        }
      }
    }
  }
  LatentVector z{{0.1, -0.2, 0.3, 0.4}};
  EXPECT_EQ(decode(w, cfg, z), decode(w, cfg, z));
}

TEST(Model, ParamDecoderIsAffine) {
  ModelConfig cfg = small_config();
  cfg.param_dim = 2;
  ParamStore w = init_params(cfg, 4);
  LatentVector z1{{0.5, -1.0, 2.0, 0.0}}, z2{{-0.3, 0.2, 0.1, 1.5}}, sum{{0.2, -0.8, 2.1, 1.5}};
  LatentVector zero{{0, 0, 0, 0}};
  auto b = param_decode(w, zero);
  auto a1 = param_decode(w, z1), a2 = param_decode(w, z2), as = param_decode(w, sum);
  for (int k = 0; k < 2; ++k) EXPECT_NEAR(as[k] - b[k], (a1[k] - b[k]) + (a2[k] - b[k]), 1e-12);

  w.at("h.weight").value.fill(0.0);
  w.at("h.bias").value = Tensor({1, 2}, std::vector<double>{0.3, 0.7});
  EXPECT_EQ(param_decode(w, z1), (std::vector<double>{0.3, 0.7}));

  ModelConfig square = small_config();
  square.param_dim = 4;
  ParamStore id = init_params(square, 1);
  id.at("h.weight").value.fill(0.0);
  for (int j = 0; j < 4; ++j) id.at("h.weight").value[j * 4 + j] = 1.0;
  id.at("h.bias").value.fill(0.0);
  EXPECT_EQ(param_decode(id, z1), z1.z);
}

TEST(Model, ReparameterizeVanishingVariance) {
  LatentDistribution d{{0.5, -1.5}, {-50.0, -50.0}};
  auto z = reparameterize(d, 3);
  EXPECT_NEAR(z.z[0], 0.5, 1e-9);
  EXPECT_NEAR(z.z[1], -1.5, 1e-9);
  EXPECT_EQ(reparameterize(d, 3).z, z.z);
}

TEST(Model, ReparameterizeMoments) {
  LatentDistribution d{{0.0}, {0.0}};
  const int n = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = reparameterize(d, static_cast<Seed>(i)).z[0];
    s += z;
    s2 += z * z;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  EXPECT_NEAR(mean, 0.0, 3 * std::sqrt(1.0 / n));
  // Var of the sample variance of a standard normal is 2/n.
  EXPECT_NEAR(var, 1.0, 3 * std::sqrt(2.0 / n));
}

TEST(Model, KlClosedForms) {
  EXPECT_EQ(kl_divergence({{0.0, 0.0}, {0.0, 0.0}}), 0.0);
  EXPECT_DOUBLE_EQ(kl_divergence({{1.0}, {0.0}}), 0.5);
  EXPECT_NEAR(kl_divergence({{0.0}, {1.0}}), 0.5 * (std::exp(1.0) - 2.0), 1e-15);
}

TEST(Model, KlMatchesMonteCarlo) {
  // KL(q||p) = E_q[log q(z) - log p(z)] with q = N(0, e).
  const double var = std::exp(1.0);
  Rng rng = make_rng(2);
  const int n = 1000000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = std::sqrt(var) * standard_normal(rng);
    acc += -0.5 * std::log(var) - 0.5 * z * z / var + 0.5 * z * z;
  }
  EXPECT_NEAR(kl_divergence({{0.0}, {1.0}}), acc / n, 0.01 * (acc / n));
}

TEST(Model, KlNonNegative) {
  Rng rng = make_rng(4);
  for (int t = 0; t < 1000; ++t) {
    LatentDistribution d;
    for (int j = 0; j < 4; ++j) {
      d.mu.push_back(2 * standard_normal(rng));
      d.log_var.push_back(3 * standard_normal(rng));
    }
    EXPECT_GE(kl_divergence(d), 0.0);
    double sum = 0.0;
    for (double k : kl_per_dimension(d)) sum += k;
    EXPECT_NEAR(sum, kl_divergence(d), 1e-12);
  }
}

TEST(Model, ConfigValidation) {
  ModelConfig cfg;
  cfg.j_latent = 0;
  EXPECT_THROW(validate(cfg), ValidationError);
  cfg = ModelConfig{};
  cfg.param_dim = -1;
  EXPECT_THROW(validate(cfg), ValidationError);
}
