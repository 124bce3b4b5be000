#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "graphdis/graphgen.hpp"
#include "graphdis/model.hpp"
#include "graphdis/param_store.hpp"

namespace graphdis {

// Probabilities entering a binary cross-entropy are clamped to
// [kProbClamp, 1 - kProbClamp].
constexpr double kProbClamp = 1e-7;

struct TrainConfig {
  double beta = 5.0;
  double lambda_param = 1.0;
  // Weight of the attribute squared-error term in the reconstruction loss.
  double attr_weight = 1.0;
  int epochs = 200;
  int batch_size = 64;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  Seed seed = 0;
  ModelConfig model;
  // Generative factor metadata. When factor_lo/factor_hi are empty, train()
  // fills them with the per-factor min/max of the training set; targets for
  // the parameter decoder are min-max normalized with these ranges.
  std::string family;
  std::vector<std::string> factor_names;
  std::vector<double> factor_lo;
  std::vector<double> factor_hi;

  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

void validate(const TrainConfig& cfg);

struct LossValues {
  double total = 0.0;
  double recon = 0.0;
  double kl = 0.0;
  double param_loss = 0.0;
  std::vector<double> kl_per_dim;  // batch mean, sums to kl
};

// Loss expression on a tape; all terms are batch means.
struct LossGraph {
  ad::Var total;
  ad::Var recon;
  ad::Var kl;
  ad::Var param_loss;
  ad::Var mu;
  ad::Var log_var;
};

// `factor_targets` holds the normalized factor vector of each sample (may be
// empty when the model has param_dim == 0); `noise` is the [B, J] standard
// normal draw used for reparameterization.
LossGraph build_loss(ad::Tape& tape, const BoundParams& params,
                     std::span<const EncodedSample> batch,
                     std::span<const std::vector<double>> factor_targets,
                     const TrainConfig& cfg, const Tensor& noise);

Tensor draw_noise(std::size_t batch, std::size_t j_latent, Seed seed);

LossValues compute_loss(const ParamStore& weights, std::span<const EncodedSample> batch,
                        std::span<const std::vector<double>> factor_targets,
                        const TrainConfig& cfg, Seed seed);

// Min-max normalization into [0, 1]; degenerate ranges map to 0.
std::vector<double> normalize_factors(const std::vector<double>& values,
                                      const std::vector<double>& lo,
                                      const std::vector<double>& hi);

struct EpochRecord {
  int epoch = 0;
  double recon = 0.0;
  double kl = 0.0;
  std::vector<double> kl_per_dim;
  double param_loss = 0.0;
  double total = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  // Columns: epoch, recon, kl, kl_dim_0..J-1, param_loss, total.
  std::string to_csv() const;
};

struct TrainResult {
  ParamStore weights;
  TrainHistory history;
  TrainConfig config;  // with factor metadata resolved
};

using EpochCallback = std::function<void(const EpochRecord&)>;

// Shuffled mini-batch Adam. Fully deterministic for a given config.
// Throws NumericError naming epoch and batch if the loss becomes non-finite.
TrainResult train(const Dataset& dataset, TrainConfig cfg, const EpochCallback& on_epoch = {});

// Fills family/factor metadata and param_dim from a dataset.
void resolve_factor_metadata(const Dataset& dataset, TrainConfig& cfg);

}  // namespace graphdis
