#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "graphdis/autodiff.hpp"
#include "graphdis/canonical.hpp"
#include "graphdis/param_store.hpp"
#include "graphdis/rng.hpp"

namespace graphdis {

// Per-node input features: normalized degree, attribute, constant one.
constexpr std::size_t kNodeFeatures = 3;

struct ModelConfig {
  int j_latent = 4;
  int n_max = kDefaultNMax;
  std::vector<int> gcn_layers{16, 16};
  // Dense layers between the concatenated node embeddings and (mu, log_var).
  std::vector<int> encoder_dense_layers{64};
  std::vector<int> dense_decoder_layers{64, 256};
  // Number of generative factors K predicted by the parameter decoder.
  int param_dim = 2;
  bool use_attributes = false;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

void validate(const ModelConfig& cfg);

// Number of strictly-upper-triangle adjacency entries, n(n-1)/2.
std::size_t upper_triangle_size(int n_max);

struct LatentDistribution {
  std::vector<double> mu;
  std::vector<double> log_var;
};

struct LatentVector {
  std::vector<double> z;
};

// Glorot-uniform weights, zero biases.
ParamStore init_params(const ModelConfig& cfg, Seed seed);

// Parameters as tape leaves, either trainable or frozen.
using BoundParams = std::map<std::string, ad::Var>;
BoundParams bind_trainable(ad::Tape& tape, ParamStore& store);
BoundParams bind_frozen(ad::Tape& tape, const ParamStore& store);

// Inputs for a batch of canonicalized samples.
struct BatchInputs {
  Tensor norm_adj;   // [B, N, N], D^-1/2 (A + I) D^-1/2 restricted to real nodes
  Tensor features;   // [B, N, kNodeFeatures]
  Tensor node_mask;  // [B, N, 1]
};
BatchInputs make_batch_inputs(std::span<const EncodedSample> samples, const ModelConfig& cfg);

struct EncoderOutput {
  ad::Var mu;       // [B, J]
  ad::Var log_var;  // [B, J]
};

EncoderOutput encoder_forward(ad::Tape& tape, const BoundParams& params,
                              const BatchInputs& inputs, const ModelConfig& cfg);
// Sigmoid outputs [B, T + 2N]: upper-triangle adjacency (row-major, i < j),
// then node mask, then attributes.
ad::Var decoder_forward(ad::Tape& tape, const BoundParams& params, ad::Var z,
                        const ModelConfig& cfg);
// Affine map z W + b with K outputs.
ad::Var param_decoder_forward(ad::Tape& tape, const BoundParams& params, ad::Var z);

// Frozen-weight inference. Safe to call concurrently on a shared store.
LatentDistribution encode(const ParamStore& weights, const ModelConfig& cfg,
                          const EncodedSample& x);
std::vector<LatentDistribution> encode_many(const ParamStore& weights, const ModelConfig& cfg,
                                            std::span<const EncodedSample> xs);
EncodedSample decode(const ParamStore& weights, const ModelConfig& cfg, const LatentVector& z);
std::vector<double> param_decode(const ParamStore& weights, const LatentVector& z);

LatentVector reparameterize(const LatentDistribution& dist, Seed seed);

// KL(N(mu, exp(log_var)) || N(0, I)) in nats, total and per dimension.
double kl_divergence(const LatentDistribution& dist);
std::vector<double> kl_per_dimension(const LatentDistribution& dist);

}  // namespace graphdis
