#include "graphdis/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphdis/error.hpp"

namespace graphdis {

namespace {

// One record per forward pass: Eigen picks different product kernels for
// different row counts, and posterior means must not depend on batch mates.
constexpr std::size_t kInferenceChunk = 1;

std::string layer_name(const char* prefix, std::size_t i, const char* what) {
  return std::string(prefix) + "." + std::to_string(i) + "." + what;
}

Tensor glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Tensor w({fan_in, fan_out});
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& x : w.values()) x = limit * (2.0 * uniform01(rng) - 1.0);
  return w;
}

void add_dense(ParamStore& store, const std::string& prefix, std::size_t in, std::size_t out,
               Rng& rng) {
  store.add(prefix + ".weight", glorot(in, out, rng));
  store.add(prefix + ".bias", Tensor({1, out}));
}

const ad::Var& lookup(const BoundParams& params, const std::string& name) {
  auto it = params.find(name);
  if (it == params.end()) throw ValidationError("model parameter " + name + " missing");
  return it->second;
}

ad::Var dense(const BoundParams& params, const std::string& prefix, ad::Var x) {
  return ad::add(ad::matmul(x, lookup(params, prefix + ".weight")),
                 lookup(params, prefix + ".bias"));
}

std::size_t decoder_output_width(const ModelConfig& cfg) {
  return upper_triangle_size(cfg.n_max) + 2 * static_cast<std::size_t>(cfg.n_max);
}

void check_sample(const EncodedSample& x, const ModelConfig& cfg) {
  if (x.n_max != cfg.n_max || x.adj.size() != static_cast<std::size_t>(cfg.n_max) * cfg.n_max ||
      x.mask.size() != static_cast<std::size_t>(cfg.n_max) ||
      x.attrs.size() != static_cast<std::size_t>(cfg.n_max)) {
    throw ShapeError("sample padded to n_max=" + std::to_string(x.n_max) +
                     " does not match model n_max=" + std::to_string(cfg.n_max));
  }
}

void check_latent(const LatentVector& z, const ModelConfig& cfg) {
  if (z.z.size() != static_cast<std::size_t>(cfg.j_latent)) {
    throw ShapeError("latent vector of length " + std::to_string(z.z.size()) +
                     " does not match J=" + std::to_string(cfg.j_latent));
  }
}

}  // namespace

void validate(const ModelConfig& cfg) {
  if (cfg.j_latent < 1) throw ValidationError("j_latent must be >= 1");
  if (cfg.n_max < 2) throw ValidationError("n_max must be >= 2");
  if (cfg.param_dim < 0) throw ValidationError("param_dim must be >= 0");
  if (cfg.gcn_layers.empty()) throw ValidationError("at least one GCN layer is required");
  auto positive = [](const std::vector<int>& widths, const char* what) {
    for (int w : widths) {
      if (w < 1) throw ValidationError(std::string(what) + " widths must be >= 1");
    }
  };
  positive(cfg.gcn_layers, "GCN layer");
  positive(cfg.encoder_dense_layers, "encoder dense layer");
  positive(cfg.dense_decoder_layers, "decoder dense layer");
}

std::size_t upper_triangle_size(int n_max) {
  const auto n = static_cast<std::size_t>(n_max);
  return n * (n - 1) / 2;
}

ParamStore init_params(const ModelConfig& cfg, Seed seed) {
  validate(cfg);
  Rng rng = make_rng(seed);
  ParamStore store;
  const auto n = static_cast<std::size_t>(cfg.n_max);
  const auto j = static_cast<std::size_t>(cfg.j_latent);

  std::size_t width = kNodeFeatures;
  for (std::size_t i = 0; i < cfg.gcn_layers.size(); ++i) {
    const auto out = static_cast<std::size_t>(cfg.gcn_layers[i]);
    store.add(layer_name("enc.gcn", i, "weight"), glorot(width, out, rng));
    store.add(layer_name("enc.gcn", i, "bias"), Tensor({1, 1, out}));
    width = out;
  }
  width *= n;
  for (std::size_t i = 0; i < cfg.encoder_dense_layers.size(); ++i) {
    const auto out = static_cast<std::size_t>(cfg.encoder_dense_layers[i]);
    add_dense(store, "enc.fc." + std::to_string(i), width, out, rng);
    width = out;
  }
  add_dense(store, "enc.out", width, 2 * j, rng);

  width = j;
  for (std::size_t i = 0; i < cfg.dense_decoder_layers.size(); ++i) {
    const auto out = static_cast<std::size_t>(cfg.dense_decoder_layers[i]);
    add_dense(store, "dec.fc." + std::to_string(i), width, out, rng);
    width = out;
  }
  add_dense(store, "dec.out", width, decoder_output_width(cfg), rng);

  if (cfg.param_dim > 0) add_dense(store, "h", j, static_cast<std::size_t>(cfg.param_dim), rng);
  return store;
}

BoundParams bind_trainable(ad::Tape& tape, ParamStore& store) {
  BoundParams out;
  for (auto& [name, p] : store) out.emplace(name, tape.parameter(p));
  return out;
}

BoundParams bind_frozen(ad::Tape& tape, const ParamStore& store) {
  BoundParams out;
  for (const auto& [name, p] : store) out.emplace(name, tape.constant_ref(p.value));
  return out;
}

BatchInputs make_batch_inputs(std::span<const EncodedSample> samples, const ModelConfig& cfg) {
  const auto b = samples.size();
  const auto n = static_cast<std::size_t>(cfg.n_max);
  BatchInputs in{Tensor({b, n, n}), Tensor({b, n, kNodeFeatures}), Tensor({b, n, 1})};
  const double degree_scale = 1.0 / static_cast<double>(n - 1);
  std::vector<double> deg(n);
  for (std::size_t s = 0; s < b; ++s) {
    const EncodedSample& x = samples[s];
    check_sample(x, cfg);
    double* a = in.norm_adj.data() + s * n * n;
    double* f = in.features.data() + s * n * kNodeFeatures;
    for (std::size_t i = 0; i < n; ++i) {
      double row = x.mask[i];  // self loop
      double plain = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        const double e = x.adj[i * n + k] * x.mask[i] * x.mask[k];
        row += e;
        plain += e;
      }
      deg[i] = std::max(row, 1.0);
      f[i * kNodeFeatures + 0] = plain * degree_scale;
      f[i * kNodeFeatures + 1] = cfg.use_attributes ? x.attrs[i] * x.mask[i] : 0.0;
      f[i * kNodeFeatures + 2] = x.mask[i];
      in.node_mask[s * n + i] = x.mask[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        const double e = (i == k ? x.mask[i] : x.adj[i * n + k] * x.mask[i] * x.mask[k]);
        a[i * n + k] = e == 0.0 ? 0.0 : e / std::sqrt(deg[i] * deg[k]);
      }
    }
  }
  return in;
}

EncoderOutput encoder_forward(ad::Tape& tape, const BoundParams& params,
                              const BatchInputs& inputs, const ModelConfig& cfg) {
  const std::size_t b = inputs.features.dim(0);
  const auto n = static_cast<std::size_t>(cfg.n_max);
  const auto j = static_cast<std::size_t>(cfg.j_latent);
  ad::Var adj = tape.constant(inputs.norm_adj);
  ad::Var mask = tape.constant(inputs.node_mask);
  ad::Var h = tape.constant(inputs.features);
  std::size_t width = kNodeFeatures;
  for (std::size_t i = 0; i < cfg.gcn_layers.size(); ++i) {
    const auto out = static_cast<std::size_t>(cfg.gcn_layers[i]);
    ad::Var flat = ad::reshape(h, {b * n, width});
    ad::Var mixed = ad::reshape(ad::matmul(flat, lookup(params, layer_name("enc.gcn", i, "weight"))),
                                {b, n, out});
    ad::Var propagated = ad::add(ad::bmm(adj, mixed), lookup(params, layer_name("enc.gcn", i, "bias")));
    h = ad::mul(ad::tanh(propagated), mask);
    width = out;
  }
  ad::Var x = ad::reshape(h, {b, n * width});
  for (std::size_t i = 0; i < cfg.encoder_dense_layers.size(); ++i) {
    x = ad::tanh(dense(params, "enc.fc." + std::to_string(i), x));
  }
  ad::Var out = dense(params, "enc.out", x);
  return {ad::slice_last(out, 0, j), ad::slice_last(out, j, 2 * j)};
}

ad::Var decoder_forward(ad::Tape&, const BoundParams& params, ad::Var z, const ModelConfig& cfg) {
  ad::Var x = z;
  for (std::size_t i = 0; i < cfg.dense_decoder_layers.size(); ++i) {
    x = ad::tanh(dense(params, "dec.fc." + std::to_string(i), x));
  }
  return ad::sigmoid(dense(params, "dec.out", x));
}

ad::Var param_decoder_forward(ad::Tape&, const BoundParams& params, ad::Var z) {
  return dense(params, "h", z);
}

std::vector<LatentDistribution> encode_many(const ParamStore& weights, const ModelConfig& cfg,
                                            std::span<const EncodedSample> xs) {
  std::vector<LatentDistribution> out;
  out.reserve(xs.size());
  const auto j = static_cast<std::size_t>(cfg.j_latent);
  for (std::size_t start = 0; start < xs.size(); start += kInferenceChunk) {
    const auto chunk = xs.subspan(start, std::min(kInferenceChunk, xs.size() - start));
    ad::Tape tape;
    const BoundParams params = bind_frozen(tape, weights);
    const BatchInputs inputs = make_batch_inputs(chunk, cfg);
    const EncoderOutput enc = encoder_forward(tape, params, inputs, cfg);
    const Tensor& mu = enc.mu.value();
    const Tensor& lv = enc.log_var.value();
    for (std::size_t s = 0; s < chunk.size(); ++s) {
      LatentDistribution d;
      d.mu.assign(mu.data() + s * j, mu.data() + (s + 1) * j);
      d.log_var.assign(lv.data() + s * j, lv.data() + (s + 1) * j);
      out.push_back(std::move(d));
    }
  }
  return out;
}

LatentDistribution encode(const ParamStore& weights, const ModelConfig& cfg,
                          const EncodedSample& x) {
  return encode_many(weights, cfg, std::span<const EncodedSample>(&x, 1)).front();
}

EncodedSample decode(const ParamStore& weights, const ModelConfig& cfg, const LatentVector& z) {
  check_latent(z, cfg);
  ad::Tape tape;
  const BoundParams params = bind_frozen(tape, weights);
  ad::Var zin = tape.constant(Tensor({1, z.z.size()}, z.z));
  const Tensor& probs = decoder_forward(tape, params, zin, cfg).value();

  const auto n = static_cast<std::size_t>(cfg.n_max);
  EncodedSample x(cfg.n_max);
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = i + 1; c < n; ++c, ++k) {
      x.adj[i * n + c] = probs[k];
      x.adj[c * n + i] = probs[k];
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    x.mask[i] = probs[k + i];
    x.attrs[i] = probs[k + n + i];
  }
  return x;
}

std::vector<double> param_decode(const ParamStore& weights, const LatentVector& z) {
  if (!weights.contains("h.weight")) return {};
  const Tensor& w = weights.at("h.weight").value;
  const Tensor& b = weights.at("h.bias").value;
  if (w.dim(0) != z.z.size()) {
    throw ShapeError("latent vector of length " + std::to_string(z.z.size()) +
                     " does not match parameter decoder input " + std::to_string(w.dim(0)));
  }
  const std::size_t k = w.dim(1);
  std::vector<double> out(b.values().begin(), b.values().end());
  for (std::size_t i = 0; i < z.z.size(); ++i) {
    for (std::size_t c = 0; c < k; ++c) out[c] += z.z[i] * w[i * k + c];
  }
  return out;
}

LatentVector reparameterize(const LatentDistribution& dist, Seed seed) {
  Rng rng = make_rng(seed);
  LatentVector out;
  out.z.resize(dist.mu.size());
  for (std::size_t i = 0; i < dist.mu.size(); ++i) {
    out.z[i] = dist.mu[i] + std::exp(0.5 * dist.log_var[i]) * standard_normal(rng);
  }
  return out;
}

std::vector<double> kl_per_dimension(const LatentDistribution& dist) {
  std::vector<double> out(dist.mu.size());
  for (std::size_t i = 0; i < dist.mu.size(); ++i) {
    const double lv = dist.log_var[i];
    out[i] = 0.5 * (dist.mu[i] * dist.mu[i] + std::exp(lv) - 1.0 - lv);
  }
  return out;
}

double kl_divergence(const LatentDistribution& dist) {
  double total = 0.0;
  for (double v : kl_per_dimension(dist)) total += v;
  return total;
}

}  // namespace graphdis
