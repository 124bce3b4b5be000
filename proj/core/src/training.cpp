#include "graphdis/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "graphdis/error.hpp"

namespace graphdis {

namespace {

enum SeedStream : std::uint64_t { kInitStream = 1, kShuffleStream = 2, kNoiseStream = 3 };

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Constant per-sample weights for the masked loss terms.
struct TargetTensors {
  Tensor adj;         // [B, T] upper-triangle targets
  Tensor pair_mask;   // [B, T] 1 where both nodes exist
  Tensor node_mask;   // [B, N]
  Tensor attrs;       // [B, N]
};

TargetTensors make_targets(std::span<const EncodedSample> batch, const ModelConfig& cfg) {
  const std::size_t b = batch.size();
  const auto n = static_cast<std::size_t>(cfg.n_max);
  const std::size_t t = upper_triangle_size(cfg.n_max);
  TargetTensors out{Tensor({b, t}), Tensor({b, t}), Tensor({b, n}), Tensor({b, n})};
  for (std::size_t s = 0; s < b; ++s) {
    const EncodedSample& x = batch[s];
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = i + 1; c < n; ++c, ++k) {
        out.adj[s * t + k] = x.adj[i * n + c];
        out.pair_mask[s * t + k] = x.mask[i] * x.mask[c];
      }
      out.node_mask[s * n + i] = x.mask[i];
      out.attrs[s * n + i] = x.attrs[i];
    }
  }
  return out;
}

// Sum over entries of weight * BCE(pred, target).
ad::Var masked_bce_sum(ad::Tape& tape, ad::Var pred, const Tensor& target, const Tensor& weight) {
  ad::Var p = ad::clamp(pred, kProbClamp, 1.0 - kProbClamp);
  Tensor pos(target.shape()), neg(target.shape());
  for (std::size_t i = 0; i < target.size(); ++i) {
    pos[i] = -weight[i] * target[i];
    neg[i] = -weight[i] * (1.0 - target[i]);
  }
  ad::Var log_p = ad::log(p);
  ad::Var log_q = ad::log(ad::add_scalar(ad::scale(p, -1.0), 1.0));
  return ad::add(ad::sum(ad::mul(log_p, tape.constant(std::move(pos)))),
                 ad::sum(ad::mul(log_q, tape.constant(std::move(neg)))));
}

}  // namespace

void validate(const TrainConfig& cfg) {
  validate(cfg.model);
  if (cfg.batch_size < 1) throw ValidationError("batch_size must be >= 1");
  if (cfg.epochs < 0) throw ValidationError("epochs must be >= 0");
  if (!(cfg.beta >= 0.0)) throw ValidationError("beta must be >= 0");
  if (!(cfg.lambda_param >= 0.0)) throw ValidationError("lambda_param must be >= 0");
  if (!(cfg.attr_weight >= 0.0)) throw ValidationError("attr_weight must be >= 0");
  if (!(cfg.learning_rate > 0.0)) throw ValidationError("learning_rate must be > 0");
  if (cfg.factor_lo.size() != cfg.factor_hi.size()) {
    throw ValidationError("factor_lo and factor_hi lengths differ");
  }
}

Tensor draw_noise(std::size_t batch, std::size_t j_latent, Seed seed) {
  Rng rng = make_rng(seed);
  Tensor eps({batch, j_latent});
  for (double& e : eps.values()) e = standard_normal(rng);
  return eps;
}

LossGraph build_loss(ad::Tape& tape, const BoundParams& params,
                     std::span<const EncodedSample> batch,
                     std::span<const std::vector<double>> factor_targets,
                     const TrainConfig& cfg, const Tensor& noise) {
  if (batch.empty()) throw ValidationError("loss requires a non-empty batch");
  const ModelConfig& mc = cfg.model;
  const std::size_t b = batch.size();
  const auto n = static_cast<std::size_t>(mc.n_max);
  const std::size_t t = upper_triangle_size(mc.n_max);
  const auto j = static_cast<std::size_t>(mc.j_latent);
  const double inv_b = 1.0 / static_cast<double>(b);
  if (noise.shape() != Shape{b, j}) {
    throw ShapeError("noise shape " + shape_string(noise.shape()) + " does not match " +
                     shape_string({b, j}));
  }

  const BatchInputs inputs = make_batch_inputs(batch, mc);
  const EncoderOutput enc = encoder_forward(tape, params, inputs, mc);
  ad::Var sigma = ad::exp(ad::scale(enc.log_var, 0.5));
  ad::Var z = ad::add(enc.mu, ad::mul(sigma, tape.constant(noise)));
  ad::Var out = decoder_forward(tape, params, z, mc);

  const TargetTensors target = make_targets(batch, mc);
  ad::Var recon = masked_bce_sum(tape, ad::slice_last(out, 0, t), target.adj, target.pair_mask);
  Tensor ones({b, n}, 1.0);
  recon = ad::add(recon, masked_bce_sum(tape, ad::slice_last(out, t, t + n), target.node_mask, ones));
  if (mc.use_attributes) {
    ad::Var diff = ad::sub(ad::slice_last(out, t + n, t + 2 * n), tape.constant(target.attrs));
    recon = ad::add(recon, ad::scale(ad::sum(ad::mul(ad::square(diff), tape.constant(target.node_mask))),
                                     cfg.attr_weight));
  }
  recon = ad::scale(recon, inv_b);

  ad::Var kl_terms = ad::sub(ad::add(ad::square(enc.mu), ad::exp(enc.log_var)),
                             ad::add_scalar(enc.log_var, 1.0));
  ad::Var kl = ad::scale(ad::sum(kl_terms), 0.5 * inv_b);

  ad::Var param_loss = tape.constant(Tensor::scalar(0.0));
  if (mc.param_dim > 0) {
    const auto k = static_cast<std::size_t>(mc.param_dim);
    if (factor_targets.size() != b) {
      throw ShapeError("expected " + std::to_string(b) + " factor targets, got " +
                       std::to_string(factor_targets.size()));
    }
    Tensor v({b, k});
    for (std::size_t s = 0; s < b; ++s) {
      if (factor_targets[s].size() != k) {
        throw ShapeError("factor target of length " + std::to_string(factor_targets[s].size()) +
                         " does not match param_dim=" + std::to_string(k));
      }
      std::copy(factor_targets[s].begin(), factor_targets[s].end(), v.data() + s * k);
    }
    ad::Var v_hat = param_decoder_forward(tape, params, z);
    param_loss = ad::mean(ad::square(ad::sub(v_hat, tape.constant(std::move(v)))));
  }

  ad::Var total = ad::add(ad::add(recon, ad::scale(kl, cfg.beta)),
                          ad::scale(param_loss, cfg.lambda_param));
  return {total, recon, kl, param_loss, enc.mu, enc.log_var};
}

namespace {

LossValues read_values(const LossGraph& g, std::size_t b, std::size_t j) {
  LossValues out;
  out.total = g.total.value().item();
  out.recon = g.recon.value().item();
  out.kl = g.kl.value().item();
  out.param_loss = g.param_loss.value().item();
  out.kl_per_dim.assign(j, 0.0);
  const Tensor& mu = g.mu.value();
  const Tensor& lv = g.log_var.value();
  for (std::size_t s = 0; s < b; ++s) {
    for (std::size_t d = 0; d < j; ++d) {
      const double m = mu[s * j + d];
      const double l = lv[s * j + d];
      out.kl_per_dim[d] += 0.5 * (m * m + std::exp(l) - 1.0 - l);
    }
  }
  for (double& v : out.kl_per_dim) v /= static_cast<double>(b);
  return out;
}

}  // namespace

LossValues compute_loss(const ParamStore& weights, std::span<const EncodedSample> batch,
                        std::span<const std::vector<double>> factor_targets,
                        const TrainConfig& cfg, Seed seed) {
  if (batch.empty()) throw ValidationError("loss requires a non-empty batch");
  ad::Tape tape;
  const BoundParams params = bind_frozen(tape, weights);
  const auto j = static_cast<std::size_t>(cfg.model.j_latent);
  const Tensor noise = draw_noise(batch.size(), j, seed);
  const LossGraph g = build_loss(tape, params, batch, factor_targets, cfg, noise);
  return read_values(g, batch.size(), j);
}

std::vector<double> normalize_factors(const std::vector<double>& values,
                                      const std::vector<double>& lo,
                                      const std::vector<double>& hi) {
  if (values.size() != lo.size() || values.size() != hi.size()) {
    throw ShapeError("factor vector length does not match normalization ranges");
  }
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double span = hi[i] - lo[i];
    out[i] = span > 0.0 ? (values[i] - lo[i]) / span : 0.0;
  }
  return out;
}

std::string TrainHistory::to_csv() const {
  std::ostringstream os;
  const std::size_t j = epochs.empty() ? 0 : epochs.front().kl_per_dim.size();
  os << "epoch,recon,kl";
  for (std::size_t d = 0; d < j; ++d) os << ",kl_dim_" << d;
  os << ",param_loss,total\n";
  for (const auto& e : epochs) {
    os << e.epoch << ',' << fmt(e.recon) << ',' << fmt(e.kl);
    for (double v : e.kl_per_dim) os << ',' << fmt(v);
    os << ',' << fmt(e.param_loss) << ',' << fmt(e.total) << '\n';
  }
  return os.str();
}

void resolve_factor_metadata(const Dataset& dataset, TrainConfig& cfg) {
  if (dataset.records.empty()) throw ValidationError("dataset is empty");
  const Family family = family_of(dataset.records.front().params);
  for (const auto& r : dataset.records) {
    if (family_of(r.params) != family) {
      throw ValidationError("dataset mixes generator families");
    }
  }
  cfg.family = std::string(family_name(family));
  cfg.factor_names = factor_names(family);
  cfg.model.param_dim = static_cast<int>(cfg.factor_names.size());
  if (cfg.factor_lo.empty()) {
    const std::size_t k = cfg.factor_names.size();
    cfg.factor_lo.assign(k, 0.0);
    cfg.factor_hi.assign(k, 0.0);
    bool first = true;
    for (const auto& r : dataset.records) {
      const auto v = factor_values(r.params);
      for (std::size_t i = 0; i < k; ++i) {
        cfg.factor_lo[i] = first ? v[i] : std::min(cfg.factor_lo[i], v[i]);
        cfg.factor_hi[i] = first ? v[i] : std::max(cfg.factor_hi[i], v[i]);
      }
      first = false;
    }
  }
  if (cfg.factor_lo.size() != cfg.factor_names.size()) {
    throw ValidationError("normalization ranges do not match the family's factor count");
  }
}

TrainResult train(const Dataset& dataset, TrainConfig cfg, const EpochCallback& on_epoch) {
  resolve_factor_metadata(dataset, cfg);
  validate(cfg);

  std::vector<EncodedSample> samples;
  std::vector<std::vector<double>> targets;
  samples.reserve(dataset.records.size());
  for (const auto& r : dataset.records) {
    samples.push_back(to_padded(r.graph, cfg.model.n_max));
    targets.push_back(normalize_factors(factor_values(r.params), cfg.factor_lo, cfg.factor_hi));
  }

  TrainResult result{init_params(cfg.model, derive_seed(cfg.seed, kInitStream)), {}, cfg};
  ParamStore& weights = result.weights;
  const AdamConfig adam{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  const auto j = static_cast<std::size_t>(cfg.model.j_latent);
  const std::size_t count = samples.size();
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);

  std::vector<std::size_t> order(count);
  std::iota(order.begin(), order.end(), 0);
  std::vector<EncodedSample> batch;
  std::vector<std::vector<double>> batch_targets;
  std::uint64_t step = 0;

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng = make_rng(derive_seed(cfg.seed, kShuffleStream, static_cast<std::uint64_t>(epoch)));
    for (std::size_t i = count; i > 1; --i) {
      const auto k = static_cast<std::size_t>(uniform_int(shuffle_rng, 0, static_cast<std::int64_t>(i) - 1));
      std::swap(order[i - 1], order[k]);
    }

    EpochRecord rec;
    rec.epoch = epoch;
    rec.kl_per_dim.assign(j, 0.0);
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < count; start += batch_size, ++batch_index, ++step) {
      const std::size_t end = std::min(count, start + batch_size);
      batch.clear();
      batch_targets.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(samples[order[i]]);
        batch_targets.push_back(targets[order[i]]);
      }
      const double share = static_cast<double>(end - start);
      try {
        ad::Tape tape;
        const BoundParams params = bind_trainable(tape, weights);
        const Tensor noise = draw_noise(batch.size(), j, derive_seed(cfg.seed, kNoiseStream, step));
        const LossGraph g = build_loss(tape, params, batch, batch_targets, cfg, noise);
        const LossValues v = read_values(g, batch.size(), j);
        tape.backward(g.total);
        adam_step(weights, adam);
        rec.recon += v.recon * share;
        rec.kl += v.kl * share;
        rec.param_loss += v.param_loss * share;
        rec.total += v.total * share;
        for (std::size_t d = 0; d < j; ++d) rec.kl_per_dim[d] += v.kl_per_dim[d] * share;
      } catch (const NumericError& e) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                           std::to_string(batch_index) + ": " + e.what());
      }
    }
    const double inv = 1.0 / static_cast<double>(count);
    rec.recon *= inv;
    rec.kl *= inv;
    rec.param_loss *= inv;
    rec.total *= inv;
    for (double& v : rec.kl_per_dim) v *= inv;
    result.history.epochs.push_back(rec);
    if (on_epoch) on_epoch(rec);
  }
  return result;
}

}  // namespace graphdis
