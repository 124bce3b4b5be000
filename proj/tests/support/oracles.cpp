#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "graphdis/canonical.hpp"
#include "graphdis/graphgen.hpp"
#include "graphdis/model.hpp"
#include "graphdis/training.hpp"

namespace gdtest {

using namespace graphdis;
namespace a = graphdis::ad;

double brute_force_mi(const std::vector<int>& x, const std::vector<int>& y) {
  std::map<std::pair<int, int>, double> joint;
  std::map<int, double> px, py;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    joint[{x[i], y[i]}] += 1.0;
    px[x[i]] += 1.0;
    py[y[i]] += 1.0;
  }
  double mi = 0.0;
  for (const auto& [xv, cx] : px)
    for (const auto& [yv, cy] : py) {
      auto it = joint.find({xv, yv});
      if (it == joint.end()) continue;
      const double pxy = it->second / n;
      mi += pxy * std::log(pxy / ((cx / n) * (cy / n)));
    }
  return mi;
}

double leaf_gradient_error(const GradFn& f, const std::vector<Tensor>& inputs, double eps) {
  std::vector<Tensor> analytic;
  {
    a::Tape tape;
    std::vector<a::Var> vars;
    for (const auto& t : inputs) vars.push_back(tape.variable(t));
    tape.backward(f(tape, vars));
    for (auto v : vars) analytic.push_back(tape.grad(v));
  }
  auto eval = [&](const std::vector<Tensor>& xs) {
    a::Tape tape;
    std::vector<a::Var> vars;
    for (const auto& t : xs) vars.push_back(tape.constant(t));
    return f(tape, vars).value().item();
  };
  double worst = 0.0;
  for (std::size_t i = 0; i < inputs.size(); ++i)
    for (std::size_t k = 0; k < inputs[i].size(); ++k) {
      auto plus = inputs, minus = inputs;
      plus[i][k] += eps;
      minus[i][k] -= eps;
      const double numeric = (eval(plus) - eval(minus)) / (2 * eps);
      const double got = analytic[i].empty() ? 0.0 : analytic[i][k];
      worst = std::max(worst, std::abs(got - numeric) / std::max(1.0, std::abs(numeric)));
    }
  return worst;
}

namespace {

Tensor random_tensor(Shape shape, Rng& rng, double lo, double hi) {
  Tensor t(std::move(shape));
  for (double& x : t.storage()) x = lo + (hi - lo) * uniform01(rng);
  return t;
}

}  // namespace

std::vector<PrimitiveCheck> primitive_gradient_checks(Seed seed) {
  Rng rng = make_rng(seed);
  struct Case {
    const char* name;
    GradFn f;
    std::vector<Shape> shapes;
    double lo = -1.0;
  };
  using V = std::vector<a::Var>;
  const std::vector<Case> cases{
      {"matmul", [](a::Tape&, const V& v) { return a::sum(a::matmul(v[0], v[1])); },
       {{3, 4}, {4, 2}}},
      {"bmm", [](a::Tape&, const V& v) { return a::sum(a::square(a::bmm(v[0], v[1]))); },
       {{2, 3, 4}, {2, 4, 2}}},
      {"add_broadcast",
       [](a::Tape&, const V& v) { return a::sum(a::square(a::add(v[0], v[1]))); },
       {{3, 4}, {1, 4}}},
      {"sub", [](a::Tape&, const V& v) { return a::sum(a::square(a::sub(v[0], v[1]))); },
       {{2, 3}, {2, 3}}},
      {"mul_broadcast", [](a::Tape&, const V& v) { return a::sum(a::mul(v[0], v[1])); },
       {{2, 3, 1}, {2, 3, 4}}},
      {"scale", [](a::Tape&, const V& v) { return a::sum(a::scale(a::square(v[0]), -2.5)); },
       {{5}}},
      {"add_scalar",
       [](a::Tape&, const V& v) { return a::sum(a::square(a::add_scalar(v[0], 0.7))); },
       {{5}}},
      {"square", [](a::Tape&, const V& v) { return a::sum(a::square(v[0])); }, {{5}}},
      {"sigmoid", [](a::Tape&, const V& v) { return a::sum(a::sigmoid(v[0])); }, {{6}}},
      {"tanh", [](a::Tape&, const V& v) { return a::sum(a::tanh(v[0])); }, {{6}}},
      {"exp", [](a::Tape&, const V& v) { return a::sum(a::exp(v[0])); }, {{6}}},
      {"log", [](a::Tape&, const V& v) { return a::sum(a::log(v[0])); }, {{6}}, 0.5},
      {"clamp",
       [](a::Tape&, const V& v) { return a::sum(a::square(a::clamp(v[0], -0.5, 0.5))); },
       {{8}}},
      {"mean", [](a::Tape&, const V& v) { return a::mean(a::square(v[0])); }, {{3, 3}}},
      {"concat",
       [](a::Tape&, const V& v) { return a::sum(a::square(a::concat({v[0], v[1]}))); },
       {{2, 2}, {2, 3}}},
      {"slice_last",
       [](a::Tape&, const V& v) { return a::sum(a::square(a::slice_last(v[0], 1, 3))); },
       {{2, 4}}},
      {"reshape",
       [](a::Tape&, const V& v) {
         return a::sum(a::matmul(a::reshape(v[0], {2, 3}), v[1]));
       },
       {{6}, {3, 2}}},
  };
  std::vector<PrimitiveCheck> out;
  for (const auto& c : cases) {
    std::vector<Tensor> inputs;
    for (const auto& s : c.shapes) inputs.push_back(random_tensor(s, rng, c.lo, 1.0));
    out.push_back({c.name, leaf_gradient_error(c.f, inputs)});
  }
  return out;
}

double full_loss_gradient_error(Seed seed, double eps) {
  TrainConfig cfg;
  cfg.beta = 5.0;
  cfg.lambda_param = 1.0;
  cfg.model.n_max = 4;
  cfg.model.j_latent = 3;
  cfg.model.gcn_layers = {5, 4};
  cfg.model.encoder_dense_layers = {6};
  cfg.model.dense_decoder_layers = {7, 9};
  cfg.model.param_dim = 2;
  cfg.model.use_attributes = true;

  std::vector<EncodedSample> batch;
  std::vector<std::vector<double>> targets;
  for (int i = 0; i < 2; ++i) {
    const int n = 4 - i;
    Graph g = assign_uniform_attribute(gen_graph(ErParams{n, 0.6}, derive_seed(seed, i)),
                                       derive_seed(seed, i, 1));
    g = randomize_attributes(g, 0.5, derive_seed(seed, i, 2));
    batch.push_back(to_padded(g, 4));
    targets.push_back({0.25 * n, 0.6});
  }
  ParamStore weights = init_params(cfg.model, derive_seed(seed, 7));
  const Seed noise_seed = derive_seed(seed, 8);

  {
    a::Tape tape;
    const BoundParams params = bind_trainable(tape, weights);
    const Tensor noise = draw_noise(batch.size(), cfg.model.j_latent, noise_seed);
    const LossGraph g = build_loss(tape, params, batch, targets, cfg, noise);
    tape.backward(g.total);
  }
  double worst = 0.0;
  for (auto& [name, p] : weights) {
    for (std::size_t k = 0; k < p.value.size(); ++k) {
      const double keep = p.value[k];
      p.value[k] = keep + eps;
      const double up = compute_loss(weights, batch, targets, cfg, noise_seed).total;
      p.value[k] = keep - eps;
      const double down = compute_loss(weights, batch, targets, cfg, noise_seed).total;
      p.value[k] = keep;
      const double numeric = (up - down) / (2 * eps);
      const double analytic = p.grad[k];
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace gdtest
