#include <benchmark/benchmark.h>

#include "graphdis/autodiff.hpp"
#include "graphdis/canonical.hpp"
#include "graphdis/metrics.hpp"
#include "graphdis/model.hpp"
#include "graphdis/training.hpp"

using namespace graphdis;

namespace {

Dataset er(int count, Seed seed) {
  DatasetSpec spec;
  spec.ranges = {{"n", {1, 24}}, {"p", {0, 1}}};
  spec.count = count;
  spec.seed = seed;
  return gen_dataset(spec);
}

Tensor random_tensor(Shape shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (double& v : t.values()) v = standard_normal(rng);
  return t;
}

}  // namespace

static void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng = make_rng(1);
  const Tensor a = random_tensor({n, n}, rng), b = random_tensor({n, n}, rng);
  for (auto _ : state) {
    ad::Tape tape;
    benchmark::DoNotOptimize(ad::matmul(tape.constant(a), tape.constant(b)).value().data());
  }
}
BENCHMARK(BM_Matmul)->Arg(16)->Arg(64)->Arg(256);

static void BM_BosamOrder(benchmark::State& state) {
  const Dataset ds = er(256, 2);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(bosam_order(ds.records[i++ % ds.records.size()].graph));
  }
}
BENCHMARK(BM_BosamOrder);

static void BM_Encode(benchmark::State& state) {
  ModelConfig cfg;
  const ParamStore w = init_params(cfg, 3);
  const Dataset ds = er(256, 3);
  std::vector<EncodedSample> xs;
  for (const auto& r : ds.records) xs.push_back(to_padded(r.graph, cfg.n_max));
  for (auto _ : state) benchmark::DoNotOptimize(encode_many(w, cfg, xs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_Encode)->Unit(benchmark::kMillisecond);

static void BM_TrainStep(benchmark::State& state) {
  TrainConfig cfg;
  cfg.factor_names = {"n", "p"};
  cfg.factor_lo = {1, 0};
  cfg.factor_hi = {24, 1};
  ParamStore w = init_params(cfg.model, 4);
  const Dataset ds = er(cfg.batch_size, 4);
  std::vector<EncodedSample> batch;
  std::vector<std::vector<double>> targets;
  for (const auto& r : ds.records) {
    batch.push_back(to_padded(r.graph, cfg.model.n_max));
    targets.push_back(normalize_factors(factor_values(r.params), cfg.factor_lo, cfg.factor_hi));
  }
  const AdamConfig adam{cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2, cfg.adam_eps};
  Seed step = 0;
  for (auto _ : state) {
    ad::Tape tape;
    const BoundParams params = bind_trainable(tape, w);
    const Tensor noise = draw_noise(batch.size(), static_cast<std::size_t>(cfg.model.j_latent), step++);
    LossGraph g = build_loss(tape, params, batch, targets, cfg, noise);
    tape.backward(g.total);
    adam_step(w, adam);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

static void BM_MutualInformation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng = make_rng(5);
  std::vector<int> a(n), b(n);
  for (std::size_t i = 0; i < n; ++i) {
    a[i] = static_cast<int>(uniform_int(rng, 0, 19));
    b[i] = static_cast<int>(uniform_int(rng, 0, 19));
  }
  for (auto _ : state) benchmark::DoNotOptimize(mutual_information(a, b));
}
BENCHMARK(BM_MutualInformation)->Arg(1000)->Arg(100000);
BENCHMARK_MAIN();
