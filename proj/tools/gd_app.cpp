#include "gd_app.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "graphdis/canonical.hpp"
#include "graphdis/checkpoint.hpp"
#include "graphdis/dataset_io.hpp"
#include "graphdis/error.hpp"
#include "graphdis/experiments.hpp"
#include "graphdis/graphgen.hpp"
#include "graphdis/metrics.hpp"
#include "graphdis/sampler.hpp"
#include "graphdis/training.hpp"

#ifndef GD_VERSION
#define GD_VERSION "0.0.0"
#endif

namespace gdcli {

namespace fs = std::filesystem;
namespace gd = graphdis;
using Json = nlohmann::ordered_json;

namespace {

// KL thresholds (nats) for counting used and unused latents in mig output.
constexpr double kActiveKl = 0.1;
constexpr double kInactiveKl = 0.05;

struct Options {
  std::optional<gd::Seed> seed;
  int threads = 1;
  std::string out;

  // gen
  std::string family = "er";
  std::string n_range, p_range = "0:1", m_range = "1:3", k_range = "2:6",
                       p_rewire_range = "0:1", depth_range = "1:4";
  int count = 100;
  bool attributes = false;

  // train
  std::string data;
  double beta = 5.0;
  double lambda = 1.0;
  double attr_weight = 1.0;
  int latent = 4;
  int epochs = 200;
  int batch_size = 64;
  double lr = 1e-3;
  int n_max = gd::kDefaultNMax;
  bool use_attributes = false;
  bool progress = false;

  // traverse
  std::string ckpt;
  int axis = 0;
  std::string range = "-2:2";
  int steps = 5;
  int axis2 = -1;
  std::string range2 = "-2:2";
  int steps2 = 5;
  std::vector<double> base;
  double threshold = 0.5;

  // mig / encode / randomize
  int bins = gd::kDefaultBins;
  bool no_noise_floor = false;
  std::vector<double> grid = gd::default_omega_grid();
  int repeats = 5;

  // sample / stats
  std::string graph;
  std::string samples;
  int walk_length = 40;
  double p_return = 1.0;
  double q_inout = 1.0;
  int max_nodes = gd::kDefaultNMax;
};

struct App {
  CLI::App app{"Graph beta-VAE toolkit", "gd"};
  Options o;
  std::map<std::string, CLI::App*> subs;
};

std::optional<gd::Seed> env_seed() {
  const char* s = std::getenv("GD_SEED");
  if (!s || !*s) return std::nullopt;
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(s, &pos);
    if (pos != std::string(s).size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw gd::ValidationError(std::string("GD_SEED is not an unsigned integer: ") + s);
  }
}

void add_seed(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "Random seed (default: $GD_SEED, else 0)");
}

void add_threads(CLI::App* sub, Options& o) {
  sub->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
}

std::unique_ptr<App> build() {
  auto a = std::make_unique<App>();
  auto& app = a->app;
  auto& o = a->o;
  app.set_version_flag("--version", GD_VERSION);
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default();

  auto* gen = app.add_subcommand("gen", "Generate a synthetic graph dataset (JSONL)");
  gen->add_option("--family", o.family, "er | ba | sw | tree");
  gen->add_option("--n", o.n_range, "Node count range lo:hi (default 1:24 er, 4:24 ba, 7:24 sw)");
  gen->add_option("--p", o.p_range, "ER edge probability range");
  gen->add_option("--m", o.m_range, "BA edges per new node range");
  gen->add_option("--k", o.k_range, "SW lattice degree range (even values)");
  gen->add_option("--p-rewire", o.p_rewire_range, "SW rewiring probability range");
  gen->add_option("--depth", o.depth_range, "Binary tree depth range");
  gen->add_option("--count", o.count, "Number of graphs")->check(CLI::PositiveNumber);
  gen->add_flag("--attributes", o.attributes, "Attach one uniform attribute per graph");
  add_seed(gen, o);
  add_threads(gen, o);
  gen->add_option("--out", o.out, "Output JSONL file")->required();
  a->subs["gen"] = gen;

  auto* train = app.add_subcommand("train", "Train the beta-VAE; writes a run directory");
  train->add_option("--data", o.data, "Training dataset (JSONL)")->required();
  train->add_option("--beta", o.beta, "KL weight");
  train->add_option("--lambda", o.lambda, "Parameter-decoder loss weight");
  train->add_option("--attr-weight", o.attr_weight, "Attribute reconstruction loss weight");
  train->add_option("--latent", o.latent, "Latent dimensions J");
  train->add_option("--epochs", o.epochs, "Training epochs");
  train->add_option("--batch-size", o.batch_size, "Mini-batch size");
  train->add_option("--lr", o.lr, "Adam learning rate");
  train->add_option("--n-max", o.n_max, "Padded graph size");
  train->add_flag("--use-attributes", o.use_attributes, "Feed and reconstruct node attributes");
  train->add_flag("--progress", o.progress, "Print one line per epoch to stderr");
  add_seed(train, o);
  train->add_option("--out", o.out, "Output directory")->required();
  a->subs["train"] = train;

  auto* trav = app.add_subcommand("traverse", "Decode an axis-aligned latent walk or grid");
  trav->add_option("--ckpt", o.ckpt, "Run directory or checkpoint file")->required();
  trav->add_option("--axis", o.axis, "Latent axis");
  trav->add_option("--range", o.range, "Axis range lo:hi");
  trav->add_option("--steps", o.steps, "Points along the axis");
  trav->add_option("--axis2", o.axis2, "Second axis for a grid (-1 for none)");
  trav->add_option("--range2", o.range2, "Second axis range lo:hi");
  trav->add_option("--steps2", o.steps2, "Points along the second axis");
  trav->add_option("--base", o.base, "Base latent vector (comma separated; default zeros)")
      ->delimiter(',');
  trav->add_option("--threshold", o.threshold, "Decode threshold");
  trav->add_option("--out", o.out, "Output directory")->required();
  a->subs["traverse"] = trav;

  auto* enc = app.add_subcommand("encode", "Write posterior means and factors as CSV");
  enc->add_option("--ckpt", o.ckpt, "Run directory or checkpoint file")->required();
  enc->add_option("--data", o.data, "Dataset (JSONL)")->required();
  add_threads(enc, o);
  enc->add_option("--out", o.out, "Output CSV file")->required();
  a->subs["encode"] = enc;

  auto* mg = app.add_subcommand("mig", "Score disentanglement (MIG) on a dataset");
  mg->add_option("--ckpt", o.ckpt, "Run directory or checkpoint file")->required();
  mg->add_option("--data", o.data, "Evaluation dataset (JSONL)")->required();
  mg->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  mg->add_flag("--no-noise-floor", o.no_noise_floor,
               "Bin latents down to min/max range only, ignoring posterior width");
  add_threads(mg, o);
  mg->add_option("--out", o.out, "Output JSON file")->required();
  a->subs["mig"] = mg;

  auto* rnd = app.add_subcommand("randomize", "Attribute randomization sweep");
  rnd->add_option("--ckpt", o.ckpt, "Run directory or checkpoint file")->required();
  rnd->add_option("--data", o.data, "Dataset with attributes (JSONL)")->required();
  rnd->add_option("--grid", o.grid, "Randomization levels (comma separated)")->delimiter(',');
  rnd->add_option("--repeats", o.repeats, "Repeats per graph and level");
  rnd->add_option("--bins", o.bins, "Histogram bins")->check(CLI::PositiveNumber);
  rnd->add_flag("--no-noise-floor", o.no_noise_floor,
                "Bin shifts down to min/max range only, ignoring posterior width");
  add_seed(rnd, o);
  add_threads(rnd, o);
  rnd->add_option("--out", o.out, "Output directory")->required();
  a->subs["randomize"] = rnd;

  auto* smp = app.add_subcommand("sample", "Random-walk subgraph samples from an edge list");
  smp->add_option("--graph", o.graph, "Edge list file")->required();
  smp->add_option("--walk-length", o.walk_length, "Maximum walk steps");
  smp->add_option("--p-return", o.p_return, "Return parameter p");
  smp->add_option("--q-inout", o.q_inout, "In-out parameter q");
  smp->add_option("--max-nodes", o.max_nodes, "Distinct nodes per sample");
  smp->add_option("--count", o.count, "Number of samples")->check(CLI::PositiveNumber);
  add_seed(smp, o);
  smp->add_option("--out", o.out, "Output JSONL file")->required();
  a->subs["sample"] = smp;

  auto* st = app.add_subcommand("stats", "Graph statistics, optionally against samples");
  st->add_option("--graph", o.graph, "Edge list file")->required();
  st->add_option("--samples", o.samples, "Sample dataset (JSONL) to compare");
  st->add_option("--out", o.out, "Output JSON file")->required();
  a->subs["stats"] = st;
  return a;
}

gd::ParamRange parse_range(const std::string& flag, const std::string& text) {
  auto to_double = [&](const std::string& s) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      pos = std::string::npos;
    }
    if (pos != s.size()) throw gd::ValidationError(flag + ": bad number '" + s + "'");
    return v;
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    const double v = to_double(text);
    return {v, v};
  }
  gd::ParamRange r{to_double(text.substr(0, colon)), to_double(text.substr(colon + 1))};
  if (r.lo > r.hi) throw gd::ValidationError(flag + ": lo must not exceed hi");
  return r;
}

std::string iso_time(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct Run {
  std::string command;
  CLI::App* sub = nullptr;
  Json config = Json::object();
  Json seeds = Json::object();
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::chrono::system_clock::time_point started = std::chrono::system_clock::now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void write_manifest(const fs::path& path) const {
    Json js;
    js["command"] = command;
    js["tool_version"] = GD_VERSION;
    Json flags = Json::object();
    for (const CLI::Option* opt : sub->get_options()) {
      if (opt->get_lnames().empty() || opt->get_lnames()[0] == "help") continue;
      const std::string name = "--" + opt->get_lnames()[0];
      if (opt->count() > 0) {
        const auto& res = opt->results();
        flags[name] = opt->get_type_size() == 0 ? Json(true) : Json(CLI::detail::join(res, ","));
      } else if (opt->get_type_size() == 0) {
        flags[name] = false;
      } else {
        flags[name] = opt->get_default_str();
      }
    }
    js["flags"] = flags;
    js["config"] = config;
    js["seeds"] = seeds;
    js["inputs"] = inputs;
    js["outputs"] = outputs;
    js["started_at"] = iso_time(started);
    js["duration_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    gd::write_file_atomic(path, js.dump(2) + "\n");
  }
};

gd::Seed resolve_seed(const Options& o) {
  if (o.seed) return *o.seed;
  if (auto s = env_seed()) return *s;
  return 0;
}

fs::path checkpoint_path(const std::string& p) {
  fs::path path(p);
  if (fs::is_directory(path)) return path / "checkpoint.bin";
  return path;
}

fs::path file_manifest(const std::string& out) { return fs::path(out + ".manifest.json"); }

int cmd_gen(const Options& o, Run& run, std::ostream& out) {
  const gd::Family fam = gd::parse_family(o.family);
  gd::DatasetSpec spec;
  spec.family = fam;
  spec.count = o.count;
  spec.attributes = o.attributes;
  spec.seed = resolve_seed(o);
  const std::map<std::string, std::pair<std::string, std::string>> flags{
      {"p", {"--p", o.p_range}},         {"m", {"--m", o.m_range}},
      {"k", {"--k", o.k_range}},         {"p_rewire", {"--p-rewire", o.p_rewire_range}},
      {"depth", {"--depth", o.depth_range}}};
  const auto names = gd::factor_names(fam);
  for (const auto& name : names) {
    if (name == "n") {
      std::string text = o.n_range;
      if (text.empty()) text = fam == gd::Family::kBA ? "4:24" : fam == gd::Family::kSW ? "7:24" : "1:24";
      spec.ranges["n"] = parse_range("--n", text);
    } else {
      const auto& [flag, text] = flags.at(name);
      spec.ranges[name] = parse_range(flag, text);
    }
  }
  for (const auto& [name, ft] : flags) {
    if (std::find(names.begin(), names.end(), name) != names.end()) continue;
    if (run.sub->get_option(ft.first)->count() > 0)
      throw gd::ValidationError(ft.first + " does not apply to family " + o.family);
  }
  if (!o.n_range.empty() && std::find(names.begin(), names.end(), "n") == names.end())
    throw gd::ValidationError("--n does not apply to family " + o.family);

  const gd::Dataset ds = gd::gen_dataset(spec, o.threads);
  gd::write_jsonl(ds, o.out);
  for (const auto& [name, r] : spec.ranges) run.config["ranges"][name] = {r.lo, r.hi};
  run.config["family"] = gd::family_name(fam);
  run.config["count"] = spec.count;
  run.config["attributes"] = spec.attributes;
  run.seeds["dataset"] = spec.seed;
  run.outputs = {o.out};
  run.write_manifest(file_manifest(o.out));
  out << "wrote " << ds.records.size() << " graphs to " << o.out << "\n";
  return 0;
}

int cmd_train(const Options& o, Run& run, std::ostream& out, std::ostream& err) {
  const gd::Dataset ds = gd::read_jsonl(o.data);
  gd::TrainConfig cfg;
  cfg.beta = o.beta;
  cfg.lambda_param = o.lambda;
  cfg.attr_weight = o.attr_weight;
  cfg.epochs = o.epochs;
  cfg.batch_size = o.batch_size;
  cfg.learning_rate = o.lr;
  cfg.seed = resolve_seed(o);
  cfg.model.j_latent = o.latent;
  cfg.model.n_max = o.n_max;
  cfg.model.use_attributes = o.use_attributes;
  gd::EpochCallback cb;
  if (o.progress) {
    cb = [&err](const gd::EpochRecord& r) {
      err << "epoch " << r.epoch << " total " << r.total << " recon " << r.recon << " kl "
          << r.kl << " param " << r.param_loss << "\n";
    };
  }
  const gd::TrainResult res = gd::train(ds, cfg, cb);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  gd::save_checkpoint(res.weights, res.config, dir / "checkpoint.bin");
  gd::write_file_atomic(dir / "history.csv", res.history.to_csv());
  run.config = gd::config_to_json(res.config);
  run.seeds["train"] = cfg.seed;
  run.inputs = {o.data};
  run.outputs = {(dir / "checkpoint.bin").string(), (dir / "history.csv").string()};
  run.write_manifest(dir / "manifest.json");
  out << "trained " << cfg.epochs << " epochs on " << ds.records.size() << " graphs into "
      << o.out << "\n";
  return 0;
}

int cmd_traverse(const Options& o, Run& run, std::ostream& out) {
  const gd::Checkpoint ck = gd::load_checkpoint(checkpoint_path(o.ckpt));
  gd::TraversalSpec rows;
  rows.axis = o.axis;
  const auto r1 = parse_range("--range", o.range);
  rows.lo = r1.lo;
  rows.hi = r1.hi;
  rows.steps = o.steps;
  rows.base_z = o.base;
  rows.threshold = o.threshold;
  std::vector<std::vector<gd::TraversalCell>> grid;
  if (o.axis2 < 0) {
    grid.push_back(gd::traverse(ck.weights, ck.config.model, rows));
  } else {
    gd::TraversalSpec cols = rows;
    cols.axis = o.axis2;
    const auto r2 = parse_range("--range2", o.range2);
    cols.lo = r2.lo;
    cols.hi = r2.hi;
    cols.steps = o.steps2;
    grid = gd::traverse_grid(ck.weights, ck.config.model, rows, cols);
  }
  const fs::path dir(o.out);
  gd::export_traversal(grid, dir);
  run.inputs = {checkpoint_path(o.ckpt).string()};
  run.outputs = {(dir / "traversal.csv").string(), (dir / "contact_sheet.svg").string()};
  run.write_manifest(dir / "manifest.json");
  out << "decoded " << grid.size() * (grid.empty() ? 0 : grid[0].size()) << " cells into "
      << o.out << "\n";
  return 0;
}

gd::SweepOptions sweep_options(const Options& o) {
  gd::SweepOptions so;
  so.bins = o.bins;
  so.noise_floor = !o.no_noise_floor;
  so.threads = o.threads;
  return so;
}

int cmd_encode(const Options& o, Run& run, std::ostream& out) {
  const gd::Checkpoint ck = gd::load_checkpoint(checkpoint_path(o.ckpt));
  const gd::Dataset ds = gd::read_jsonl(o.data);
  auto so = sweep_options(o);
  so.compute_mig = false;
  const gd::SweepResult res = gd::encode_sweep(ck.weights, ck.config, ds, so);
  gd::write_file_atomic(o.out, res.to_csv());
  run.inputs = {checkpoint_path(o.ckpt).string(), o.data};
  run.outputs = {o.out};
  run.write_manifest(file_manifest(o.out));
  out << "encoded " << ds.records.size() << " graphs to " << o.out << "\n";
  return 0;
}

int cmd_mig(const Options& o, Run& run, std::ostream& out) {
  const gd::Checkpoint ck = gd::load_checkpoint(checkpoint_path(o.ckpt));
  const gd::Dataset ds = gd::read_jsonl(o.data);
  const gd::SweepResult res = gd::encode_sweep(ck.weights, ck.config, ds, sweep_options(o));
  if (!res.mig) throw gd::ValidationError("dataset family has no generative factors");
  const gd::MigReport& rep = *res.mig;
  Json js = rep.to_json();
  js["bins"] = o.bins;
  js["noise_floor"] = !o.no_noise_floor;
  js["records"] = ds.records.size();
  js["posterior_sigma"] = res.posterior_sigma;
  js["kl_per_dim"] = res.kl_per_dim;
  js["active_latents"] = res.active_latents(kActiveKl);
  js["inactive_latents"] = std::count_if(res.kl_per_dim.begin(), res.kl_per_dim.end(),
                                         [](double k) { return k < kInactiveKl; });
  std::vector<int> tops;
  for (std::size_t k = 0; k < rep.j_max.size(); ++k)
    if (!rep.excluded[k]) tops.push_back(rep.j_max[k]);
  auto sorted = tops;
  std::sort(sorted.begin(), sorted.end());
  js["distinct_top_latents"] = std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
  js["top_latents"] = tops;
  gd::write_file_atomic(o.out, js.dump(2) + "\n");
  const fs::path csv = fs::path(o.out).replace_extension(".mi.csv");
  gd::write_file_atomic(csv, rep.mi_csv());
  run.inputs = {checkpoint_path(o.ckpt).string(), o.data};
  run.outputs = {o.out, csv.string()};
  run.write_manifest(file_manifest(o.out));
  out << "MIG " << rep.score << "\n";
  return 0;
}

int cmd_randomize(const Options& o, Run& run, std::ostream& out) {
  const gd::Checkpoint ck = gd::load_checkpoint(checkpoint_path(o.ckpt));
  const gd::Dataset ds = gd::read_jsonl(o.data);
  const gd::Seed seed = resolve_seed(o);
  const gd::RandomizationResult res = gd::randomization_sweep(ck.weights, ck.config, ds, o.grid,
                                                              o.repeats, seed, sweep_options(o));
  double max_zero = 0.0;
  for (std::size_t i = 0; i < res.delta_omega.size(); ++i)
    if (res.delta_omega[i] == 0.0)
      for (double d : res.delta_z_abs[i]) max_zero = std::max(max_zero, d);
  Json js = res.to_json();
  js["grid"] = o.grid;
  js["repeats"] = o.repeats;
  js["max_dz_at_zero"] = max_zero;
  const fs::path dir(o.out);
  fs::create_directories(dir);
  gd::write_file_atomic(dir / "randomization.json", js.dump(2) + "\n");
  gd::write_file_atomic(dir / "randomization.csv", res.to_csv());
  run.seeds["randomize"] = seed;
  run.inputs = {checkpoint_path(o.ckpt).string(), o.data};
  run.outputs = {(dir / "randomization.json").string(), (dir / "randomization.csv").string()};
  run.write_manifest(dir / "manifest.json");
  out << "MIG_attr " << res.attr_mig.score << " j_max " << res.attr_mig.j_max << "\n";
  return 0;
}

int cmd_sample(const Options& o, Run& run, std::ostream& out) {
  const gd::EdgeListLoad load = gd::load_edge_list(o.graph);
  gd::WalkConfig wc;
  wc.walk_length = o.walk_length;
  wc.p_return = o.p_return;
  wc.q_inout = o.q_inout;
  wc.max_nodes = o.max_nodes;
  gd::validate(wc);
  const gd::Seed seed = resolve_seed(o);
  gd::Dataset ds;
  for (int i = 0; i < o.count; ++i) {
    ds.records.push_back({gd::rw_sample(load.graph, wc, gd::derive_seed(seed, i)),
                          gd::ObservedParams{}});
    ds.n_max = std::max(ds.n_max, ds.records.back().graph.num_nodes());
  }
  gd::write_jsonl(ds, o.out);
  run.config["self_loops_dropped"] = load.self_loops_dropped;
  run.config["duplicates_dropped"] = load.duplicates_dropped;
  run.seeds["sample"] = seed;
  run.inputs = {o.graph};
  run.outputs = {o.out};
  run.write_manifest(file_manifest(o.out));
  out << "wrote " << o.count << " samples to " << o.out << "\n";
  return 0;
}

int cmd_stats(const Options& o, Run& run, std::ostream& out) {
  const gd::EdgeListLoad load = gd::load_edge_list(o.graph);
  Json js;
  if (o.samples.empty()) {
    js["population"] = gd::graph_stats(load.graph).to_json();
  } else {
    const gd::Dataset ds = gd::read_jsonl(o.samples);
    std::vector<gd::Graph> graphs;
    for (const auto& r : ds.records) graphs.push_back(r.graph);
    js = gd::sample_vs_population_stats(load.graph, graphs).to_json();
    run.inputs.push_back(o.samples);
  }
  gd::write_file_atomic(o.out, js.dump(2) + "\n");
  run.inputs.insert(run.inputs.begin(), o.graph);
  run.outputs = {o.out};
  run.write_manifest(file_manifest(o.out));
  out << "wrote " << o.out << "\n";
  return 0;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const gd::ValidationError*>(&e)) return "validation";
  if (dynamic_cast<const gd::CapacityError*>(&e)) return "capacity";
  if (dynamic_cast<const gd::ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const gd::NumericError*>(&e)) return "numeric";
  if (dynamic_cast<const gd::FormatError*>(&e)) return "format";
  if (dynamic_cast<const fs::filesystem_error*>(&e)) return "io";
  return "internal";
}

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto a = build();
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    a->app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << a->app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << a->app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << GD_VERSION << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[usage]: " << one_line(e.what()) << "\n";
    CLI::App* failed = &a->app;
    for (auto* sub : a->app.get_subcommands()) failed = sub;
    err << failed->help();
    return 2;
  }
  try {
    for (const auto& [name, sub] : a->subs) {
      if (!sub->parsed()) continue;
      Run run;
      run.command = name;
      run.sub = sub;
      const Options& o = a->o;
      if (name == "gen") return cmd_gen(o, run, out);
      if (name == "train") return cmd_train(o, run, out, err);
      if (name == "traverse") return cmd_traverse(o, run, out);
      if (name == "encode") return cmd_encode(o, run, out);
      if (name == "mig") return cmd_mig(o, run, out);
      if (name == "randomize") return cmd_randomize(o, run, out);
      if (name == "sample") return cmd_sample(o, run, out);
      if (name == "stats") return cmd_stats(o, run, out);
    }
  } catch (const std::exception& e) {
    err << "error[" << error_kind(e) << "]: " << one_line(e.what()) << "\n";
    return 1;
  }
  err << "error[usage]: no subcommand\n";
  return 2;
}

bool knows_flag(const std::string& subcommand, const std::string& flag) {
  auto a = build();
  auto it = a->subs.find(subcommand);
  if (it == a->subs.end()) return false;
  if (flag.empty()) return true;
  return it->second->get_option_no_throw(flag) != nullptr;
}

std::vector<std::pair<std::string, std::vector<std::string>>> flag_table() {
  auto a = build();
  std::vector<std::pair<std::string, std::vector<std::string>>> table;
  for (const auto& [name, sub] : a->subs) {
    std::vector<std::string> flags;
    for (const CLI::Option* opt : sub->get_options())
      for (const auto& l : opt->get_lnames()) flags.push_back("--" + l);
    table.emplace_back(name, flags);
  }
  return table;
}

}  // namespace gdcli
