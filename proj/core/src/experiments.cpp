#include "graphdis/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "graphdis/dataset_io.hpp"
#include "graphdis/error.hpp"
#include "graphdis/svg.hpp"

namespace graphdis {

namespace {

std::vector<LatentDistribution> encode_parallel(const ParamStore& weights, const ModelConfig& cfg,
                                                const std::vector<EncodedSample>& xs,
                                                int threads) {
  std::vector<LatentDistribution> out(xs.size());
  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1,
                              std::max<std::size_t>(xs.size(), 1));
  const std::size_t chunk = (xs.size() + workers - 1) / workers;
  auto run = [&](std::size_t begin, std::size_t end) {
    if (begin >= end) return;
    auto part = encode_many(weights, cfg, std::span(xs).subspan(begin, end - begin));
    std::move(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
  };
  if (workers == 1) {
    run(0, xs.size());
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        run(w * chunk, std::min(xs.size(), (w + 1) * chunk));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

std::vector<double> mean_sigma(const std::vector<LatentDistribution>& dists, int j) {
  std::vector<double> s(static_cast<std::size_t>(j), 0.0);
  for (const auto& d : dists)
    for (int k = 0; k < j; ++k) s[k] += std::exp(0.5 * d.log_var[k]);
  for (double& x : s) x /= static_cast<double>(std::max<std::size_t>(dists.size(), 1));
  return s;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  write_file_atomic(path, text);
}

std::string join_csv(const std::vector<double>& xs) {
  std::ostringstream os;
  os << std::setprecision(10);
  for (std::size_t i = 0; i < xs.size(); ++i) os << (i ? "," : "") << xs[i];
  return os.str();
}

}  // namespace

std::vector<double> traversal_values(const TraversalSpec& spec) {
  if (spec.steps < 1) throw ValidationError("traversal steps must be >= 1");
  if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || spec.lo >= spec.hi)
    throw ValidationError("traversal range must satisfy lo < hi");
  std::vector<double> vals;
  for (int s = 0; s < spec.steps; ++s)
    vals.push_back(spec.steps == 1 ? spec.lo
                                   : spec.lo + (spec.hi - spec.lo) * s / (spec.steps - 1));
  return vals;
}

static std::vector<double> base_vector(const TraversalSpec& spec, const ModelConfig& cfg) {
  if (spec.axis < 0 || spec.axis >= cfg.j_latent)
    throw ValidationError("traversal axis " + std::to_string(spec.axis) + " outside [0, " +
                          std::to_string(cfg.j_latent) + ")");
  if (spec.threshold <= 0.0 || spec.threshold >= 1.0)
    throw ValidationError("threshold must be in (0, 1)");
  if (spec.base_z.empty()) return std::vector<double>(static_cast<std::size_t>(cfg.j_latent), 0.0);
  if (spec.base_z.size() != static_cast<std::size_t>(cfg.j_latent))
    throw ShapeError("base z has " + std::to_string(spec.base_z.size()) + " entries, expected " +
                     std::to_string(cfg.j_latent));
  return spec.base_z;
}

static TraversalCell make_cell(const ParamStore& weights, const ModelConfig& cfg,
                               std::vector<double> z, double threshold) {
  TraversalCell cell;
  cell.z.z = std::move(z);
  cell.decoded = decode(weights, cfg, cell.z);
  cell.graph = threshold_decode(cell.decoded, threshold, cfg.use_attributes);
  return cell;
}

std::vector<TraversalCell> traverse(const ParamStore& weights, const ModelConfig& cfg,
                                    const TraversalSpec& spec) {
  auto base = base_vector(spec, cfg);
  std::vector<TraversalCell> cells;
  for (double v : traversal_values(spec)) {
    auto z = base;
    z[spec.axis] = v;
    cells.push_back(make_cell(weights, cfg, std::move(z), spec.threshold));
  }
  return cells;
}

std::vector<std::vector<TraversalCell>> traverse_grid(const ParamStore& weights,
                                                      const ModelConfig& cfg,
                                                      const TraversalSpec& rows,
                                                      const TraversalSpec& cols) {
  auto base = base_vector(rows, cfg);
  base_vector(cols, cfg);
  if (rows.axis == cols.axis) throw ValidationError("grid axes must differ");
  std::vector<std::vector<TraversalCell>> grid;
  for (double rv : traversal_values(rows)) {
    std::vector<TraversalCell> row;
    for (double cv : traversal_values(cols)) {
      auto z = base;
      z[rows.axis] = rv;
      z[cols.axis] = cv;
      row.push_back(make_cell(weights, cfg, std::move(z), rows.threshold));
    }
    grid.push_back(std::move(row));
  }
  return grid;
}

void export_traversal(const std::vector<std::vector<TraversalCell>>& grid,
                      const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream csv;
  std::size_t j = grid.empty() || grid[0].empty() ? 0 : grid[0][0].z.z.size();
  csv << "row,col";
  for (std::size_t k = 0; k < j; ++k) csv << ",z_" << k;
  csv << ",n,edges,avg_degree\n";
  std::vector<std::vector<HeatmapCell>> sheet;
  for (std::size_t r = 0; r < grid.size(); ++r) {
    std::vector<HeatmapCell> srow;
    for (std::size_t c = 0; c < grid[r].size(); ++c) {
      const TraversalCell& cell = grid[r][c];
      nlohmann::ordered_json js;
      js["z"] = cell.z.z;
      js["n"] = cell.graph.num_nodes();
      nlohmann::ordered_json edges = nlohmann::ordered_json::array();
      for (auto [a, b] : cell.graph.edges()) edges.push_back({a, b});
      js["edges"] = edges;
      if (cell.graph.has_attributes()) js["attrs"] = cell.graph.attributes();
      js["mask"] = cell.decoded.mask;
      write_text(dir / ("cell_" + std::to_string(r) + "_" + std::to_string(c) + ".json"),
                 js.dump(2) + "\n");
      const int n = cell.graph.num_nodes();
      const double avg = n > 0 ? 2.0 * cell.graph.num_edges() / n : 0.0;
      csv << r << ',' << c << ',' << join_csv(cell.z.z) << ',' << n << ','
          << cell.graph.num_edges() << ',' << avg << '\n';
      std::ostringstream label;
      label << std::fixed << std::setprecision(1) << "n=" << n << " m=" << cell.graph.num_edges();
      srow.push_back({cell.decoded, label.str()});
    }
    sheet.push_back(std::move(srow));
  }
  write_text(dir / "traversal.csv", csv.str());
  write_text(dir / "contact_sheet.svg", adjacency_contact_sheet(sheet));
}

int SweepResult::active_latents(double threshold) const {
  return static_cast<int>(std::count_if(kl_per_dim.begin(), kl_per_dim.end(),
                                        [&](double k) { return k > threshold; }));
}

nlohmann::ordered_json SweepResult::to_json() const {
  nlohmann::ordered_json js;
  js["records"] = z_matrix.size();
  js["factor_names"] = factor_names;
  js["posterior_sigma"] = posterior_sigma;
  js["kl_per_dim"] = kl_per_dim;
  if (mig) js["mig"] = mig->to_json();
  return js;
}

std::string SweepResult::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(10);
  const std::size_t j = kl_per_dim.size();
  for (std::size_t k = 0; k < j; ++k) os << (k ? "," : "") << "z_" << k;
  for (const auto& name : factor_names) os << ',' << name;
  os << '\n';
  for (std::size_t i = 0; i < z_matrix.size(); ++i) {
    os << join_csv(z_matrix[i]);
    if (!factor_names.empty()) os << ',' << join_csv(v_matrix[i]);
    os << '\n';
  }
  return os.str();
}

SweepResult encode_sweep(const ParamStore& weights, const TrainConfig& cfg,
                         const Dataset& dataset, const SweepOptions& options) {
  if (dataset.records.empty()) throw ValidationError("sweep dataset is empty");
  const ModelConfig& mc = cfg.model;
  std::vector<EncodedSample> xs;
  xs.reserve(dataset.records.size());
  for (const auto& r : dataset.records) xs.push_back(to_padded(r.graph, mc.n_max));
  auto dists = encode_parallel(weights, mc, xs, options.threads);

  SweepResult res;
  res.kl_per_dim.assign(static_cast<std::size_t>(mc.j_latent), 0.0);
  for (std::size_t i = 0; i < dists.size(); ++i) {
    res.z_matrix.push_back(dists[i].mu);
    auto kl = kl_per_dimension(dists[i]);
    for (int k = 0; k < mc.j_latent; ++k) res.kl_per_dim[k] += kl[k];
    res.v_matrix.push_back(factor_values(dataset.records[i].params));
  }
  for (double& k : res.kl_per_dim) k /= static_cast<double>(dists.size());
  res.posterior_sigma = mean_sigma(dists, mc.j_latent);

  const Family fam = family_of(dataset.records.front().params);
  res.factor_names = factor_names(fam);
  for (const auto& r : dataset.records)
    if (family_of(r.params) != fam) throw ValidationError("sweep dataset mixes families");
  if (options.compute_mig && !res.factor_names.empty()) {
    std::vector<double> resolution;
    if (options.noise_floor) resolution = res.posterior_sigma;
    res.mig = mig(res.z_matrix, res.v_matrix, options.bins, res.factor_names, resolution);
  }
  return res;
}

std::vector<double> default_omega_grid() { return {0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0}; }

nlohmann::ordered_json RandomizationResult::to_json() const {
  nlohmann::ordered_json js;
  js["samples"] = delta_omega.size();
  js["resolution"] = resolution;
  js["mig_attr"] = attr_mig.score;
  js["j_max"] = attr_mig.j_max;
  js["mi"] = attr_mig.mi;
  js["entropy"] = attr_mig.entropy;
  return js;
}

std::string RandomizationResult::to_csv() const {
  std::ostringstream os;
  os << std::setprecision(10) << "delta_omega";
  const std::size_t j = delta_z_abs.empty() ? 0 : delta_z_abs[0].size();
  for (std::size_t k = 0; k < j; ++k) os << ",dz_" << k;
  os << '\n';
  for (std::size_t i = 0; i < delta_omega.size(); ++i)
    os << delta_omega[i] << ',' << join_csv(delta_z_abs[i]) << '\n';
  return os.str();
}

RandomizationResult randomization_sweep(const ParamStore& weights, const TrainConfig& cfg,
                                        const Dataset& dataset,
                                        const std::vector<double>& omega_grid, int repeats,
                                        Seed seed, const SweepOptions& options) {
  const ModelConfig& mc = cfg.model;
  if (!mc.use_attributes) throw ValidationError("model was trained without attributes");
  if (dataset.records.empty()) throw ValidationError("randomization dataset is empty");
  if (repeats < 1) throw ValidationError("repeats must be >= 1");
  if (omega_grid.empty()) throw ValidationError("omega grid is empty");
  for (double w : omega_grid)
    if (!(w >= 0.0 && w <= 1.0)) throw ValidationError("omega levels must lie in [0, 1]");
  if (std::all_of(omega_grid.begin(), omega_grid.end(),
                  [&](double w) { return w == omega_grid.front(); }))
    throw ValidationError("omega grid needs at least two distinct levels");

  std::vector<EncodedSample> base;
  std::vector<EncodedSample> perturbed;
  RandomizationResult res;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const Graph& g = dataset.records[i].graph;
    if (!g.has_attributes())
      throw ValidationError("record " + std::to_string(i) + " has no attributes");
    base.push_back(to_padded(g, mc.n_max));
    for (std::size_t l = 0; l < omega_grid.size(); ++l) {
      for (int r = 0; r < repeats; ++r) {
        const Seed s = derive_seed(seed, i, l * static_cast<std::size_t>(repeats) + r);
        perturbed.push_back(to_padded(randomize_attributes(g, omega_grid[l], s), mc.n_max));
        res.delta_omega.push_back(omega_grid[l]);
      }
    }
  }
  auto mu0 = encode_parallel(weights, mc, base, options.threads);
  auto mu1 = encode_parallel(weights, mc, perturbed, options.threads);
  const std::size_t per_record = omega_grid.size() * static_cast<std::size_t>(repeats);
  for (std::size_t t = 0; t < mu1.size(); ++t) {
    const auto& a = mu0[t / per_record].mu;
    const auto& b = mu1[t].mu;
    std::vector<double> d(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) d[k] = std::abs(b[k] - a[k]);
    res.delta_z_abs.push_back(std::move(d));
  }
  if (options.noise_floor) res.resolution = mean_sigma(mu0, mc.j_latent);
  res.attr_mig = mig_attr(res.delta_omega, res.delta_z_abs, options.bins, res.resolution);
  return res;
}

double StatsComparison::histogram_l1() const {
  double s = 0.0;
  for (std::size_t i = 0; i < population_histogram.size(); ++i)
    s += std::abs(population_histogram[i] - sample_histogram_mean[i]);
  return s;
}

nlohmann::ordered_json StatsComparison::to_json() const {
  auto summary = [](const StatSummary& s) {
    nlohmann::ordered_json js;
    js["mean"] = s.mean;
    js["stddev"] = s.stddev;
    return js;
  };
  nlohmann::ordered_json js;
  js["samples"] = sample_count;
  js["population"] = population.to_json();
  js["sample_avg_degree"] = summary(avg_degree);
  js["sample_clustering_coefficient"] = summary(clustering_coefficient);
  js["sample_degree_assortativity"] = summary(degree_assortativity);
  js["population_histogram"] = population_histogram;
  js["sample_histogram_mean"] = sample_histogram_mean;
  js["diff"] = {{"avg_degree", avg_degree_diff()},
                {"clustering_coefficient", clustering_diff()},
                {"degree_assortativity", assortativity_diff()},
                {"histogram_l1", histogram_l1()}};
  return js;
}

StatsComparison sample_vs_population_stats(const Graph& full, const std::vector<Graph>& samples) {
  if (samples.empty()) throw ValidationError("no samples to compare");
  StatsComparison out;
  out.population = graph_stats(full);
  out.sample_count = samples.size();
  std::vector<GraphStats> stats;
  std::size_t support = out.population.degree_histogram.size();
  for (const auto& g : samples) {
    stats.push_back(graph_stats(g));
    support = std::max(support, stats.back().degree_histogram.size());
  }
  out.population_histogram = out.population.degree_histogram;
  out.population_histogram.resize(support, 0.0);
  out.sample_histogram_mean.assign(support, 0.0);
  auto summarize = [&](auto field) {
    StatSummary s;
    for (const auto& st : stats) s.mean += field(st);
    s.mean /= static_cast<double>(stats.size());
    for (const auto& st : stats) s.stddev += (field(st) - s.mean) * (field(st) - s.mean);
    s.stddev = std::sqrt(s.stddev / static_cast<double>(stats.size()));
    return s;
  };
  out.avg_degree = summarize([](const GraphStats& s) { return s.avg_degree; });
  out.clustering_coefficient =
      summarize([](const GraphStats& s) { return s.clustering_coefficient; });
  out.degree_assortativity = summarize([](const GraphStats& s) { return s.degree_assortativity; });
  for (const auto& st : stats)
    for (std::size_t d = 0; d < st.degree_histogram.size(); ++d)
      out.sample_histogram_mean[d] += st.degree_histogram[d] / static_cast<double>(stats.size());
  return out;
}

}  // namespace graphdis
