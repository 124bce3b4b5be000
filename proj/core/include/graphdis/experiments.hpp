#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphdis/graphgen.hpp"
#include "graphdis/metrics.hpp"
#include "graphdis/model.hpp"
#include "graphdis/training.hpp"

namespace graphdis {

// Axis-aligned walk through latent space.
struct TraversalSpec {
  int axis = 0;
  double lo = -2.0;
  double hi = 2.0;
  int steps = 5;
  std::vector<double> base_z;  // empty means the prior mean (zeros)
  double threshold = 0.5;
};

struct TraversalCell {
  LatentVector z;
  Graph graph;            // thresholded decode
  EncodedSample decoded;  // probabilistic decode
};

// `steps` evenly spaced points on [lo, hi] (a single step sits at lo).
std::vector<double> traversal_values(const TraversalSpec& spec);

std::vector<TraversalCell> traverse(const ParamStore& weights, const ModelConfig& cfg,
                                    const TraversalSpec& spec);

// Cross product of two axis walks: result[r][c] moves rows.axis to the r-th
// value and cols.axis to the c-th value, starting from rows.base_z.
std::vector<std::vector<TraversalCell>> traverse_grid(const ParamStore& weights,
                                                      const ModelConfig& cfg,
                                                      const TraversalSpec& rows,
                                                      const TraversalSpec& cols);

// Writes cell_<r>_<c>.json, traversal.csv and contact_sheet.svg into `dir`.
void export_traversal(const std::vector<std::vector<TraversalCell>>& grid,
                      const std::filesystem::path& dir);

struct SweepOptions {
  int bins = kDefaultBins;
  // Use each latent's mean posterior standard deviation as the minimum MI
  // bin width, so variation below the encoder's own uncertainty does not
  // count as information.
  bool noise_floor = true;
  bool compute_mig = true;
  int threads = 1;
};

struct SweepResult {
  Matrix z_matrix;  // N x J posterior means
  Matrix v_matrix;  // N x K raw factor values
  std::vector<std::string> factor_names;
  std::vector<double> posterior_sigma;  // J, mean over records
  std::vector<double> kl_per_dim;       // J, mean over records
  std::optional<MigReport> mig;         // absent when the family has no factors

  // Latent dimensions whose mean KL exceeds `threshold` nats.
  int active_latents(double threshold) const;
  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

// Encodes every record (canonicalized to the model's n_max) and scores MIG
// against the true factors. Propagates CapacityError.
SweepResult encode_sweep(const ParamStore& weights, const TrainConfig& cfg,
                         const Dataset& dataset, const SweepOptions& options = {});

struct RandomizationResult {
  std::vector<double> delta_omega;  // one entry per (record, level, repeat)
  Matrix delta_z_abs;               // |mu(X^dOmega) - mu(X)| per latent
  std::vector<double> resolution;   // per-latent minimum bin width used
  AttributeMig attr_mig;

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
};

std::vector<double> default_omega_grid();

RandomizationResult randomization_sweep(const ParamStore& weights, const TrainConfig& cfg,
                                        const Dataset& dataset,
                                        const std::vector<double>& omega_grid, int repeats,
                                        Seed seed, const SweepOptions& options = {});

struct StatSummary {
  double mean = 0.0;
  double stddev = 0.0;
};

struct StatsComparison {
  GraphStats population;
  StatSummary avg_degree;
  StatSummary clustering_coefficient;
  StatSummary degree_assortativity;
  // Aligned to a common support 0..max degree over all graphs.
  std::vector<double> population_histogram;
  std::vector<double> sample_histogram_mean;
  std::size_t sample_count = 0;

  double avg_degree_diff() const { return avg_degree.mean - population.avg_degree; }
  double clustering_diff() const {
    return clustering_coefficient.mean - population.clustering_coefficient;
  }
  double assortativity_diff() const {
    return degree_assortativity.mean - population.degree_assortativity;
  }
  // L1 distance between the aligned degree distributions.
  double histogram_l1() const;
  nlohmann::ordered_json to_json() const;
};

StatsComparison sample_vs_population_stats(const Graph& full, const std::vector<Graph>& samples);

}  // namespace graphdis
