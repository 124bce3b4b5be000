#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "graphdis/graph.hpp"

namespace graphdis {

// Row-major sample matrix: one inner vector per observation.
using Matrix = std::vector<std::vector<double>>;

constexpr int kDefaultBins = 20;

// Columns with at most `bins` distinct values keep one label per distinct
// value (in ascending order); otherwise uniform-width bins over [min, max].
// A positive `min_width` caps the resolution: bins are never narrower than
// it, so variation below that scale collapses into a single label.
std::vector<int> discretize(const std::vector<double>& values, int bins, double min_width = 0.0);

// Integer-valued columns get one label per distinct value regardless of
// count; everything else goes through discretize().
std::vector<int> discretize_factor(const std::vector<double>& values, int bins);

// Plug-in estimates in nats.
double entropy(const std::vector<int>& labels);
double mutual_information(const std::vector<int>& a, const std::vector<int>& b);

struct MigReport {
  std::vector<std::string> factor_names;
  std::vector<std::vector<double>> mi;  // K x J
  std::vector<double> entropy;          // K
  std::vector<double> per_factor_gap;   // K, 0 for excluded factors
  std::vector<int> j_max;               // K, top latent per factor
  std::vector<bool> excluded;           // K, H(v_k) == 0
  double score = 0.0;

  nlohmann::ordered_json to_json() const;
  // One row per factor: factor,z_0..z_{J-1}
  std::string mi_csv() const;
};

// z: N x J latent representatives, v: N x K factors. Requires N >= 2, J >= 2
// and at least one factor with non-zero entropy. `z_resolution` (empty or
// length J) is the per-latent minimum bin width passed to discretize().
MigReport mig(const Matrix& z, const Matrix& v, int bins = kDefaultBins,
              std::vector<std::string> factor_names = {},
              const std::vector<double>& z_resolution = {});

struct AttributeMig {
  double score = 0.0;
  int j_max = 0;
  std::vector<double> mi;  // J
  double entropy = 0.0;
};

// Gap between the two latents sharing most information with the
// randomization degree, normalized by its entropy. Throws if H(delta_omega)
// is zero.
AttributeMig mig_attr(const std::vector<double>& delta_omega, const Matrix& delta_z_abs,
                      int bins = kDefaultBins, const std::vector<double>& z_resolution = {});

struct GraphStats {
  std::vector<double> degree_histogram;  // index = degree, sums to 1
  double avg_degree = 0.0;
  double clustering_coefficient = 0.0;
  double degree_assortativity = 0.0;

  nlohmann::ordered_json to_json() const;
};

GraphStats graph_stats(const Graph& g);

// Sample Pearson correlation; throws ValidationError on length mismatch,
// fewer than two points, or zero variance.
double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace graphdis
