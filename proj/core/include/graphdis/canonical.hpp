#pragma once

#include <vector>

#include "graphdis/graph.hpp"

namespace graphdis {

constexpr int kDefaultNMax = 24;

// Result of degree-based iterative refinement (BOSAM-style ordering).
struct CanonicalOrder {
  // order[slot] = original node placed at that slot.
  std::vector<int> order;
  // Refined class rank of each original node; lower ranks sort first and
  // equal ranks mean the refinement could not tell the nodes apart.
  std::vector<int> class_rank;
  int num_classes = 0;

  bool singleton_classes() const {
    return num_classes == static_cast<int>(order.size());
  }
};

// Nodes are ranked by degree (descending), then by their neighbors' ranks
// compared lexicographically, refined until stable (at most n rounds).
// Remaining ties fall back to the original index, which is the only
// label-dependent part of the order.
CanonicalOrder bosam_refine(const Graph& g);
std::vector<int> bosam_order(const Graph& g);

// Fixed-size dense encoding used as model input and reconstruction target.
// Real nodes occupy the first n slots in canonical order.
struct EncodedSample {
  int n_max = 0;
  std::vector<double> adj;    // n_max * n_max, row-major, symmetric
  std::vector<double> mask;   // n_max
  std::vector<double> attrs;  // n_max, zero where mask is zero

  EncodedSample() = default;
  explicit EncodedSample(int n_max);

  double adj_at(int i, int j) const { return adj[static_cast<std::size_t>(i) * n_max + j]; }
  double& adj_at(int i, int j) { return adj[static_cast<std::size_t>(i) * n_max + j]; }

  friend bool operator==(const EncodedSample&, const EncodedSample&) = default;
};

// Throws CapacityError if g has more than n_max nodes.
EncodedSample to_padded(const Graph& g, int n_max);

// Node count is the longest prefix of mask entries that are all >=
// threshold. Edges need adj >= threshold between existing nodes. When
// keep_attributes is set the decoded attributes are clamped into [0, 1].
Graph threshold_decode(const EncodedSample& sample, double threshold,
                       bool keep_attributes = false);

}  // namespace graphdis
