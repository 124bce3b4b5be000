#pragma once

#include <filesystem>
#include <istream>
#include <utility>
#include <vector>

#include "graphdis/canonical.hpp"
#include "graphdis/graph.hpp"
#include "graphdis/rng.hpp"

namespace graphdis {

struct EdgeListLoad {
  Graph graph;
  std::size_t self_loops_dropped = 0;
  std::size_t duplicates_dropped = 0;
};

// Whitespace-separated integer pairs, one per line; '#' starts a comment
// line. Node ids are remapped to 0..n-1 in first-appearance order.
EdgeListLoad parse_edge_list(std::istream& in);
EdgeListLoad load_edge_list(const std::filesystem::path& path);

// Second-order (node2vec-style) walk parameters.
struct WalkConfig {
  int walk_length = 40;
  double p_return = 1.0;
  double q_inout = 1.0;
  int max_nodes = kDefaultNMax;
};

void validate(const WalkConfig& cfg);

// Normalized probabilities of stepping from `current` to each neighbor given
// the previous node (`previous` < 0 for the first, unbiased step).
std::vector<std::pair<int, double>> transition_probabilities(const Graph& g, int previous,
                                                             int current,
                                                             const WalkConfig& cfg);

// Node sequence of one walk from a uniformly drawn start node. Stops early at
// a node without neighbors or once max_nodes distinct nodes were visited.
std::vector<int> random_walk(const Graph& g, const WalkConfig& cfg, Seed seed);

// Subgraph induced by the distinct walk nodes in first-visit order.
Graph rw_sample(const Graph& g, const WalkConfig& cfg, Seed seed);

}  // namespace graphdis
