#pragma once

#include <algorithm>
#include <filesystem>
#include <random>
#include <string>

#include "graphdis/graph.hpp"

namespace gdtest {

inline graphdis::Graph path_graph(int n) {
  graphdis::Graph g(n);
  for (int i = 0; i + 1 < n; ++i) g.add_edge(i, i + 1);
  return g;
}

inline graphdis::Graph complete_graph(int n) {
  graphdis::Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.add_edge(i, j);
  return g;
}

// Star with `leaves` leaves; the center is node `center`.
inline graphdis::Graph star_graph(int leaves, int center = 0) {
  graphdis::Graph g(leaves + 1);
  for (int v = 0; v <= leaves; ++v)
    if (v != center) g.add_edge(center, v);
  return g;
}

inline graphdis::Graph random_graph(int n, double p, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(p);
  graphdis::Graph g(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (coin(rng)) g.add_edge(i, j);
  return g;
}

inline std::vector<int> random_permutation(int n, std::mt19937_64& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// Fresh empty directory under the system temp dir.
inline std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("graphdis_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace gdtest
