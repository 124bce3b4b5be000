#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace graphdis {

using Edge = std::pair<int, int>;

// Simple undirected graph over nodes 0..n-1 with optional per-node scalar
// attributes in [0, 1]. Neighbor lists are kept sorted so that iteration
// order, and therefore every downstream computation, is deterministic.
class Graph {
 public:
  Graph() = default;
  explicit Graph(int num_nodes);

  int num_nodes() const { return static_cast<int>(adjacency_.size()); }
  std::size_t num_edges() const { return num_edges_; }

  // Inserts {u, v}. Returns false if the edge already existed. Throws
  // ValidationError on self-loops or out-of-range endpoints.
  bool add_edge(int u, int v);
  bool remove_edge(int u, int v);
  bool has_edge(int u, int v) const;

  const std::vector<int>& neighbors(int v) const { return adjacency_[v]; }
  int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

  // All edges with first < second, sorted lexicographically.
  std::vector<Edge> edges() const;

  bool has_attributes() const { return attributes_.has_value(); }
  const std::vector<double>& attributes() const;
  void set_attributes(std::vector<double> values);
  void clear_attributes() { attributes_.reset(); }

  // Subgraph induced by `nodes`; node nodes[i] becomes node i.
  Graph induced_subgraph(std::span<const int> nodes) const;

  // Graph with node v renamed to new_label[v].
  Graph relabeled(std::span<const int> new_label) const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check_node(int v) const;

  std::vector<std::vector<int>> adjacency_;
  std::size_t num_edges_ = 0;
  std::optional<std::vector<double>> attributes_;
};

// Brute-force isomorphism test that ignores attributes. Intended for small
// graphs (test oracles); prunes by degree.
bool is_isomorphic(const Graph& a, const Graph& b);

}  // namespace graphdis
