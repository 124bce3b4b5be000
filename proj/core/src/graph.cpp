#include "graphdis/graph.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphdis/error.hpp"

namespace graphdis {

Graph::Graph(int num_nodes) {
  if (num_nodes < 0) {
    throw ValidationError("graph node count must be >= 0, got " +
                          std::to_string(num_nodes));
  }
  adjacency_.resize(static_cast<std::size_t>(num_nodes));
}

void Graph::check_node(int v) const {
  if (v < 0 || v >= num_nodes()) {
    throw ValidationError("node index " + std::to_string(v) +
                          " out of range [0, " + std::to_string(num_nodes()) +
                          ")");
  }
}

bool Graph::add_edge(int u, int v) {
  check_node(u);
  check_node(v);
  if (u == v) {
    throw ValidationError("self-loop on node " + std::to_string(u));
  }
  auto& nu = adjacency_[u];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it != nu.end() && *it == v) return false;
  nu.insert(it, v);
  auto& nv = adjacency_[v];
  nv.insert(std::lower_bound(nv.begin(), nv.end(), u), u);
  ++num_edges_;
  return true;
}

bool Graph::remove_edge(int u, int v) {
  check_node(u);
  check_node(v);
  auto& nu = adjacency_[u];
  auto it = std::lower_bound(nu.begin(), nu.end(), v);
  if (it == nu.end() || *it != v) return false;
  nu.erase(it);
  auto& nv = adjacency_[v];
  nv.erase(std::lower_bound(nv.begin(), nv.end(), u));
  --num_edges_;
  return true;
}

bool Graph::has_edge(int u, int v) const {
  if (u < 0 || v < 0 || u >= num_nodes() || v >= num_nodes()) return false;
  const auto& nu = adjacency_[u];
  return std::binary_search(nu.begin(), nu.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(num_edges_);
  for (int u = 0; u < num_nodes(); ++u) {
    for (int v : adjacency_[u]) {
      if (u < v) out.emplace_back(u, v);
    }
  }
  return out;
}

const std::vector<double>& Graph::attributes() const {
  if (!attributes_) throw ValidationError("graph has no node attributes");
  return *attributes_;
}

void Graph::set_attributes(std::vector<double> values) {
  if (values.size() != adjacency_.size()) {
    throw ValidationError("attribute vector length " +
                          std::to_string(values.size()) +
                          " does not match node count " +
                          std::to_string(adjacency_.size()));
  }
  for (double a : values) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw ValidationError("node attribute " + std::to_string(a) +
                            " outside [0, 1]");
    }
  }
  attributes_ = std::move(values);
}

Graph Graph::induced_subgraph(std::span<const int> nodes) const {
  std::vector<int> position(adjacency_.size(), -1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    check_node(nodes[i]);
    if (position[nodes[i]] != -1) {
      throw ValidationError("duplicate node " + std::to_string(nodes[i]) +
                            " in induced subgraph selection");
    }
    position[nodes[i]] = static_cast<int>(i);
  }
  Graph sub(static_cast<int>(nodes.size()));
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    for (int w : adjacency_[nodes[i]]) {
      const int j = position[w];
      if (j > static_cast<int>(i)) sub.add_edge(static_cast<int>(i), j);
    }
  }
  if (attributes_) {
    std::vector<double> attrs;
    attrs.reserve(nodes.size());
    for (int v : nodes) attrs.push_back((*attributes_)[v]);
    sub.attributes_ = std::move(attrs);
  }
  return sub;
}

Graph Graph::relabeled(std::span<const int> new_label) const {
  if (new_label.size() != adjacency_.size()) {
    throw ValidationError("relabeling size mismatch");
  }
  Graph out(num_nodes());
  for (const auto& [u, v] : edges()) out.add_edge(new_label[u], new_label[v]);
  if (attributes_) {
    std::vector<double> attrs(adjacency_.size());
    for (std::size_t v = 0; v < adjacency_.size(); ++v) {
      attrs[new_label[v]] = (*attributes_)[v];
    }
    out.attributes_ = std::move(attrs);
  }
  return out;
}

namespace {

bool extend_mapping(const Graph& a, const Graph& b, std::vector<int>& map,
                    std::vector<bool>& used, int next) {
  const int n = a.num_nodes();
  if (next == n) return true;
  for (int cand = 0; cand < n; ++cand) {
    if (used[cand] || a.degree(next) != b.degree(cand)) continue;
    bool ok = true;
    for (int prev = 0; prev < next && ok; ++prev) {
      ok = a.has_edge(next, prev) == b.has_edge(cand, map[prev]);
    }
    if (!ok) continue;
    map[next] = cand;
    used[cand] = true;
    if (extend_mapping(a, b, map, used, next + 1)) return true;
    used[cand] = false;
  }
  return false;
}

}  // namespace

bool is_isomorphic(const Graph& a, const Graph& b) {
  if (a.num_nodes() != b.num_nodes() || a.num_edges() != b.num_edges()) {
    return false;
  }
  std::vector<int> da, db;
  for (int v = 0; v < a.num_nodes(); ++v) {
    da.push_back(a.degree(v));
    db.push_back(b.degree(v));
  }
  std::sort(da.begin(), da.end());
  std::sort(db.begin(), db.end());
  if (da != db) return false;
  std::vector<int> map(a.num_nodes(), -1);
  std::vector<bool> used(a.num_nodes(), false);
  return extend_mapping(a, b, map, used, 0);
}

}  // namespace graphdis
