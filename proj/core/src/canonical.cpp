#include "graphdis/canonical.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "graphdis/error.hpp"

namespace graphdis {

namespace {

// Dense ranks for nodes sorted by `less`; equal keys share a rank.
template <class Less, class Equal>
std::vector<int> dense_ranks(int n, Less less, Equal equal, int* num_classes) {
  std::vector<int> nodes(static_cast<std::size_t>(n));
  std::iota(nodes.begin(), nodes.end(), 0);
  std::stable_sort(nodes.begin(), nodes.end(), less);
  std::vector<int> rank(static_cast<std::size_t>(n), 0);
  int current = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0 && !equal(nodes[i - 1], nodes[i])) ++current;
    rank[nodes[i]] = current;
  }
  *num_classes = n == 0 ? 0 : current + 1;
  return rank;
}

}  // namespace

CanonicalOrder bosam_refine(const Graph& g) {
  const int n = g.num_nodes();
  CanonicalOrder out;
  int classes = 0;
  std::vector<int> rank = dense_ranks(
      n, [&](int a, int b) { return g.degree(a) > g.degree(b); },
      [&](int a, int b) { return g.degree(a) == g.degree(b); }, &classes);

  std::vector<std::vector<int>> signature(static_cast<std::size_t>(n));
  for (int round = 0; round < n; ++round) {
    for (int v = 0; v < n; ++v) {
      auto& sig = signature[v];
      sig.clear();
      sig.push_back(rank[v]);
      for (int w : g.neighbors(v)) sig.push_back(rank[w]);
      std::sort(sig.begin() + 1, sig.end());
    }
    int refined = 0;
    std::vector<int> next = dense_ranks(
        n, [&](int a, int b) { return signature[a] < signature[b]; },
        [&](int a, int b) { return signature[a] == signature[b]; }, &refined);
    rank = std::move(next);
    if (refined == classes) break;
    classes = refined;
  }

  out.class_rank = rank;
  out.num_classes = classes;
  out.order.resize(static_cast<std::size_t>(n));
  std::iota(out.order.begin(), out.order.end(), 0);
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](int a, int b) { return rank[a] < rank[b]; });
  return out;
}

std::vector<int> bosam_order(const Graph& g) { return bosam_refine(g).order; }

EncodedSample::EncodedSample(int n)
    : n_max(n),
      adj(static_cast<std::size_t>(n) * n, 0.0),
      mask(static_cast<std::size_t>(n), 0.0),
      attrs(static_cast<std::size_t>(n), 0.0) {}

EncodedSample to_padded(const Graph& g, int n_max) {
  if (g.num_nodes() > n_max) {
    throw CapacityError("graph with " + std::to_string(g.num_nodes()) +
                        " nodes exceeds padding size n_max=" + std::to_string(n_max));
  }
  const auto order = bosam_order(g);
  std::vector<int> slot(order.size());
  for (std::size_t s = 0; s < order.size(); ++s) slot[order[s]] = static_cast<int>(s);

  EncodedSample x(n_max);
  for (int s = 0; s < g.num_nodes(); ++s) x.mask[s] = 1.0;
  for (const auto& [u, v] : g.edges()) {
    x.adj_at(slot[u], slot[v]) = 1.0;
    x.adj_at(slot[v], slot[u]) = 1.0;
  }
  if (g.has_attributes()) {
    const auto& a = g.attributes();
    for (int v = 0; v < g.num_nodes(); ++v) x.attrs[slot[v]] = a[v];
  }
  return x;
}

Graph threshold_decode(const EncodedSample& sample, double threshold, bool keep_attributes) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ValidationError("decode threshold must lie in (0, 1), got " + std::to_string(threshold));
  }
  int n = 0;
  while (n < sample.n_max && sample.mask[n] >= threshold) ++n;
  Graph g(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // The decoder output is symmetric; targets built by hand may not be.
      const double p = 0.5 * (sample.adj_at(i, j) + sample.adj_at(j, i));
      if (p >= threshold) g.add_edge(i, j);
    }
  }
  if (keep_attributes) {
    std::vector<double> attrs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) attrs[i] = std::clamp(sample.attrs[i], 0.0, 1.0);
    g.set_attributes(std::move(attrs));
  }
  return g;
}

}  // namespace graphdis
