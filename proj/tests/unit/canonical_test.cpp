#include <algorithm>
#include <numeric>

#include <gtest/gtest.h>

#include "graphdis/canonical.hpp"
#include "graphdis/error.hpp"
#include "graphdis/graphgen.hpp"
#include "helpers.hpp"

using namespace graphdis;

namespace {

// Slot of original node `v` in its canonical order.
int slot_of(const std::vector<int>& order, int v) {
  return static_cast<int>(std::find(order.begin(), order.end(), v) - order.begin());
}

}  // namespace

TEST(Bosam, StarCenterFirstUnderEveryLabeling) {
  std::vector<int> perm(5);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    Graph g = gdtest::star_graph(4).relabeled(perm);
    EXPECT_EQ(bosam_order(g)[0], perm[0]);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Bosam, PathMiddleFirstUnderEveryLabeling) {
  std::vector<int> perm{0, 1, 2};
  do {
    Graph g = gdtest::path_graph(3).relabeled(perm);
    EXPECT_EQ(bosam_order(g)[0], perm[1]);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Bosam, CompleteGraphCanonicalFormIsLabelFree) {
  Graph k3 = gdtest::complete_graph(3);
  std::vector<int> perm{0, 1, 2};
  const EncodedSample ref = to_padded(k3, 5);
  do {
    EXPECT_EQ(to_padded(k3.relabeled(perm), 5), ref);
  } while (std::next_permutation(perm.begin(), perm.end()));
}

TEST(Bosam, OrderIsAPermutationSortedByDegree) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 200; ++t) {
    Graph g = gdtest::random_graph(10, 0.3, rng);
    auto order = bosam_order(g);
    auto sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 10; ++i) ASSERT_EQ(sorted[i], i);
    for (int i = 0; i + 1 < 10; ++i) ASSERT_GE(g.degree(order[i]), g.degree(order[i + 1]));
  }
}

TEST(Bosam, SingletonClassesAreRelabelingInvariant) {
  std::mt19937_64 rng(2);
  int checked = 0;
  for (int t = 0; t < 400; ++t) {
    Graph g = gdtest::random_graph(8, 0.4, rng);
    if (!bosam_refine(g).singleton_classes()) continue;
    ++checked;
    const EncodedSample ref = to_padded(g, 8);
    for (int r = 0; r < 5; ++r)
      ASSERT_EQ(to_padded(g.relabeled(gdtest::random_permutation(8, rng)), 8), ref);
  }
  EXPECT_GT(checked, 20);
}

TEST(Bosam, RefinementSeparatesByNeighborDegrees) {
  // Path of 5: ends (deg 1), their neighbors (deg 2 next to a leaf), center (deg 2).
  Graph g = gdtest::path_graph(5);
  auto ref = bosam_refine(g);
  EXPECT_EQ(ref.num_classes, 3);
  EXPECT_EQ(ref.class_rank[0], ref.class_rank[4]);
  EXPECT_EQ(ref.class_rank[1], ref.class_rank[3]);
  EXPECT_NE(ref.class_rank[1], ref.class_rank[2]);
  auto order = bosam_order(g);
  EXPECT_GE(slot_of(order, 0), 3);
}

TEST(ToPadded, TwoNodeExample) {
  Graph g(2);
  g.add_edge(0, 1);
  EncodedSample s = to_padded(g, 4);
  EXPECT_EQ(s.adj_at(0, 1), 1.0);
  EXPECT_EQ(s.adj_at(1, 0), 1.0);
  EXPECT_EQ(std::accumulate(s.adj.begin(), s.adj.end(), 0.0), 2.0);
  EXPECT_EQ(s.mask, (std::vector<double>{1, 1, 0, 0}));
}

TEST(ToPadded, EmptyGraph) {
  EncodedSample s = to_padded(Graph(0), 4);
  EXPECT_EQ(std::accumulate(s.adj.begin(), s.adj.end(), 0.0), 0.0);
  EXPECT_EQ(s.mask, (std::vector<double>(4, 0.0)));
}

TEST(ToPadded, AttributesFollowCanonicalOrder) {
  Graph g = gdtest::star_graph(3, 2);
  g.set_attributes({0.1, 0.2, 0.9, 0.3});
  EncodedSample s = to_padded(g, 6);
  EXPECT_EQ(s.attrs[0], 0.9);
  EXPECT_EQ(s.attrs[4], 0.0);
  EXPECT_EQ(s.attrs[5], 0.0);
}

TEST(ToPadded, CapacityError) {
  EXPECT_THROW(to_padded(Graph(5), 4), CapacityError);
}

TEST(ThresholdDecode, RoundTripIsIsomorphic) {
  Rng rng = make_rng(4);
  for (int t = 0; t < 500; ++t) {
    const int n = static_cast<int>(uniform_int(rng, 0, 8));
    Graph g = n == 0 ? Graph(0) : gen_graph(ErParams{n, uniform01(rng)}, t);
    Graph back = threshold_decode(to_padded(g, 8), 0.5);
    ASSERT_TRUE(is_isomorphic(back, g));
  }
}

TEST(ThresholdDecode, BelowThresholdHasNoEdges) {
  EncodedSample s(4);
  std::fill(s.adj.begin(), s.adj.end(), 0.4);
  std::fill(s.mask.begin(), s.mask.end(), 1.0);
  Graph g = threshold_decode(s, 0.5);
  EXPECT_EQ(g.num_nodes(), 4);
  EXPECT_EQ(g.num_edges(), 0u);
}

TEST(ThresholdDecode, PrefixRule) {
  EncodedSample s(4);
  s.mask = {0.9, 0.8, 0.2, 0.1};
  EXPECT_EQ(threshold_decode(s, 0.5).num_nodes(), 2);
  s.mask = {0.9, 0.2, 0.8, 0.7};
  EXPECT_EQ(threshold_decode(s, 0.5).num_nodes(), 1);
}

TEST(ThresholdDecode, EdgesOnlyBetweenExistingNodes) {
  EncodedSample s(3);
  std::fill(s.adj.begin(), s.adj.end(), 0.9);
  s.mask = {0.9, 0.9, 0.1};
  Graph g = threshold_decode(s, 0.5);
  EXPECT_EQ(g.num_nodes(), 2);
  EXPECT_EQ(g.num_edges(), 1u);
}

TEST(ThresholdDecode, ThresholdMustBeOpenUnitInterval) {
  EncodedSample s(2);
  EXPECT_THROW(threshold_decode(s, 0.0), ValidationError);
  EXPECT_THROW(threshold_decode(s, 1.0), ValidationError);
}
