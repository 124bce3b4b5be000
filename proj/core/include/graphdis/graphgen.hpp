#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "graphdis/graph.hpp"
#include "graphdis/rng.hpp"

namespace graphdis {

// Generator families. kObserved tags graphs that were not produced by a
// parametric generator (e.g. random-walk samples of an ingested graph); such
// records carry no generative factors.
enum class Family { kER, kBA, kSW, kTree, kObserved };

struct ErParams {
  int n = 1;
  double p = 0.0;
  friend bool operator==(const ErParams&, const ErParams&) = default;
};

// Preferential attachment: every arriving node links to m existing nodes.
struct BaParams {
  int n = 2;
  int m = 1;
  friend bool operator==(const BaParams&, const BaParams&) = default;
};

// Watts-Strogatz ring lattice of even degree k with rewiring probability.
struct SwParams {
  int n = 3;
  int k = 2;
  double p_rewire = 0.0;
  friend bool operator==(const SwParams&, const SwParams&) = default;
};

// Complete binary tree with 2^depth - 1 nodes.
struct TreeParams {
  int depth = 1;
  friend bool operator==(const TreeParams&, const TreeParams&) = default;
};

struct ObservedParams {
  friend bool operator==(const ObservedParams&, const ObservedParams&) =
      default;
};

using GenParams =
    std::variant<ErParams, BaParams, SwParams, TreeParams, ObservedParams>;

Family family_of(const GenParams& params);
std::string_view family_name(Family family);
Family parse_family(std::string_view name);

// Generative factor names in the fixed order used for the factor vector v.
std::vector<std::string> factor_names(Family family);
std::vector<double> factor_values(const GenParams& params);
// Inverse of factor_values; validates integrality and bounds.
GenParams make_params(Family family, const std::map<std::string, double>& values);

// Throws ValidationError naming the violated bound.
void validate(const GenParams& params);

Graph gen_graph(const GenParams& params, Seed seed);

Graph assign_uniform_attribute(Graph g, Seed seed);

// Redraws the attributes of round-half-up(delta_omega * n) nodes chosen
// uniformly without replacement.
Graph randomize_attributes(Graph g, double delta_omega, Seed seed);

struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;
};
using ParamRanges = std::map<std::string, ParamRange>;

struct Record {
  Graph graph;
  GenParams params;
  friend bool operator==(const Record&, const Record&) = default;
};

struct Dataset {
  std::vector<Record> records;
  int n_max = 0;
  friend bool operator==(const Dataset&, const Dataset&) = default;
};

struct DatasetSpec {
  Family family = Family::kER;
  ParamRanges ranges;
  int count = 1;
  bool attributes = false;
  Seed seed = 0;
};

// Each record i uses seeds derived from (spec.seed, i), so the output does
// not depend on `threads`.
Dataset gen_dataset(const DatasetSpec& spec, int threads = 1);

}  // namespace graphdis
