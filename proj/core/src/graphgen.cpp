#include "graphdis/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <thread>

#include "graphdis/error.hpp"

namespace graphdis {

namespace {

constexpr int kMaxTreeDepth = 20;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string fmt_double(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ValidationError(message);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

Graph gen_er(const ErParams& p, Rng& rng) {
  Graph g(p.n);
  for (int i = 0; i < p.n; ++i) {
    for (int j = i + 1; j < p.n; ++j) {
      if (uniform01(rng) < p.p) g.add_edge(i, j);
    }
  }
  return g;
}

// Nodes 0..m-1 start isolated; node m links to all of them, forming a star.
// Every later node picks m distinct targets with probability proportional
// to degree.
Graph gen_ba(const BaParams& p, Rng& rng) {
  Graph g(p.n);
  std::vector<int> endpoints;
  endpoints.reserve(static_cast<std::size_t>(2) * p.n * p.m);
  for (int v = 0; v < p.m; ++v) {
    g.add_edge(p.m, v);
    endpoints.push_back(p.m);
    endpoints.push_back(v);
  }
  std::vector<int> targets;
  for (int t = p.m + 1; t < p.n; ++t) {
    targets.clear();
    while (static_cast<int>(targets.size()) < p.m) {
      const int cand = endpoints[static_cast<std::size_t>(
          uniform_int(rng, 0, static_cast<std::int64_t>(endpoints.size()) - 1))];
      if (std::find(targets.begin(), targets.end(), cand) == targets.end()) {
        targets.push_back(cand);
      }
    }
    for (int v : targets) {
      g.add_edge(t, v);
      endpoints.push_back(t);
      endpoints.push_back(v);
    }
  }
  return g;
}

Graph gen_sw(const SwParams& p, Rng& rng) {
  Graph g(p.n);
  const int half = p.k / 2;
  for (int i = 0; i < p.n; ++i) {
    for (int j = 1; j <= half; ++j) g.add_edge(i, (i + j) % p.n);
  }
  if (p.p_rewire <= 0.0) return g;
  for (int j = 1; j <= half; ++j) {
    for (int i = 0; i < p.n; ++i) {
      if (uniform01(rng) >= p.p_rewire) continue;
      const int old = (i + j) % p.n;
      if (!g.has_edge(i, old) || g.degree(i) >= p.n - 1) continue;
      int w;
      do {
        w = static_cast<int>(uniform_int(rng, 0, p.n - 1));
      } while (w == i || g.has_edge(i, w));
      g.remove_edge(i, old);
      g.add_edge(i, w);
    }
  }
  return g;
}

Graph gen_tree(const TreeParams& p) {
  const int n = (1 << p.depth) - 1;
  Graph g(n);
  for (int v = 1; v < n; ++v) g.add_edge(v, (v - 1) / 2);
  return g;
}

int to_int_param(const std::string& name, double value) {
  if (std::nearbyint(value) != value) {
    throw ValidationError("parameter " + name + " must be an integer, got " +
                          fmt_double(value));
  }
  return static_cast<int>(value);
}

const ParamRange& range_for(const ParamRanges& ranges, const std::string& name) {
  auto it = ranges.find(name);
  if (it == ranges.end()) {
    throw ValidationError("missing sampling range for parameter " + name);
  }
  if (!(it->second.lo <= it->second.hi)) {
    throw ValidationError("range for " + name + " has lo > hi");
  }
  return it->second;
}

struct IntRange {
  int lo;
  int hi;
};

IntRange int_range(const ParamRanges& ranges, const std::string& name) {
  const auto& r = range_for(ranges, name);
  const IntRange out{static_cast<int>(std::ceil(r.lo)),
                     static_cast<int>(std::floor(r.hi))};
  require(out.lo <= out.hi, "range for " + name + " contains no integer");
  return out;
}

void check_prob_range(const ParamRanges& ranges, const std::string& name) {
  const auto& r = range_for(ranges, name);
  require(r.lo >= 0.0 && r.hi <= 1.0, "range for " + name + " must lie in [0, 1]");
}

// Checks the family bounds for every value a range can produce.
void validate_ranges(Family family, const ParamRanges& ranges) {
  switch (family) {
    case Family::kER: {
      require(int_range(ranges, "n").lo >= 1, "ER requires n >= 1");
      check_prob_range(ranges, "p");
      break;
    }
    case Family::kBA: {
      const auto n = int_range(ranges, "n");
      const auto m = int_range(ranges, "m");
      require(m.lo >= 1, "BA requires m >= 1");
      require(m.hi < n.lo, "BA requires m < n for every sampled pair (m_hi < n_lo)");
      break;
    }
    case Family::kSW: {
      const auto n = int_range(ranges, "n");
      const auto k = int_range(ranges, "k");
      require(k.lo >= 0, "SW requires k >= 0");
      require(k.lo % 2 == 0 || k.lo + 1 <= k.hi, "SW k range contains no even value");
      require(k.hi < n.lo, "SW requires k < n for every sampled pair (k_hi < n_lo)");
      check_prob_range(ranges, "p_rewire");
      break;
    }
    case Family::kTree: {
      const auto d = int_range(ranges, "depth");
      require(d.lo >= 1, "TREE requires depth >= 1");
      require(d.hi <= kMaxTreeDepth, "TREE depth above supported maximum 20");
      break;
    }
    case Family::kObserved:
      throw ValidationError("cannot generate graphs of the observed family");
  }
}

GenParams sample_params(Family family, const ParamRanges& ranges, Rng& rng) {
  auto draw_int = [&](const char* name) {
    const auto r = int_range(ranges, name);
    return static_cast<int>(uniform_int(rng, r.lo, r.hi));
  };
  auto draw_real = [&](const char* name) {
    const auto& r = range_for(ranges, name);
    return r.lo + (r.hi - r.lo) * uniform01(rng);
  };
  switch (family) {
    case Family::kER: {
      ErParams p;
      p.n = draw_int("n");
      p.p = draw_real("p");
      return p;
    }
    case Family::kBA: {
      BaParams p;
      p.n = draw_int("n");
      p.m = draw_int("m");
      return p;
    }
    case Family::kSW: {
      SwParams p;
      p.n = draw_int("n");
      const auto k = int_range(ranges, "k");
      const int lo_even = k.lo + (k.lo % 2);
      const int hi_even = k.hi - (k.hi % 2);
      p.k = lo_even + 2 * static_cast<int>(uniform_int(rng, 0, (hi_even - lo_even) / 2));
      p.p_rewire = draw_real("p_rewire");
      return p;
    }
    case Family::kTree: {
      TreeParams p;
      p.depth = draw_int("depth");
      return p;
    }
    case Family::kObserved:
      break;
  }
  throw ValidationError("cannot sample parameters of the observed family");
}

}  // namespace

Family family_of(const GenParams& params) {
  return std::visit(Overloaded{
                        [](const ErParams&) { return Family::kER; },
                        [](const BaParams&) { return Family::kBA; },
                        [](const SwParams&) { return Family::kSW; },
                        [](const TreeParams&) { return Family::kTree; },
                        [](const ObservedParams&) { return Family::kObserved; },
                    },
                    params);
}

std::string_view family_name(Family family) {
  switch (family) {
    case Family::kER:
      return "ER";
    case Family::kBA:
      return "BA";
    case Family::kSW:
      return "SW";
    case Family::kTree:
      return "TREE";
    case Family::kObserved:
      return "RW";
  }
  return "?";
}

Family parse_family(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "ER") return Family::kER;
  if (upper == "BA") return Family::kBA;
  if (upper == "SW") return Family::kSW;
  if (upper == "TREE") return Family::kTree;
  if (upper == "RW") return Family::kObserved;
  throw ValidationError("unknown graph family '" + std::string(name) + "'");
}

std::vector<std::string> factor_names(Family family) {
  switch (family) {
    case Family::kER:
      return {"n", "p"};
    case Family::kBA:
      return {"n", "m"};
    case Family::kSW:
      return {"n", "k", "p_rewire"};
    case Family::kTree:
      return {"depth"};
    case Family::kObserved:
      return {};
  }
  return {};
}

std::vector<double> factor_values(const GenParams& params) {
  return std::visit(
      Overloaded{
          [](const ErParams& p) { return std::vector<double>{double(p.n), p.p}; },
          [](const BaParams& p) { return std::vector<double>{double(p.n), double(p.m)}; },
          [](const SwParams& p) {
            return std::vector<double>{double(p.n), double(p.k), p.p_rewire};
          },
          [](const TreeParams& p) { return std::vector<double>{double(p.depth)}; },
          [](const ObservedParams&) { return std::vector<double>{}; },
      },
      params);
}

GenParams make_params(Family family, const std::map<std::string, double>& values) {
  const auto names = factor_names(family);
  if (values.size() != names.size()) {
    throw ValidationError("family " + std::string(family_name(family)) + " expects " +
                          std::to_string(names.size()) + " parameters");
  }
  auto get = [&](const std::string& name) {
    auto it = values.find(name);
    if (it == values.end()) {
      throw ValidationError("missing parameter " + name + " for family " +
                            std::string(family_name(family)));
    }
    return it->second;
  };
  GenParams out;
  switch (family) {
    case Family::kER:
      out = ErParams{to_int_param("n", get("n")), get("p")};
      break;
    case Family::kBA:
      out = BaParams{to_int_param("n", get("n")), to_int_param("m", get("m"))};
      break;
    case Family::kSW:
      out = SwParams{to_int_param("n", get("n")), to_int_param("k", get("k")),
                     get("p_rewire")};
      break;
    case Family::kTree:
      out = TreeParams{to_int_param("depth", get("depth"))};
      break;
    case Family::kObserved:
      out = ObservedParams{};
      break;
  }
  validate(out);
  return out;
}

void validate(const GenParams& params) {
  std::visit(
      Overloaded{
          [](const ErParams& p) {
            require(p.n >= 1, "ER requires n >= 1, got n=" + std::to_string(p.n));
            require(is_probability(p.p), "ER requires 0 <= p <= 1, got p=" + fmt_double(p.p));
          },
          [](const BaParams& p) {
            require(p.m >= 1, "BA requires m >= 1, got m=" + std::to_string(p.m));
            require(p.m < p.n, "BA requires m < n, got m=" + std::to_string(p.m) +
                                   " n=" + std::to_string(p.n));
          },
          [](const SwParams& p) {
            require(p.n >= 1, "SW requires n >= 1, got n=" + std::to_string(p.n));
            require(p.k >= 0 && p.k % 2 == 0,
                    "SW requires even k >= 0, got k=" + std::to_string(p.k));
            require(p.k < p.n, "SW requires k < n, got k=" + std::to_string(p.k) +
                                   " n=" + std::to_string(p.n));
            require(is_probability(p.p_rewire),
                    "SW requires 0 <= p_rewire <= 1, got p_rewire=" + fmt_double(p.p_rewire));
          },
          [](const TreeParams& p) {
            require(p.depth >= 1,
                    "TREE requires depth >= 1, got depth=" + std::to_string(p.depth));
            require(p.depth <= kMaxTreeDepth, "TREE depth above supported maximum 20");
          },
          [](const ObservedParams&) {},
      },
      params);
}

Graph gen_graph(const GenParams& params, Seed seed) {
  validate(params);
  Rng rng = make_rng(seed);
  return std::visit(Overloaded{
                        [&](const ErParams& p) { return gen_er(p, rng); },
                        [&](const BaParams& p) { return gen_ba(p, rng); },
                        [&](const SwParams& p) { return gen_sw(p, rng); },
                        [&](const TreeParams& p) { return gen_tree(p); },
                        [&](const ObservedParams&) -> Graph {
                          throw ValidationError("cannot generate graphs of the observed family");
                        },
                    },
                    params);
}

Graph assign_uniform_attribute(Graph g, Seed seed) {
  Rng rng = make_rng(seed);
  const double value = uniform01(rng);
  g.set_attributes(std::vector<double>(static_cast<std::size_t>(g.num_nodes()), value));
  return g;
}

Graph randomize_attributes(Graph g, double delta_omega, Seed seed) {
  if (!g.has_attributes()) {
    throw ValidationError("randomize_attributes requires a graph with attributes");
  }
  if (!is_probability(delta_omega)) {
    throw ValidationError("randomization degree must lie in [0, 1], got " +
                          fmt_double(delta_omega));
  }
  const int n = g.num_nodes();
  const int count = std::min(n, static_cast<int>(std::floor(delta_omega * n + 0.5)));
  if (count == 0) return g;
  Rng rng = make_rng(seed);
  std::vector<int> nodes(static_cast<std::size_t>(n));
  std::iota(nodes.begin(), nodes.end(), 0);
  std::vector<double> attrs = g.attributes();
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<int>(uniform_int(rng, i, n - 1));
    std::swap(nodes[i], nodes[j]);
    attrs[nodes[i]] = uniform01(rng);
  }
  g.set_attributes(std::move(attrs));
  return g;
}

Dataset gen_dataset(const DatasetSpec& spec, int threads) {
  if (spec.count < 1) {
    throw ValidationError("dataset count must be >= 1, got " + std::to_string(spec.count));
  }
  validate_ranges(spec.family, spec.ranges);

  Dataset out;
  out.records.resize(static_cast<std::size_t>(spec.count));
  auto build = [&](std::size_t i) {
    Rng rng = make_rng(derive_seed(spec.seed, i, 0));
    GenParams params = sample_params(spec.family, spec.ranges, rng);
    Graph g = gen_graph(params, derive_seed(spec.seed, i, 1));
    if (spec.attributes) g = assign_uniform_attribute(std::move(g), derive_seed(spec.seed, i, 2));
    out.records[i] = Record{std::move(g), std::move(params)};
  };

  const std::size_t workers =
      std::clamp<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), 1, out.records.size());
  if (workers == 1) {
    for (std::size_t i = 0; i < out.records.size(); ++i) build(i);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < out.records.size(); i += workers) build(i);
      });
    }
    for (auto& t : pool) t.join();
  }
  for (const auto& r : out.records) out.n_max = std::max(out.n_max, r.graph.num_nodes());
  return out;
}

}  // namespace graphdis
