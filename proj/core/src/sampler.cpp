#include "graphdis/sampler.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>

#include "graphdis/error.hpp"

namespace graphdis {

namespace {

bool parse_id(const std::string& token, long long& out) {
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

}  // namespace

EdgeListLoad parse_edge_list(std::istream& in) {
  std::unordered_map<long long, int> ids;
  std::vector<Edge> edges;
  EdgeListLoad out;
  auto id_of = [&](long long raw) {
    auto [it, inserted] = ids.try_emplace(raw, static_cast<int>(ids.size()));
    return it->second;
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream fields(line);
    std::string a, b, extra;
    long long u = 0, v = 0;
    if (!(fields >> a >> b) || (fields >> extra) || !parse_id(a, u) || !parse_id(b, v)) {
      throw FormatError("edge list line " + std::to_string(line_no) +
                        ": expected two integer node ids, got '" + line + "'");
    }
    const int iu = id_of(u);
    const int iv = id_of(v);
    if (iu == iv) {
      ++out.self_loops_dropped;
      continue;
    }
    edges.emplace_back(iu, iv);
  }
  if (ids.empty()) throw FormatError("edge list contains no nodes");

  Graph g(static_cast<int>(ids.size()));
  for (const auto& [u, v] : edges) {
    if (!g.add_edge(u, v)) ++out.duplicates_dropped;
  }
  out.graph = std::move(g);
  return out;
}

EdgeListLoad load_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open edge list " + path.string());
  return parse_edge_list(in);
}

void validate(const WalkConfig& cfg) {
  if (cfg.walk_length < 1) throw ValidationError("walk_length must be >= 1");
  if (!(cfg.p_return > 0.0)) throw ValidationError("p_return must be > 0");
  if (!(cfg.q_inout > 0.0)) throw ValidationError("q_inout must be > 0");
  if (cfg.max_nodes < 1) throw ValidationError("max_nodes must be >= 1");
}

std::vector<std::pair<int, double>> transition_probabilities(const Graph& g, int previous,
                                                             int current,
                                                             const WalkConfig& cfg) {
  std::vector<std::pair<int, double>> out;
  const auto& nbrs = g.neighbors(current);
  out.reserve(nbrs.size());
  double total = 0.0;
  for (int x : nbrs) {
    double w = 1.0;
    if (previous >= 0) {
      if (x == previous) {
        w = 1.0 / cfg.p_return;
      } else if (!g.has_edge(x, previous)) {
        w = 1.0 / cfg.q_inout;
      }
    }
    out.emplace_back(x, w);
    total += w;
  }
  for (auto& [x, w] : out) w /= total;
  return out;
}

std::vector<int> random_walk(const Graph& g, const WalkConfig& cfg, Seed seed) {
  validate(cfg);
  if (g.num_nodes() < 1) throw ValidationError("random walk requires at least one node");
  Rng rng = make_rng(seed);
  int current = static_cast<int>(uniform_int(rng, 0, g.num_nodes() - 1));
  int previous = -1;
  std::vector<int> walk{current};
  std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes()), false);
  seen[current] = true;
  int distinct = 1;
  for (int step = 0; step < cfg.walk_length && distinct < cfg.max_nodes; ++step) {
    if (g.degree(current) == 0) break;
    const auto probs = transition_probabilities(g, previous, current, cfg);
    double u = uniform01(rng);
    int next = probs.back().first;
    for (const auto& [x, p] : probs) {
      if (u < p) {
        next = x;
        break;
      }
      u -= p;
    }
    previous = current;
    current = next;
    walk.push_back(current);
    if (!seen[current]) {
      seen[current] = true;
      ++distinct;
    }
  }
  return walk;
}

Graph rw_sample(const Graph& g, const WalkConfig& cfg, Seed seed) {
  const auto walk = random_walk(g, cfg, seed);
  std::vector<int> nodes;
  std::vector<bool> seen(static_cast<std::size_t>(g.num_nodes()), false);
  for (int v : walk) {
    if (seen[v]) continue;
    seen[v] = true;
    nodes.push_back(v);
    if (static_cast<int>(nodes.size()) == cfg.max_nodes) break;
  }
  return g.induced_subgraph(nodes);
}

}  // namespace graphdis
