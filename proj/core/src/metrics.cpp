#include "graphdis/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "graphdis/error.hpp"

namespace graphdis {

namespace {

// Maps arbitrary labels to 0..k-1 in ascending label order.
std::vector<int> compact(const std::vector<int>& labels, int* count) {
  std::vector<int> sorted = labels;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<int> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    out[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), labels[i]) -
                              sorted.begin());
  }
  *count = static_cast<int>(sorted.size());
  return out;
}

std::vector<double> column(const Matrix& m, std::size_t c) {
  std::vector<double> out;
  out.reserve(m.size());
  for (const auto& row : m) out.push_back(row[c]);
  return out;
}

std::size_t checked_width(const Matrix& m, const char* what) {
  const std::size_t width = m.empty() ? 0 : m.front().size();
  for (const auto& row : m) {
    if (row.size() != width) throw ValidationError(std::string(what) + " rows differ in length");
  }
  return width;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Top and runner-up entries of `values`; ties keep the lower index on top.
std::pair<int, int> top_two(const std::vector<double>& values) {
  int first = 0;
  for (int j = 1; j < static_cast<int>(values.size()); ++j) {
    if (values[j] > values[first]) first = j;
  }
  int second = first == 0 ? 1 : 0;
  for (int j = 0; j < static_cast<int>(values.size()); ++j) {
    if (j != first && values[j] > values[second]) second = j;
  }
  return {first, second};
}

}  // namespace

std::vector<int> discretize(const std::vector<double>& values, int bins, double min_width) {
  if (bins < 2) throw ValidationError("bins must be >= 2");
  if (values.empty()) throw ValidationError("cannot discretize an empty column");
  std::vector<double> distinct = values;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  std::vector<int> out(values.size());
  if (distinct.size() <= static_cast<std::size_t>(bins) && (min_width <= 0.0 || distinct.size() == 1)) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      out[i] = static_cast<int>(std::lower_bound(distinct.begin(), distinct.end(), values[i]) -
                                distinct.begin());
    }
    return out;
  }
  const double lo = distinct.front();
  const double width = std::max((distinct.back() - lo) / bins, min_width);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const int b = static_cast<int>((values[i] - lo) / width);
    out[i] = std::clamp(b, 0, bins - 1);
  }
  return out;
}

std::vector<int> discretize_factor(const std::vector<double>& values, int bins) {
  const bool integral = std::all_of(values.begin(), values.end(), [](double x) {
    return std::isfinite(x) && std::nearbyint(x) == x;
  });
  if (!integral) return discretize(values, bins);
  return discretize(values, static_cast<int>(std::max<std::size_t>(values.size(), 2)));
}

double entropy(const std::vector<int>& labels) {
  if (labels.empty()) throw ValidationError("entropy of an empty label list");
  int k = 0;
  const auto dense = compact(labels, &k);
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (int l : dense) ++counts[l];
  const double n = static_cast<double>(labels.size());
  double h = 0.0;
  for (std::size_t c : counts) {
    const double p = static_cast<double>(c) / n;
    h -= p * std::log(p);
  }
  return h;
}

double mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) {
    throw ValidationError("mutual information needs equal-length label lists (" +
                          std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw ValidationError("mutual information of empty label lists");
  int ka = 0, kb = 0;
  const auto da = compact(a, &ka);
  const auto db = compact(b, &kb);
  std::vector<std::size_t> joint(static_cast<std::size_t>(ka) * kb, 0);
  std::vector<std::size_t> ca(static_cast<std::size_t>(ka), 0), cb(static_cast<std::size_t>(kb), 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++joint[static_cast<std::size_t>(da[i]) * kb + db[i]];
    ++ca[da[i]];
    ++cb[db[i]];
  }
  const double n = static_cast<double>(a.size());
  // Terms are summed in sorted order so that swapping the arguments yields a
  // bit-identical result.
  std::vector<double> terms;
  for (int x = 0; x < ka; ++x) {
    for (int y = 0; y < kb; ++y) {
      const std::size_t c = joint[static_cast<std::size_t>(x) * kb + y];
      if (c == 0) continue;
      const double cd = static_cast<double>(c);
      const double marginal = static_cast<double>(ca[x]) * static_cast<double>(cb[y]);
      terms.push_back(cd / n * std::log(cd * n / marginal));
    }
  }
  std::sort(terms.begin(), terms.end());
  double mi = 0.0;
  for (double t : terms) mi += t;
  return std::max(mi, 0.0);
}

namespace {

double resolution_at(const std::vector<double>& resolution, std::size_t c, std::size_t j) {
  if (resolution.empty()) return 0.0;
  if (resolution.size() != j) throw ValidationError("latent resolution length does not match J");
  return resolution[c];
}

}  // namespace

MigReport mig(const Matrix& z, const Matrix& v, int bins, std::vector<std::string> factor_names,
              const std::vector<double>& z_resolution) {
  if (z.size() != v.size()) throw ValidationError("latent and factor matrices differ in rows");
  if (z.size() < 2) throw ValidationError("MIG needs at least 2 samples");
  const std::size_t j = checked_width(z, "latent matrix");
  const std::size_t k = checked_width(v, "factor matrix");
  if (j < 2) throw ValidationError("gap requires >= 2 latents");
  if (k < 1) throw ValidationError("MIG needs at least one generative factor");
  if (factor_names.empty()) {
    for (std::size_t f = 0; f < k; ++f) factor_names.push_back("v" + std::to_string(f));
  }
  if (factor_names.size() != k) throw ValidationError("factor name count does not match K");

  std::vector<std::vector<int>> z_labels(j);
  for (std::size_t c = 0; c < j; ++c) {
    z_labels[c] = discretize(column(z, c), bins, resolution_at(z_resolution, c, j));
  }

  MigReport report;
  report.factor_names = std::move(factor_names);
  report.mi.assign(k, std::vector<double>(j, 0.0));
  report.entropy.assign(k, 0.0);
  report.per_factor_gap.assign(k, 0.0);
  report.j_max.assign(k, 0);
  report.excluded.assign(k, false);
  double sum = 0.0;
  int used = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const auto v_labels = discretize_factor(column(v, f), bins);
    report.entropy[f] = entropy(v_labels);
    for (std::size_t c = 0; c < j; ++c) report.mi[f][c] = mutual_information(v_labels, z_labels[c]);
    const auto [first, second] = top_two(report.mi[f]);
    report.j_max[f] = first;
    if (report.entropy[f] <= 0.0) {
      report.excluded[f] = true;
      continue;
    }
    const double gap = (report.mi[f][first] - report.mi[f][second]) / report.entropy[f];
    report.per_factor_gap[f] = std::clamp(gap, 0.0, 1.0);
    sum += report.per_factor_gap[f];
    ++used;
  }
  if (used == 0) throw ValidationError("every generative factor is constant; MIG undefined");
  report.score = sum / used;
  return report;
}

nlohmann::ordered_json MigReport::to_json() const {
  nlohmann::ordered_json j;
  j["score"] = score;
  j["factor_names"] = factor_names;
  j["per_factor_gap"] = per_factor_gap;
  j["j_max"] = j_max;
  j["entropy"] = entropy;
  j["excluded"] = excluded;
  j["mi"] = mi;
  return j;
}

std::string MigReport::mi_csv() const {
  std::ostringstream os;
  os << "factor";
  const std::size_t j = mi.empty() ? 0 : mi.front().size();
  for (std::size_t c = 0; c < j; ++c) os << ",z_" << c;
  os << '\n';
  for (std::size_t f = 0; f < mi.size(); ++f) {
    os << factor_names[f];
    for (double x : mi[f]) os << ',' << fmt(x);
    os << '\n';
  }
  return os.str();
}

AttributeMig mig_attr(const std::vector<double>& delta_omega, const Matrix& delta_z_abs, int bins,
                      const std::vector<double>& z_resolution) {
  if (delta_omega.size() != delta_z_abs.size()) {
    throw ValidationError("randomization degrees and latent shifts differ in length");
  }
  if (delta_omega.size() < 2) throw ValidationError("attribute MIG needs at least 2 samples");
  const std::size_t j = checked_width(delta_z_abs, "latent shift matrix");
  if (j < 2) throw ValidationError("gap requires >= 2 latents");
  const auto w_labels = discretize(delta_omega, bins);
  AttributeMig out;
  out.entropy = entropy(w_labels);
  if (out.entropy <= 0.0) {
    throw ValidationError("randomization degree has zero entropy (single level)");
  }
  out.mi.resize(j);
  for (std::size_t c = 0; c < j; ++c) {
    out.mi[c] = mutual_information(
        w_labels, discretize(column(delta_z_abs, c), bins, resolution_at(z_resolution, c, j)));
  }
  const auto [first, second] = top_two(out.mi);
  out.j_max = first;
  out.score = std::clamp((out.mi[first] - out.mi[second]) / out.entropy, 0.0, 1.0);
  return out;
}

GraphStats graph_stats(const Graph& g) {
  const int n = g.num_nodes();
  if (n < 1) throw ValidationError("graph statistics need at least one node");
  GraphStats s;
  int max_deg = 0;
  for (int v = 0; v < n; ++v) max_deg = std::max(max_deg, g.degree(v));
  s.degree_histogram.assign(static_cast<std::size_t>(max_deg) + 1, 0.0);
  double clustering = 0.0;
  for (int v = 0; v < n; ++v) {
    const int d = g.degree(v);
    s.degree_histogram[d] += 1.0 / n;
    s.avg_degree += static_cast<double>(d) / n;
    if (d < 2) continue;
    const auto& nb = g.neighbors(v);
    std::size_t triangles = 0;
    for (std::size_t a = 0; a < nb.size(); ++a) {
      for (std::size_t b = a + 1; b < nb.size(); ++b) {
        if (g.has_edge(nb[a], nb[b])) ++triangles;
      }
    }
    clustering += static_cast<double>(triangles) / (0.5 * d * (d - 1));
  }
  s.clustering_coefficient = clustering / n;

  std::vector<double> xs, ys;
  for (const auto& [u, v] : g.edges()) {
    xs.push_back(g.degree(u));
    ys.push_back(g.degree(v));
    xs.push_back(g.degree(v));
    ys.push_back(g.degree(u));
  }
  if (xs.size() >= 2) {
    const auto [mx_it, Mx_it] = std::minmax_element(xs.begin(), xs.end());
    if (*mx_it != *Mx_it) s.degree_assortativity = pearson(xs, ys);
  }
  return s;
}

nlohmann::ordered_json GraphStats::to_json() const {
  nlohmann::ordered_json j;
  j["avg_degree"] = avg_degree;
  j["clustering_coefficient"] = clustering_coefficient;
  j["degree_assortativity"] = degree_assortativity;
  j["degree_histogram"] = degree_histogram;
  return j;
}

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw ValidationError("pearson: length mismatch");
  if (xs.size() < 2) throw ValidationError("pearson: need at least 2 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) throw ValidationError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

}  // namespace graphdis
