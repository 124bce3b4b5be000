#include "graphdis/dataset_io.hpp"

#include <fstream>
#include <sstream>

#include "graphdis/error.hpp"

namespace graphdis {

namespace {

bool is_integer_factor(Family family, const std::string& name) {
  if (family == Family::kER) return name == "n";
  return name != "p_rewire";
}

}  // namespace

OrderedJson record_to_json(const Record& record) {
  const Family family = family_of(record.params);
  OrderedJson j;
  j["family"] = family_name(family);
  OrderedJson params = OrderedJson::object();
  const auto names = factor_names(family);
  const auto values = factor_values(record.params);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (is_integer_factor(family, names[i])) {
      params[names[i]] = static_cast<long long>(values[i]);
    } else {
      params[names[i]] = values[i];
    }
  }
  j["params"] = std::move(params);
  j["n"] = record.graph.num_nodes();
  OrderedJson edges = OrderedJson::array();
  for (const auto& [u, v] : record.graph.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  if (record.graph.has_attributes()) j["attrs"] = record.graph.attributes();
  return j;
}

Record record_from_json(const nlohmann::json& j) {
  try {
    const Family family = parse_family(j.at("family").get<std::string>());
    std::map<std::string, double> values;
    for (const auto& [key, value] : j.at("params").items()) {
      values[key] = value.get<double>();
    }
    Record record;
    record.params = make_params(family, values);
    Graph g(j.at("n").get<int>());
    for (const auto& e : j.at("edges")) {
      if (!e.is_array() || e.size() != 2) throw FormatError("edge must be a pair");
      g.add_edge(e[0].get<int>(), e[1].get<int>());
    }
    if (j.contains("attrs")) g.set_attributes(j.at("attrs").get<std::vector<double>>());
    record.graph = std::move(g);
    return record;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed dataset record: ") + e.what());
  }
}

void write_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
  std::string out;
  for (const auto& r : dataset.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  write_file_atomic(path, out);
}

Dataset read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset file " + path.string());
  Dataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      ds.records.push_back(record_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    ds.n_max = std::max(ds.n_max, ds.records.back().graph.num_nodes());
  }
  if (ds.records.empty()) throw FormatError("dataset file " + path.string() + " is empty");
  return ds;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw FormatError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace graphdis
