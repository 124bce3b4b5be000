#include "graphdis/recipes.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

#include "graphdis/dataset_io.hpp"
#include "graphdis/error.hpp"

namespace graphdis {

namespace {

using json = nlohmann::json;

const std::vector<std::string> kKinds{"json", "same_bytes", "not_in", "median_compare", "all",
                                      "at_least"};

RecipeCheck parse_check(const json& js) {
  if (!js.is_object() || !js.contains("kind") || !js["kind"].is_string())
    throw FormatError("recipe check needs a string 'kind'");
  RecipeCheck c{js["kind"].get<std::string>(), js};
  if (std::find(kKinds.begin(), kKinds.end(), c.kind) == kKinds.end())
    throw FormatError("unknown recipe check kind '" + c.kind + "'");
  if (c.kind == "all" || c.kind == "at_least") {
    if (!js.contains("checks") || !js["checks"].is_array())
      throw FormatError(c.kind + " check needs a 'checks' array");
    for (const auto& sub : js["checks"]) parse_check(sub);
  }
  return c;
}

bool compare(double lhs, const std::string& op, double rhs) {
  if (op == "<") return lhs < rhs;
  if (op == "<=") return lhs <= rhs;
  if (op == "==") return lhs == rhs;
  if (op == "!=") return lhs != rhs;
  if (op == ">=") return lhs >= rhs;
  if (op == ">") return lhs > rhs;
  throw FormatError("unknown comparison '" + op + "'");
}

struct Evaluator {
  const VerifyOptions& options;

  std::filesystem::path resolve(const std::string& p) const {
    std::filesystem::path path(substitute(p, options.vars));
    return path.is_absolute() ? path : options.work_dir / path;
  }

  json lookup(const std::string& file, const std::string& pointer) const {
    const json doc = json::parse(read_file(resolve(file)));
    return doc.at(json::json_pointer(pointer));
  }

  double number(const std::string& file, const std::string& pointer) const {
    const json v = lookup(file, pointer);
    if (v.is_boolean()) return v.get<bool>() ? 1.0 : 0.0;
    return v.get<double>();
  }

  // Returns an empty string on success, else a description of the failure.
  std::string eval(const json& js) const {
    const std::string kind = js.at("kind").get<std::string>();
    try {
      if (kind == "json") {
        const std::string file = js.at("file"), pointer = js.at("pointer"), op = js.at("op");
        const double value = js.at("value").get<double>();
        const double got = number(file, pointer);
        if (compare(got, op, value)) return {};
        std::ostringstream os;
        os << file << pointer << " = " << got << ", wanted " << op << ' ' << value;
        return os.str();
      }
      if (kind == "same_bytes") {
        const std::string a = js.at("a"), b = js.at("b");
        if (read_file(resolve(a)) == read_file(resolve(b))) return {};
        return a + " and " + b + " differ";
      }
      if (kind == "not_in") {
        const json v = lookup(js.at("file"), js.at("pointer"));
        const json ref = lookup(js.at("ref_file"), js.at("ref_pointer"));
        for (const auto& r : ref)
          if (r == v) return "value " + v.dump() + " found in " + ref.dump();
        return {};
      }
      if (kind == "median_compare") {
        const std::string pointer = js.at("pointer"), op = js.at("op");
        auto median = [&](const json& files) {
          std::vector<double> xs;
          for (const auto& f : files) xs.push_back(number(f.get<std::string>(), pointer));
          if (xs.empty()) throw FormatError("median over no files");
          std::sort(xs.begin(), xs.end());
          const std::size_t m = xs.size() / 2;
          return xs.size() % 2 ? xs[m] : 0.5 * (xs[m - 1] + xs[m]);
        };
        const double lhs = median(js.at("lhs")), rhs = median(js.at("rhs"));
        if (compare(lhs, op, rhs)) return {};
        std::ostringstream os;
        os << "median " << lhs << " not " << op << " median " << rhs;
        return os.str();
      }
      std::vector<std::string> failed;
      for (const auto& sub : js.at("checks")) {
        auto f = eval(sub);
        if (!f.empty()) failed.push_back(f);
      }
      const std::size_t total = js.at("checks").size();
      const std::size_t need =
          kind == "all" ? total : static_cast<std::size_t>(js.at("count").get<int>());
      if (total - failed.size() >= need) return {};
      std::ostringstream os;
      os << kind << ": " << total - failed.size() << " of " << total << " passed, needed "
         << need;
      for (const auto& f : failed) os << "; " << f;
      return os.str();
    } catch (const Error& e) {
      return kind + ": " + e.what();
    } catch (const json::exception& e) {
      return kind + ": " + e.what();
    }
  }
};

std::vector<std::string> split_words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> words;
  for (std::string w; is >> w;) words.push_back(w);
  return words;
}

}  // namespace

std::vector<ReproRecipe> parse_recipes(const nlohmann::json& doc) {
  const json& list = doc.is_object() ? doc.at("recipes") : doc;
  if (!list.is_array()) throw FormatError("recipe file must hold a list of recipes");
  std::vector<ReproRecipe> out;
  for (const auto& js : list) {
    ReproRecipe r;
    try {
      r.name = js.at("name").get<std::string>();
      r.criterion = js.value("criterion", 0);
      r.target = js.value("target", "");
      r.expected = js.value("expected", "");
      for (const auto& c : js.at("commands")) {
        RecipeCommand cmd;
        if (c.is_string()) {
          cmd.run = c.get<std::string>();
        } else {
          cmd.run = c.at("run").get<std::string>();
          if (c.contains("creates")) {
            const auto& cr = c["creates"];
            if (cr.is_string())
              cmd.creates.push_back(cr.get<std::string>());
            else
              cmd.creates = cr.get<std::vector<std::string>>();
          }
        }
        r.commands.push_back(std::move(cmd));
      }
      for (const auto& c : js.at("checks")) r.checks.push_back(parse_check(c));
    } catch (const json::exception& e) {
      throw FormatError("recipe '" + r.name + "': " + e.what());
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ReproRecipe> load_recipes(const std::filesystem::path& path) {
  try {
    return parse_recipes(json::parse(read_file(path)));
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

std::string substitute(const std::string& text, const std::map<std::string, std::string>& vars) {
  std::string out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      const auto close = text.find('}', i);
      if (close != std::string::npos) {
        auto it = vars.find(text.substr(i + 1, close - i - 1));
        if (it != vars.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

bool RecipeReport::passed() const {
  return std::all_of(outcomes.begin(), outcomes.end(), [](const auto& o) { return o.passed; });
}

nlohmann::ordered_json RecipeReport::to_json() const {
  nlohmann::ordered_json js;
  js["passed"] = passed();
  js["recipes"] = nlohmann::ordered_json::array();
  for (const auto& o : outcomes)
    js["recipes"].push_back({{"name", o.name}, {"passed", o.passed}, {"failures", o.failures}});
  return js;
}

int shell_runner(const std::string& command) {
  const int status = std::system(command.c_str());
  if (status == -1) return -1;
  return WEXITSTATUS(status);
}

RecipeReport verify_recipes(const std::vector<ReproRecipe>& recipes, const VerifyOptions& options) {
  RecipeReport report;
  Evaluator ev{options};
  for (const auto& r : recipes) {
    if (!options.only.empty() &&
        std::find(options.only.begin(), options.only.end(), r.name) == options.only.end())
      continue;
    RecipeOutcome outcome{r.name, true, {}};
    for (const auto& cmd : r.commands) {
      const bool done =
          !cmd.creates.empty() &&
          std::all_of(cmd.creates.begin(), cmd.creates.end(),
                      [&](const std::string& p) { return std::filesystem::exists(ev.resolve(p)); });
      if (done) continue;
      const std::string line = substitute(cmd.run, options.vars);
      const int code = options.runner(line);
      if (code != 0) {
        outcome.failures.push_back("command exited " + std::to_string(code) + ": " + line);
        break;
      }
    }
    if (outcome.failures.empty()) {
      for (const auto& c : r.checks) {
        auto f = ev.eval(c.spec);
        if (!f.empty()) outcome.failures.push_back(f);
      }
    }
    outcome.passed = outcome.failures.empty();
    report.outcomes.push_back(std::move(outcome));
  }
  return report;
}

std::vector<std::string> check_recipe_flags(const std::vector<ReproRecipe>& recipes,
                                            const std::string& tool_token,
                                            const FlagLookup& known) {
  std::vector<std::string> problems;
  for (const auto& r : recipes) {
    for (const auto& cmd : r.commands) {
      const auto words = split_words(cmd.run);
      for (std::size_t i = 0; i < words.size(); ++i) {
        if (words[i] != tool_token) continue;
        if (i + 1 >= words.size()) {
          problems.push_back(r.name + ": missing subcommand");
          continue;
        }
        const std::string sub = words[i + 1];
        if (!known(sub, "")) {
          problems.push_back(r.name + ": unknown subcommand '" + sub + "'");
          continue;
        }
        for (std::size_t k = i + 2; k < words.size(); ++k) {
          const std::string& w = words[k];
          if (w == "&&" || w == ";" || w == "|") break;
          if (w.rfind("--", 0) != 0) continue;
          const std::string flag = w.substr(0, w.find('='));
          if (!known(sub, flag)) problems.push_back(r.name + ": " + sub + " has no flag " + flag);
        }
      }
    }
  }
  return problems;
}

}  // namespace graphdis
