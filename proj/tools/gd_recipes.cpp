#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "gd_app.hpp"
#include "graphdis/dataset_io.hpp"
#include "graphdis/error.hpp"
#include "graphdis/recipes.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Run reproduction recipes and check their thresholds", "gd_recipes"};
  std::string file = "docs/recipes.json";
  std::string gd_bin = "gd";
  std::string bin_dir = ".";
  std::string work = ".";
  std::string report;
  std::vector<std::string> only;
  bool static_only = false;
  app.add_option("--recipes", file, "Recipe file");
  app.add_option("--gd", gd_bin, "Path substituted for {gd}");
  app.add_option("--bin-dir", bin_dir, "Directory substituted for {bin}");
  app.add_option("--work", work, "Working directory substituted for {work}");
  app.add_option("--only", only, "Run only these recipes");
  app.add_option("--report", report, "Write a JSON report here");
  app.add_flag("--static-only", static_only, "Only check that recipes use known flags");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto recipes = graphdis::load_recipes(file);
    const auto problems = graphdis::check_recipe_flags(recipes, "{gd}", gdcli::knows_flag);
    for (const auto& p : problems) std::cerr << "flag check: " << p << "\n";
    if (!problems.empty()) return 1;
    if (static_only) {
      std::cout << recipes.size() << " recipes, flags ok\n";
      return 0;
    }
    std::filesystem::create_directories(work);
    graphdis::VerifyOptions opts;
    opts.vars = {{"gd", gd_bin}, {"bin", bin_dir}, {"work", work}};
    opts.work_dir = work;
    opts.only = only;
    const auto rep = graphdis::verify_recipes(recipes, opts);
    for (const auto& o : rep.outcomes) {
      std::cout << (o.passed ? "PASS " : "FAIL ") << o.name << "\n";
      for (const auto& f : o.failures) std::cout << "  " << f << "\n";
    }
    if (!report.empty()) graphdis::write_file_atomic(report, rep.to_json().dump(2) + "\n");
    return rep.passed() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
