#include <fstream>

#include <gtest/gtest.h>

#include "gd_app.hpp"
#include "graphdis/error.hpp"
#include "graphdis/recipes.hpp"
#include "helpers.hpp"

using namespace graphdis;
using nlohmann::json;

namespace {

void write(const std::filesystem::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

VerifyOptions options_in(const std::filesystem::path& dir) {
  VerifyOptions opt;
  opt.work_dir = dir;
  opt.runner = [](const std::string&) { return 0; };
  return opt;
}

}  // namespace

TEST(Recipes, EmptyListPasses) {
  const auto report = verify_recipes(parse_recipes(json::array()), VerifyOptions{});
  EXPECT_TRUE(report.passed());
  EXPECT_TRUE(report.outcomes.empty());
}

TEST(Recipes, ParsesBothLayouts) {
  const json one = {{"name", "a"},
                    {"criterion", 3},
                    {"commands", {"echo hi", {{"run", "echo x"}, {"creates", {"x.json"}}}}},
                    {"checks", json::array()}};
  const auto a = parse_recipes(json::array({one}));
  const auto b = parse_recipes(json{{"recipes", {one}}});
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].criterion, 3);
  EXPECT_EQ(a[0].commands[1].creates, (std::vector<std::string>{"x.json"}));
  EXPECT_EQ(b[0].commands[0].run, "echo hi");
  EXPECT_THROW(parse_recipes(json{{"recipes", {{{"name", "x"}, {"checks", {{{"kind", "nope"}}}}}}}}),
               FormatError);
}

TEST(Recipes, Substitution) {
  EXPECT_EQ(substitute("{gd} mig --out {work}/m.json {unknown}",
                       {{"gd", "/bin/gd"}, {"work", "w"}}),
            "/bin/gd mig --out w/m.json {unknown}");
}

TEST(Recipes, ImpossibleThresholdFails) {
  const auto dir = gdtest::temp_dir("recipes_threshold");
  write(dir / "mig.json", R"({"score": 0.4})");
  const json doc = json::array({{{"name", "mig"},
                                 {"commands", json::array()},
                                 {"checks",
                                  {{{"kind", "json"},
                                    {"file", "mig.json"},
                                    {"pointer", "/score"},
                                    {"op", ">"},
                                    {"value", 1.0}}}}}});
  const auto report = verify_recipes(parse_recipes(doc), options_in(dir));
  EXPECT_FALSE(report.passed());
  ASSERT_EQ(report.outcomes[0].failures.size(), 1u);

  json ok = doc;
  ok[0]["checks"][0]["op"] = ">=";
  ok[0]["checks"][0]["value"] = 0.35;
  EXPECT_TRUE(verify_recipes(parse_recipes(ok), options_in(dir)).passed());
}

TEST(Recipes, CompositeChecks) {
  const auto dir = gdtest::temp_dir("recipes_composite");
  write(dir / "a.json", R"({"score": 0.5, "j": 2, "top": [0, 1]})");
  write(dir / "b.json", R"({"score": 0.3, "j": 2, "top": [0, 1]})");
  write(dir / "c.json", R"({"score": 0.1, "j": 2, "top": [2, 3]})");
  const json checks = {
      {{"kind", "same_bytes"}, {"a", "a.json"}, {"b", "a.json"}},
      {{"kind", "not_in"}, {"file", "a.json"}, {"pointer", "/j"}, {"ref_file", "c.json"},
       {"ref_pointer", "/top"}},
      {{"kind", "median_compare"}, {"lhs", {"a.json", "b.json", "c.json"}},
       {"rhs", {"c.json", "c.json", "b.json"}}, {"pointer", "/score"}, {"op", ">="}},
      {{"kind", "at_least"},
       {"count", 2},
       {"checks",
        {{{"kind", "json"}, {"file", "a.json"}, {"pointer", "/score"}, {"op", ">="}, {"value", 0.35}},
         {{"kind", "json"}, {"file", "b.json"}, {"pointer", "/score"}, {"op", ">="}, {"value", 0.35}},
         {{"kind", "json"}, {"file", "c.json"}, {"pointer", "/score"}, {"op", ">="}, {"value", 0.35}}}}}};
  const auto report = verify_recipes(
      parse_recipes(json::array({{{"name", "c"}, {"commands", json::array()}, {"checks", checks}}})),
      options_in(dir));
  ASSERT_EQ(report.outcomes.size(), 1u);
  // not_in fails (2 is listed), at_least fails (only one score >= 0.35).
  EXPECT_EQ(report.outcomes[0].failures.size(), 2u);
}

TEST(Recipes, CommandsStopAtFirstFailureAndSkipExistingOutputs) {
  const auto dir = gdtest::temp_dir("recipes_commands");
  write(dir / "done.txt", "x");
  std::vector<std::string> ran;
  VerifyOptions opt;
  opt.work_dir = dir;
  opt.vars = {{"work", dir.string()}};
  opt.runner = [&](const std::string& c) {
    ran.push_back(c);
    return c == "fail" ? 3 : 0;
  };
  const json doc = json::array(
      {{{"name", "r"},
        {"commands",
         {{{"run", "skip"}, {"creates", {"done.txt"}}}, "first {work}", "fail", "never"}},
        {"checks", json::array()}}});
  const auto report = verify_recipes(parse_recipes(doc), opt);
  EXPECT_FALSE(report.passed());
  EXPECT_EQ(ran, (std::vector<std::string>{"first " + dir.string(), "fail"}));
}

TEST(Recipes, StaticFlagCheck) {
  const json doc = json::array(
      {{{"name", "good"}, {"commands", {"{gd} gen --family er --count 3 --out x.jsonl"}},
        {"checks", json::array()}},
       {{"name", "bad"}, {"commands", {"{gd} mig --bogus 1 && {gd} fly --x"}},
        {"checks", json::array()}}});
  const auto problems = check_recipe_flags(parse_recipes(doc), "{gd}", gdcli::knows_flag);
  ASSERT_EQ(problems.size(), 2u);
  EXPECT_NE(problems[0].find("--bogus"), std::string::npos);
  EXPECT_NE(problems[1].find("fly"), std::string::npos);
}
