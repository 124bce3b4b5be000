#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace graphdis {

// A shell command; skipped when every path in `creates` already exists.
struct RecipeCommand {
  std::string run;
  std::vector<std::string> creates;
};

// Check kinds:
//   json           file + pointer compared to value with op (< <= == != >= >)
//   same_bytes     files a and b are byte-identical
//   not_in         value at file/pointer absent from array at ref_file/ref_pointer
//   median_compare median over lhs files op median over rhs files, both at pointer
//   all            every nested check passes
//   at_least       at least `count` nested checks pass
struct RecipeCheck {
  std::string kind;
  nlohmann::json spec;
};

struct ReproRecipe {
  std::string name;
  int criterion = 0;
  std::string target;
  std::string expected;
  std::vector<RecipeCommand> commands;
  std::vector<RecipeCheck> checks;
};

std::vector<ReproRecipe> parse_recipes(const nlohmann::json& doc);
std::vector<ReproRecipe> load_recipes(const std::filesystem::path& path);

// Replaces {name} tokens with vars[name]. Unknown tokens are left as is.
std::string substitute(const std::string& text, const std::map<std::string, std::string>& vars);

struct RecipeOutcome {
  std::string name;
  bool passed = false;
  std::vector<std::string> failures;
};

struct RecipeReport {
  std::vector<RecipeOutcome> outcomes;
  bool passed() const;
  nlohmann::ordered_json to_json() const;
};

// Returns the command's exit status.
using CommandRunner = std::function<int(const std::string& command)>;
int shell_runner(const std::string& command);

struct VerifyOptions {
  std::map<std::string, std::string> vars;
  std::filesystem::path work_dir = ".";  // base for relative check paths
  CommandRunner runner = shell_runner;
  std::vector<std::string> only;  // recipe names; empty runs all
};

RecipeReport verify_recipes(const std::vector<ReproRecipe>& recipes, const VerifyOptions& options);

// Static check of every command beginning with `tool_token`: the next word
// must be a subcommand and each --flag must be known to it.
using FlagLookup = std::function<bool(const std::string& subcommand, const std::string& flag)>;
std::vector<std::string> check_recipe_flags(const std::vector<ReproRecipe>& recipes,
                                            const std::string& tool_token,
                                            const FlagLookup& known);

}  // namespace graphdis
