#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "graphdis/graphgen.hpp"

namespace graphdis {

using OrderedJson = nlohmann::ordered_json;

// One JSON Lines record:
//   {"family":"ER","params":{"n":7,"p":0.31},"n":7,"edges":[[0,3],...],"attrs":[...]}
// Edges are listed once with i < j; "attrs" is omitted when absent.
OrderedJson record_to_json(const Record& record);
Record record_from_json(const nlohmann::json& j);

void write_jsonl(const Dataset& dataset, const std::filesystem::path& path);
Dataset read_jsonl(const std::filesystem::path& path);

// Writes `contents` to a sibling temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

}  // namespace graphdis
