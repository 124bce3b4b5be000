#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "graphdis/param_store.hpp"
#include "graphdis/training.hpp"

namespace graphdis {

constexpr std::uint32_t kCheckpointVersion = 1;

// Binary layout (all integers little-endian):
//   8 bytes  magic "GDVAECKP"
//   u32      format version
//   u64      header length L
//   L bytes  JSON header: {"format_version", "config", "step",
//                          "params": [{"name", "shape"}, ...]}
//   f64[]    raw little-endian values of each parameter in header order
//   u64      FNV-1a hash of every preceding byte
std::string serialize_checkpoint(const ParamStore& weights, const TrainConfig& cfg);

struct Checkpoint {
  ParamStore weights;
  TrainConfig config;
};

// Throws FormatError on bad magic, version mismatch, truncation or checksum
// failure; nothing is returned on error.
Checkpoint deserialize_checkpoint(const std::string& bytes);

void save_checkpoint(const ParamStore& weights, const TrainConfig& cfg,
                     const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

nlohmann::ordered_json config_to_json(const TrainConfig& cfg);
TrainConfig config_from_json(const nlohmann::json& j);

}  // namespace graphdis
