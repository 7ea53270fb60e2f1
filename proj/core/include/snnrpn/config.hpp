#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "snnrpn/meanshift.hpp"
#include "snnrpn/pipeline.hpp"

// Flat key-value configuration shared by the pipeline and the baseline.
//
//   # comment
//   sensor_height = 180
//   conv_v_th = 8
//   lateral = true
//
// Unknown keys and malformed values are errors.
namespace snnrpn {

struct RunConfig {
    PipelineConfig pipeline;
    meanshift::MsConfig meanshift;
};

// Throws ConfigError naming the key.
void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value);

// Parses "key=value" (used for command-line overrides).
void apply_assignment(RunConfig& cfg, const std::string& assignment);

RunConfig parse_config(std::istream& in, RunConfig base = {});
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

// Writes every key with its current value, in documented order.
void write_config(std::ostream& out, const RunConfig& cfg);

std::vector<std::string> config_keys();

}  // namespace snnrpn
