#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hipmdp/ndcore/net.hpp"

namespace hipmdp::ndcore {

/// Little-endian IEEE-754 float64 array, no header.
void write_f64_le(const std::filesystem::path& path, std::span<const double> values);
std::vector<double> read_f64_le(const std::filesystem::path& path);

struct ParamCheckpoint {
  NetSpec spec;
  ParamVector params;
  std::string role;  // e.g. "primary" / "target"; may be empty
};

/// Writes `<stem>.json` with {"layer_widths", "count", "role", "data_file"}
/// and the sidecar `<stem>.bin`. Round trip is bit-exact.
void save_params(const std::filesystem::path& json_path, const NetSpec& spec, const ParamVector& params,
                 const std::string& role = "");
ParamCheckpoint load_params(const std::filesystem::path& json_path);

}  // namespace hipmdp::ndcore
