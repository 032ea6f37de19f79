#include "hipmdp/ndcore/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace hipmdp::ndcore {

void write_f64_le(const std::filesystem::path& path, std::span<const double> values) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  std::vector<unsigned char> bytes(values.size() * 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto bits = std::bit_cast<std::uint64_t>(values[i]);
    for (int b = 0; b < 8; ++b) bytes[i * 8 + b] = static_cast<unsigned char>(bits >> (8 * b));
  }
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<double> read_f64_le(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() % 8 != 0) throw std::runtime_error("truncated float64 file: " + path.string());
  std::vector<double> values(bytes.size() / 8);
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[i * 8 + b]) << (8 * b);
    values[i] = std::bit_cast<double>(bits);
  }
  return values;
}

void save_params(const std::filesystem::path& json_path, const NetSpec& spec, const ParamVector& params,
                 const std::string& role) {
  if (params.size() != spec.param_count()) throw std::invalid_argument("save_params: size mismatch");
  auto bin_path = json_path;
  bin_path.replace_extension(".bin");
  nlohmann::json header;
  header["layer_widths"] = spec.widths();
  header["count"] = params.size();
  header["role"] = role;
  header["data_file"] = bin_path.filename().string();
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + json_path.string());
  out << header.dump(2) << '\n';
  write_f64_le(bin_path, params.span());
}

ParamCheckpoint load_params(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open for reading: " + json_path.string());
  const auto header = nlohmann::json::parse(in);
  ParamCheckpoint ck;
  ck.spec = NetSpec(header.at("layer_widths").get<std::vector<std::size_t>>());
  ck.role = header.value("role", "");
  auto values = read_f64_le(json_path.parent_path() / header.at("data_file").get<std::string>());
  if (values.size() != header.at("count").get<std::size_t>() || values.size() != ck.spec.param_count())
    throw std::runtime_error("checkpoint count mismatch: " + json_path.string());
  ck.params = ParamVector(std::move(values));
  return ck;
}

}  // namespace hipmdp::ndcore
