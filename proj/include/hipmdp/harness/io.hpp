#pragma once

#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hipmdp/orchestrator/learner.hpp"
#include "json.hpp"

namespace hipmdp::harness {

inline constexpr std::string_view kResultsSchema = "# schema: results v1";
inline constexpr std::string_view kCompareSchema = "# schema: compare-models v1";
inline constexpr std::string_view kBenchSchema = "# schema: bench-scaling v1";

/// Canonical text of every environment constant (nav2d geometry, acrobot
/// physics, the HIV parameter table).
std::string constants_text();

/// Git blob id: SHA-1 of "blob <len>\0" + content, lowercase hex.
std::string git_blob_sha1(std::string_view content);

inline std::string constants_hash() { return git_blob_sha1(constants_text()); }

void ensure_dir(const std::filesystem::path& dir);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

struct ResultRow {
  std::string run_id;
  std::string domain;
  std::string variant;
  std::uint64_t seed = 0;
  orchestrator::EpisodeResult result;
};

std::string format_row(const ResultRow& r);

/// Appends rows, writing the schema line and header when the file is new.
void append_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows);

std::vector<ResultRow> read_results(const std::filesystem::path& path);

/// (variant, seed) pairs of `domain` with at least `episodes` rows.
std::set<std::pair<std::string, std::uint64_t>> completed_runs(const std::filesystem::path& path,
                                                               std::string_view domain, std::size_t episodes);

}  // namespace hipmdp::harness
