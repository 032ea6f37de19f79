#include "hipmdp/harness/io.hpp"

#include <openssl/evp.h>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "hipmdp/envs/acrobot.hpp"
#include "hipmdp/envs/hiv.hpp"
#include "hipmdp/envs/nav2d.hpp"

namespace hipmdp::harness {
namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string constants_text() {
  namespace n = envs::nav2d;
  namespace a = envs::acrobot;
  namespace h = envs::hiv;
  std::ostringstream out;
  auto put = [&](std::string_view key, double v) { out << key << '=' << g17(v) << '\n'; };
  put("nav2d.step_size", n::kStepSize);
  put("nav2d.wind", n::kWind);
  put("nav2d.arena_half_width", n::kArenaHalfWidth);
  put("nav2d.start_lo", n::kStartLo);
  put("nav2d.start_hi", n::kStartHi);
  put("nav2d.wind_center", n::kWindCenter);
  put("nav2d.goal_lo", n::kGoalLo);
  put("nav2d.goal_hi", n::kGoalHi);
  put("nav2d.step_reward", n::kStepReward);
  put("nav2d.wall_reward", n::kWallReward);
  put("nav2d.goal_reward", n::kGoalReward);
  put("nav2d.step_cap", n::kStepCap);
  put("acrobot.com_length", a::kComLength);
  put("acrobot.inertia", a::kInertia);
  put("acrobot.gravity", a::kGravity);
  put("acrobot.dt", a::kDt);
  put("acrobot.substeps", a::kSubsteps);
  put("acrobot.max_vel1", a::kMaxVel1);
  put("acrobot.max_vel2", a::kMaxVel2);
  put("acrobot.reset_noise", a::kResetNoise);
  put("acrobot.goal_reward", a::kGoalReward);
  put("acrobot.step_cap", a::kStepCap);
  out << "hiv.table_version=" << h::kTableVersion << '\n';
  for (std::size_t i = 0; i < h::kParamCount; ++i) put("hiv." + std::string(h::kParamNames[i]), h::kBaseline[i]);
  for (std::size_t i = 0; i < h::kUnhealthyState.size(); ++i)
    put("hiv.initial_state." + std::to_string(i), h::kUnhealthyState[i]);
  put("hiv.step_days", h::kStepDays);
  put("hiv.substeps", h::kSubsteps);
  put("hiv.step_cap", h::kStepCap);
  return out.str();
}

std::string git_blob_sha1(std::string_view content) {
  const std::string header = "blob " + std::to_string(content.size()) + '\0';
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
  const bool ok = EVP_DigestInit_ex(ctx, EVP_sha1(), nullptr) == 1 &&
                  EVP_DigestUpdate(ctx, header.data(), header.size()) == 1 &&
                  EVP_DigestUpdate(ctx, content.data(), content.size()) == 1 &&
                  EVP_DigestFinal_ex(ctx, md, &len) == 1;
  EVP_MD_CTX_free(ctx);
  if (!ok) throw std::runtime_error("SHA-1 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return nlohmann::json::parse(in);
}

std::string format_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.run_id << ',' << r.domain << ',' << r.variant << ',' << r.seed << ',' << r.result.episode << ','
      << g17(r.result.total_reward) << ',' << r.result.steps << ',' << r.result.wall_ms << ',';
  if (r.result.model_mse) out << g17(*r.result.model_mse);
  return out.str();
}

void append_results(const std::filesystem::path& path, const std::vector<ResultRow>& rows) {
  const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open for appending: " + path.string());
  if (fresh) out << kResultsSchema << "\nrun_id,domain,variant,seed,episode,total_reward,steps,wall_ms,model_mse\n";
  for (const auto& r : rows) out << format_row(r) << '\n';
  out.flush();
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ResultRow> read_results(const std::filesystem::path& path) {
  std::vector<ResultRow> rows;
  std::ifstream in(path);
  if (!in) return rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("run_id,", 0) == 0) continue;
    const auto c = split(line);
    if (c.size() < 9) continue;  // a partially written trailing line
    ResultRow r;
    r.run_id = c[0];
    r.domain = c[1];
    r.variant = c[2];
    r.seed = std::stoull(c[3]);
    r.result.episode = std::stoull(c[4]);
    r.result.total_reward = std::stod(c[5]);
    r.result.steps = std::stoi(c[6]);
    r.result.wall_ms = std::stoll(c[7]);
    if (!c[8].empty()) r.result.model_mse = std::stod(c[8]);
    rows.push_back(std::move(r));
  }
  return rows;
}

std::set<std::pair<std::string, std::uint64_t>> completed_runs(const std::filesystem::path& path,
                                                               std::string_view domain, std::size_t episodes) {
  std::map<std::pair<std::string, std::uint64_t>, std::size_t> counts;
  for (const auto& r : read_results(path))
    if (r.domain == domain) ++counts[{r.variant, r.seed}];
  std::set<std::pair<std::string, std::uint64_t>> done;
  for (const auto& [k, n] : counts)
    if (n >= episodes) done.insert(k);
  return done;
}

}  // namespace hipmdp::harness
