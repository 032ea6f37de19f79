#include "hipmdp/bnn/checkpoint.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

#include "hipmdp/ndcore/checkpoint.hpp"
#include "json.hpp"

namespace hipmdp::bnn {

std::string_view to_string(ModelForm f) {
  switch (f) {
    case ModelForm::embedded: return "embedded";
    case ModelForm::linear: return "linear";
    case ModelForm::plain: return "plain";
  }
  return "?";
}

ModelForm parse_model_form(std::string_view s) {
  if (s == "embedded") return ModelForm::embedded;
  if (s == "linear") return ModelForm::linear;
  if (s == "plain") return ModelForm::plain;
  throw std::invalid_argument("unknown model form '" + std::string(s) + "'");
}

void save_posterior(const std::filesystem::path& json_path, const WeightPosterior& q) {
  auto bin_path = json_path;
  bin_path.replace_extension(".bin");
  nlohmann::json h;
  h["form"] = std::string(to_string(q.shape.form));
  h["state_dim"] = q.shape.state_dim;
  h["action_count"] = q.shape.action_count;
  h["latent_dim"] = q.shape.latent_dim;
  h["hidden"] = q.shape.hidden;
  h["angular"] = q.shape.angular;
  h["layer_widths"] = q.spec.widths();
  h["count"] = q.param_count();
  h["noise_log_variance"] = q.noise_log_variance;
  h["input_noise_variance"] = q.input_noise_variance;
  h["standardizer"] = {{"state_mean", q.standardizer.state_mean},
                       {"state_scale", q.standardizer.state_scale},
                       {"delta_mean", q.standardizer.delta_mean},
                       {"delta_scale", q.standardizer.delta_scale}};
  h["data_file"] = bin_path.filename().string();
  h["layout"] = "mean[count] then log_variance[count]";
  std::ofstream out(json_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open for writing: " + json_path.string());
  out << h.dump(2) << '\n';
  std::vector<double> flat(q.mean);
  flat.insert(flat.end(), q.log_variance.begin(), q.log_variance.end());
  ndcore::write_f64_le(bin_path, flat);
}

WeightPosterior load_posterior(const std::filesystem::path& json_path) {
  std::ifstream in(json_path);
  if (!in) throw std::runtime_error("cannot open for reading: " + json_path.string());
  const auto h = nlohmann::json::parse(in);
  WeightPosterior q;
  q.shape.form = parse_model_form(h.at("form").get<std::string>());
  q.shape.state_dim = h.at("state_dim");
  q.shape.action_count = h.at("action_count");
  q.shape.latent_dim = h.at("latent_dim");
  q.shape.hidden = h.at("hidden").get<std::vector<std::size_t>>();
  q.shape.angular = h.at("angular").get<std::vector<bool>>();
  q.spec = q.shape.net_spec();
  q.noise_log_variance = h.at("noise_log_variance").get<std::vector<double>>();
  q.input_noise_variance = h.at("input_noise_variance");
  const auto& st = h.at("standardizer");
  q.standardizer.state_mean = st.at("state_mean").get<std::vector<double>>();
  q.standardizer.state_scale = st.at("state_scale").get<std::vector<double>>();
  q.standardizer.delta_mean = st.at("delta_mean").get<std::vector<double>>();
  q.standardizer.delta_scale = st.at("delta_scale").get<std::vector<double>>();
  const std::size_t count = h.at("count");
  if (count != q.spec.param_count()) throw std::runtime_error("posterior count mismatch: " + json_path.string());
  const auto flat = ndcore::read_f64_le(json_path.parent_path() / h.at("data_file").get<std::string>());
  if (flat.size() != 2 * count) throw std::runtime_error("posterior data size mismatch: " + json_path.string());
  q.mean.assign(flat.begin(), flat.begin() + static_cast<std::ptrdiff_t>(count));
  q.log_variance.assign(flat.begin() + static_cast<std::ptrdiff_t>(count), flat.end());
  return q;
}

}  // namespace hipmdp::bnn
