#pragma once

#include <filesystem>

#include "hipmdp/bnn/posterior.hpp"

namespace hipmdp::bnn {

/// `<stem>.json` holds the model shape, standardization statistics and noise
/// parameters; `<stem>.bin` holds the means followed by the log-variances as
/// little-endian float64. Round trip is bit-exact.
void save_posterior(const std::filesystem::path& json_path, const WeightPosterior& q);
WeightPosterior load_posterior(const std::filesystem::path& json_path);

std::string_view to_string(ModelForm f);
ModelForm parse_model_form(std::string_view s);

}  // namespace hipmdp::bnn
