#include "hipmdp/ndcore/net.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "hipmdp/simd/kernels.hpp"

namespace hipmdp::ndcore {

NetSpec::NetSpec(std::vector<std::size_t> widths) : widths_(std::move(widths)) {
  if (widths_.size() < 2) throw std::invalid_argument("NetSpec needs at least input and output widths");
  offsets_.assign(1, 0);
  for (std::size_t l = 0; l + 1 < widths_.size(); ++l) {
    if (widths_[l] == 0 || widths_[l + 1] == 0) throw std::invalid_argument("NetSpec widths must be >= 1");
    offsets_.push_back(offsets_.back() + (widths_[l] + 1) * widths_[l + 1]);
  }
}

NetSpec::Location NetSpec::locate(std::size_t flat_index) const {
  if (flat_index >= param_count()) throw std::out_of_range("parameter index out of range");
  std::size_t l = 0;
  while (offsets_[l + 1] <= flat_index) ++l;
  const std::size_t local = flat_index - offsets_[l];
  const std::size_t weights = fan_in(l) * fan_out(l);
  if (local < weights) return {l, local / fan_in(l), local % fan_in(l)};
  return {l, local - weights, fan_in(l)};
}

ParamVector init_uniform_scaled(const NetSpec& spec, Rng& rng) {
  ParamVector p(spec.param_count());
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    const double bound = std::sqrt(6.0 / static_cast<double>(spec.fan_in(l) + spec.fan_out(l)));
    const std::size_t w0 = spec.weight_offset(l);
    for (std::size_t i = 0; i < spec.fan_in(l) * spec.fan_out(l); ++i) p[w0 + i] = rng.uniform(-bound, bound);
  }
  return p;
}

std::span<const double> ForwardCache::output_row(std::size_t b) const {
  const auto& out = activations.back();
  const std::size_t w = out.size() / rows;
  return std::span<const double>(out).subspan(b * w, w);
}

void forward_batch(const NetSpec& spec, std::span<const double> params, std::span<const double> inputs,
                   std::size_t rows, ForwardCache& cache) {
  if (params.size() != spec.param_count()) throw std::invalid_argument("parameter count does not match NetSpec");
  if (inputs.size() != rows * spec.input_width())
    throw std::invalid_argument("input length " + std::to_string(inputs.size()) + " does not match width " +
                                std::to_string(spec.input_width()));
  const auto& k = simd::active();
  cache.rows = rows;
  cache.activations.resize(spec.layer_count() + 1);
  cache.activations[0].assign(inputs.begin(), inputs.end());
  for (std::size_t l = 0; l < spec.layer_count(); ++l) {
    auto& out = cache.activations[l + 1];
    out.resize(rows * spec.fan_out(l));
    k.affine_rows(rows, spec.fan_out(l), spec.fan_in(l), cache.activations[l].data(),
                  params.data() + spec.weight_offset(l), params.data() + spec.bias_offset(l), out.data());
    if (spec.is_relu_layer(l)) {
      for (double& v : out) v = v > 0.0 ? v : 0.0;
    }
  }
}

void backward_batch(const NetSpec& spec, std::span<const double> params, const ForwardCache& cache,
                    std::span<const double> out_grad, std::span<double> param_grad,
                    std::span<double> input_grad, BackwardScratch& scratch) {
  const std::size_t rows = cache.rows;
  if (out_grad.size() != rows * spec.output_width()) throw std::invalid_argument("output gradient has wrong length");
  if (!param_grad.empty() && param_grad.size() != spec.param_count())
    throw std::invalid_argument("parameter gradient has wrong length");
  if (!input_grad.empty() && input_grad.size() != rows * spec.input_width())
    throw std::invalid_argument("input gradient has wrong length");

  const auto& k = simd::active();
  scratch.upstream.assign(out_grad.begin(), out_grad.end());
  for (std::size_t l = spec.layer_count(); l-- > 0;) {
    const std::size_t in = spec.fan_in(l);
    const std::size_t out = spec.fan_out(l);
    if (spec.is_relu_layer(l)) {
      const auto& act = cache.activations[l + 1];
      for (std::size_t i = 0; i < scratch.upstream.size(); ++i)
        if (act[i] <= 0.0) scratch.upstream[i] = 0.0;
    }
    if (!param_grad.empty()) {
      k.accumulate_weight_grad(rows, out, in, scratch.upstream.data(), cache.activations[l].data(),
                               param_grad.data() + spec.weight_offset(l));
      double* gb = param_grad.data() + spec.bias_offset(l);
      for (std::size_t b = 0; b < rows; ++b)
        for (std::size_t o = 0; o < out; ++o) gb[o] += scratch.upstream[b * out + o];
    }
    if (l == 0 && input_grad.empty()) break;
    scratch.downstream.assign(rows * in, 0.0);
    k.accumulate_input_grad(rows, out, in, scratch.upstream.data(), params.data() + spec.weight_offset(l),
                            scratch.downstream.data());
    std::swap(scratch.upstream, scratch.downstream);
  }
  if (!input_grad.empty()) std::copy(scratch.upstream.begin(), scratch.upstream.end(), input_grad.begin());
}

std::vector<double> forward(const NetSpec& spec, const ParamVector& params, std::span<const double> input) {
  ForwardCache cache;
  forward_batch(spec, params.span(), input, 1, cache);
  return cache.activations.back();
}

Gradients backward(const NetSpec& spec, const ParamVector& params, std::span<const double> input,
                   std::span<const double> output_gradient) {
  ForwardCache cache;
  forward_batch(spec, params.span(), input, 1, cache);
  Gradients g{ParamVector(spec.param_count()), std::vector<double>(spec.input_width())};
  BackwardScratch scratch;
  backward_batch(spec, params.span(), cache, output_gradient, g.params.span(), g.input, scratch);
  return g;
}

double clip_gradient_l2(std::span<double> gradient, double max_norm) {
  if (!(max_norm > 0.0)) throw std::invalid_argument("max_norm must be positive");
  double sq = 0.0;
  for (double v : gradient) sq += v * v;
  const double norm = std::sqrt(sq);
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (double& v : gradient) v *= scale;
  }
  return norm;
}

}  // namespace hipmdp::ndcore
