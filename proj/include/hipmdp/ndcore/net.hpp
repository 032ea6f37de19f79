#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hipmdp/common/rng.hpp"

namespace hipmdp::ndcore {

/// Dense feed-forward topology. widths = {input, hidden..., output}; hidden
/// layers use the rectifier, the output layer is the identity.
class NetSpec {
 public:
  NetSpec() = default;
  explicit NetSpec(std::vector<std::size_t> widths);

  const std::vector<std::size_t>& widths() const { return widths_; }
  std::size_t layer_count() const { return widths_.size() - 1; }  // affine maps
  std::size_t input_width() const { return widths_.front(); }
  std::size_t output_width() const { return widths_.back(); }
  std::size_t param_count() const { return offsets_.back(); }

  std::size_t fan_in(std::size_t layer) const { return widths_[layer]; }
  std::size_t fan_out(std::size_t layer) const { return widths_[layer + 1]; }
  /// Layer `l` stores its fan_out x fan_in weight block (row-major) followed
  /// by fan_out biases.
  std::size_t weight_offset(std::size_t layer) const { return offsets_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return offsets_[layer] + fan_in(layer) * fan_out(layer); }
  bool is_relu_layer(std::size_t layer) const { return layer + 1 < layer_count(); }

  struct Location {
    std::size_t layer;
    std::size_t row;  // output unit
    std::size_t col;  // input unit; == fan_in for the bias
  };
  Location locate(std::size_t flat_index) const;

  bool operator==(const NetSpec&) const = default;

 private:
  std::vector<std::size_t> widths_;
  std::vector<std::size_t> offsets_;
};

/// Flat parameter storage for one NetSpec.
class ParamVector {
 public:
  ParamVector() = default;
  explicit ParamVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<double> span() { return values_; }
  std::span<const double> span() const { return values_; }
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const ParamVector&) const = default;

 private:
  std::vector<double> values_;
};

/// Uniform fan-in/fan-out scaled weights, zero biases.
ParamVector init_uniform_scaled(const NetSpec& spec, Rng& rng);

/// Activations of a batched forward pass, kept for the backward pass.
struct ForwardCache {
  std::size_t rows = 0;
  std::vector<std::vector<double>> activations;  // [0] = input, [L] = output

  std::span<const double> output() const { return activations.back(); }
  std::span<const double> output_row(std::size_t b) const;
};

/// Reusable buffers for backward passes.
struct BackwardScratch {
  std::vector<double> upstream;
  std::vector<double> downstream;
};

void forward_batch(const NetSpec& spec, std::span<const double> params, std::span<const double> inputs,
                   std::size_t rows, ForwardCache& cache);

/// Accumulates d(sum_b out_grad[b] . output[b]) / d params into param_grad
/// (skipped when empty) and writes the input gradient into input_grad
/// (skipped when empty).
void backward_batch(const NetSpec& spec, std::span<const double> params, const ForwardCache& cache,
                    std::span<const double> out_grad, std::span<double> param_grad,
                    std::span<double> input_grad, BackwardScratch& scratch);

std::vector<double> forward(const NetSpec& spec, const ParamVector& params, std::span<const double> input);

struct Gradients {
  ParamVector params;
  std::vector<double> input;
};

Gradients backward(const NetSpec& spec, const ParamVector& params, std::span<const double> input,
                   std::span<const double> output_gradient);

/// Rescales g in place to L2 norm max_norm when it exceeds it. Returns the
/// pre-clip norm.
double clip_gradient_l2(std::span<double> gradient, double max_norm);

}  // namespace hipmdp::ndcore
