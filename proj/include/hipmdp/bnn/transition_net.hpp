#pragma once

#include <span>
#include <vector>

#include "hipmdp/bnn/posterior.hpp"
#include "hipmdp/ndcore/net.hpp"
#include "hipmdp/replay/prioritized_buffer.hpp"

namespace hipmdp::bnn {

/// Writes one network input row: standardized state, one-hot action, the
/// latent (embedded form only) and the input-noise value z.
void assemble_input(const WeightPosterior& q, std::span<const double> state, int action,
                    std::span<const double> latent, double z, double* row);

/// Network output row -> standardized delta. The linear form contracts the
/// L x D output with the latent; other forms copy.
void contract_output(const ModelShape& shape, const double* out_row, std::span<const double> latent,
                     double* delta);

/// Predictive moments of the raw state delta s' - s.
struct Prediction {
  std::vector<double> mean;
  std::vector<double> variance;  // epistemic spread + aleatoric noise
  std::vector<std::vector<double>> samples;  // K raw deltas, noise-free
};

/// Draw order per sample: param_count() weight normals, then one z normal.
Prediction predict(const WeightPosterior& q, std::span<const double> state, int action,
                   std::span<const double> latent, Rng& rng, std::size_t k);

/// Reusable single-draw sampler for fictional rollouts.
class DeltaSampler {
 public:
  explicit DeltaSampler(const WeightPosterior& q);

  /// One weight draw, one z draw and (optionally) observation noise; raw delta.
  std::vector<double> draw(std::span<const double> state, int action, std::span<const double> latent, Rng& rng,
                           bool observation_noise = true);

 private:
  const WeightPosterior* q_;
  std::vector<double> w_, eps_, input_, delta_;
  ndcore::ForwardCache cache_;
};

/// Mean squared error, in standardized delta units, of the K-sample
/// predictive mean against the recorded successors of records
/// [first, last) of `buffer`.
double prediction_mse(const WeightPosterior& q, const replay::PrioritizedBuffer& buffer, std::size_t first,
                      std::size_t last, std::span<const double> latent, Rng& rng, std::size_t k);

/// Standardized target delta of record i.
void target_delta(const WeightPosterior& q, const replay::PrioritizedBuffer& buffer, std::size_t i, double* out);

}  // namespace hipmdp::bnn
