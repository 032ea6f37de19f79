#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "hipmdp/common/rng.hpp"

namespace hipmdp::replay {

struct Transition {
  std::vector<double> state;
  int action = 0;
  double reward = 0.0;
  std::vector<double> next_state;
  bool done = false;
  int instance_id = 0;
};

struct BufferConfig {
  double priority_exponent = 0.2;
  double importance_exponent = 0.1;
  double priority_floor = 1e-6;
  double initial_priority = 1.0;  // priority of the first record pushed into an empty buffer
};

struct SampleBatch {
  std::vector<std::size_t> indices;
  std::vector<double> weights;  // importance weights, max-normalized to 1
};

/// Unbounded proportional prioritized replay. Record i is drawn with
/// probability p_i^a / sum_j p_j^a; draws are i.i.d. with replacement.
class PrioritizedBuffer {
 public:
  explicit PrioritizedBuffer(std::size_t state_dim = 0, BufferConfig config = {});

  void push(const Transition& t);
  void push(std::span<const double> state, int action, double reward, std::span<const double> next_state,
            bool done, int instance_id);

  SampleBatch sample(std::size_t n, Rng& rng) const;

  /// Sets priority_i = |error_i| + floor.
  void update_priorities(std::span<const std::size_t> indices, std::span<const double> errors);
  /// Sets the raw priority, no floor.
  void assign_priority(std::size_t index, double priority);

  std::size_t size() const { return actions_.size(); }
  bool empty() const { return actions_.empty(); }
  std::size_t state_dim() const { return state_dim_; }
  const BufferConfig& config() const { return config_; }

  double priority(std::size_t i) const { return priorities_.at(i); }
  double max_priority() const;
  /// Sampling probability of record i, read from the tree.
  double probability(std::size_t i) const;

  std::span<const double> state(std::size_t i) const { return {states_.data() + i * state_dim_, state_dim_}; }
  std::span<const double> next_state(std::size_t i) const {
    return {next_states_.data() + i * state_dim_, state_dim_};
  }
  int action(std::size_t i) const { return actions_[i]; }
  double reward(std::size_t i) const { return rewards_[i]; }
  bool done(std::size_t i) const { return dones_[i] != 0; }
  int instance_id(std::size_t i) const { return instance_ids_[i]; }
  Transition record(std::size_t i) const;

  void write_csv(std::ostream& out) const;
  /// Inverse of write_csv (17 significant digits, so values round-trip).
  static PrioritizedBuffer read_csv(std::istream& in, BufferConfig config = {});

 private:
  void set_leaf(std::size_t i, double priority);
  void grow();

  std::size_t state_dim_;
  BufferConfig config_;
  std::vector<double> states_;
  std::vector<double> next_states_;
  std::vector<int> actions_;
  std::vector<double> rewards_;
  std::vector<unsigned char> dones_;
  std::vector<int> instance_ids_;
  std::vector<double> priorities_;

  std::size_t capacity_ = 0;      // leaves, power of two
  std::vector<double> sum_tree_;  // sampling weights p^a, heap layout
  std::vector<double> max_tree_;  // raw priorities
};

}  // namespace hipmdp::replay
