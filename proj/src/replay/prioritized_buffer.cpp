#include "hipmdp/replay/prioritized_buffer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "hipmdp/common/errors.hpp"

namespace hipmdp::replay {

PrioritizedBuffer::PrioritizedBuffer(std::size_t state_dim, BufferConfig config)
    : state_dim_(state_dim), config_(config) {}

void PrioritizedBuffer::push(const Transition& t) {
  push(t.state, t.action, t.reward, t.next_state, t.done, t.instance_id);
}

void PrioritizedBuffer::push(std::span<const double> state, int action, double reward,
                             std::span<const double> next_state, bool done, int instance_id) {
  if (state.size() != state_dim_ || next_state.size() != state_dim_)
    throw std::invalid_argument("transition state dimension does not match buffer");
  const double p = empty() ? config_.initial_priority : max_priority();
  states_.insert(states_.end(), state.begin(), state.end());
  next_states_.insert(next_states_.end(), next_state.begin(), next_state.end());
  actions_.push_back(action);
  rewards_.push_back(reward);
  dones_.push_back(done ? 1 : 0);
  instance_ids_.push_back(instance_id);
  priorities_.push_back(p);
  if (size() > capacity_) grow();
  set_leaf(size() - 1, p);
}

void PrioritizedBuffer::grow() {
  capacity_ = capacity_ == 0 ? 1024 : capacity_ * 2;
  sum_tree_.assign(2 * capacity_, 0.0);
  max_tree_.assign(2 * capacity_, 0.0);
  for (std::size_t i = 0; i < priorities_.size(); ++i) {
    sum_tree_[capacity_ + i] = std::pow(priorities_[i], config_.priority_exponent);
    max_tree_[capacity_ + i] = priorities_[i];
  }
  for (std::size_t n = capacity_ - 1; n >= 1; --n) {
    sum_tree_[n] = sum_tree_[2 * n] + sum_tree_[2 * n + 1];
    max_tree_[n] = std::max(max_tree_[2 * n], max_tree_[2 * n + 1]);
  }
}

void PrioritizedBuffer::set_leaf(std::size_t i, double priority) {
  std::size_t n = capacity_ + i;
  sum_tree_[n] = std::pow(priority, config_.priority_exponent);
  max_tree_[n] = priority;
  for (n /= 2; n >= 1; n /= 2) {
    sum_tree_[n] = sum_tree_[2 * n] + sum_tree_[2 * n + 1];
    max_tree_[n] = std::max(max_tree_[2 * n], max_tree_[2 * n + 1]);
  }
}

double PrioritizedBuffer::max_priority() const {
  return empty() ? config_.initial_priority : max_tree_[1];
}

double PrioritizedBuffer::probability(std::size_t i) const {
  if (i >= size()) throw std::out_of_range("probability: index out of range");
  return sum_tree_[capacity_ + i] / sum_tree_[1];
}

SampleBatch PrioritizedBuffer::sample(std::size_t n, Rng& rng) const {
  if (empty()) throw InvalidState("cannot sample from an empty replay buffer");
  const double total = sum_tree_[1];
  if (!(total > 0.0)) throw InvalidState("all replay priorities are zero");
  SampleBatch out;
  out.indices.reserve(n);
  out.weights.reserve(n);
  const double count = static_cast<double>(size());
  double max_w = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double u = rng.uniform() * total;
    std::size_t node = 1;
    while (node < capacity_) {
      const double left = sum_tree_[2 * node];
      if (u < left || sum_tree_[2 * node + 1] <= 0.0) {
        node = 2 * node;
      } else {
        u -= left;
        node = 2 * node + 1;
      }
    }
    const std::size_t idx = std::min(node - capacity_, size() - 1);
    const double prob = sum_tree_[capacity_ + idx] / total;
    const double w = std::pow(count * prob, -config_.importance_exponent);
    out.indices.push_back(idx);
    out.weights.push_back(w);
    max_w = std::max(max_w, w);
  }
  for (double& w : out.weights) w /= max_w;
  return out;
}

void PrioritizedBuffer::update_priorities(std::span<const std::size_t> indices, std::span<const double> errors) {
  if (indices.size() != errors.size()) throw std::invalid_argument("update_priorities: length mismatch");
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] >= size())
      throw std::invalid_argument("update_priorities: index " + std::to_string(indices[k]) + " out of range");
  }
  for (std::size_t k = 0; k < indices.size(); ++k) {
    const double p = std::abs(errors[k]) + config_.priority_floor;
    priorities_[indices[k]] = p;
    set_leaf(indices[k], p);
  }
}

void PrioritizedBuffer::assign_priority(std::size_t index, double priority) {
  if (index >= size()) throw std::invalid_argument("assign_priority: index out of range");
  if (!(priority >= 0.0)) throw std::invalid_argument("assign_priority: priority must be >= 0");
  priorities_[index] = priority;
  set_leaf(index, priority);
}

Transition PrioritizedBuffer::record(std::size_t i) const {
  const auto s = state(i);
  const auto ns = next_state(i);
  return {std::vector<double>(s.begin(), s.end()), action(i), reward(i), std::vector<double>(ns.begin(), ns.end()),
          done(i), instance_id(i)};
}

void PrioritizedBuffer::write_csv(std::ostream& out) const {
  out << "# schema: replay-buffer v1\n";
  out << "index,instance_id,action,reward,done,priority";
  for (std::size_t d = 0; d < state_dim_; ++d) out << ",s" << d;
  for (std::size_t d = 0; d < state_dim_; ++d) out << ",next_s" << d;
  out << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < size(); ++i) {
    out << i << ',' << instance_ids_[i] << ',' << actions_[i] << ',' << rewards_[i] << ',' << int(dones_[i]) << ','
        << priorities_[i];
    for (double v : state(i)) out << ',' << v;
    for (double v : next_state(i)) out << ',' << v;
    out << '\n';
  }
}

PrioritizedBuffer PrioritizedBuffer::read_csv(std::istream& in, BufferConfig config) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# schema: replay-buffer v1", 0) != 0)
    throw std::runtime_error("replay CSV: missing schema line");
  if (!std::getline(in, line)) throw std::runtime_error("replay CSV: missing header");
  std::size_t columns = 1;
  for (char c : line) columns += c == ',';
  if (columns < 6 || (columns - 6) % 2 != 0) throw std::runtime_error("replay CSV: bad header");
  const std::size_t dim = (columns - 6) / 2;
  PrioritizedBuffer buf(dim, config);
  std::vector<double> f(columns);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t pos = 0;
    for (std::size_t c = 0; c < columns; ++c) {
      const std::size_t end = line.find(',', pos);
      const std::string cell = line.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
      f[c] = std::strtod(cell.c_str(), nullptr);
      pos = end == std::string::npos ? line.size() : end + 1;
    }
    buf.push(std::span<const double>(f.data() + 6, dim), static_cast<int>(f[2]), f[3],
             std::span<const double>(f.data() + 6 + dim, dim), f[4] != 0.0, static_cast<int>(f[1]));
    buf.assign_priority(buf.size() - 1, f[5]);
  }
  return buf;
}

}  // namespace hipmdp::replay
