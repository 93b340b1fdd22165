#include "safe_rl/pg/replay_buffer.hpp"

#include "safe_rl/common/error.hpp"

namespace safe_rl::pg {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  require(capacity > 0, ErrorCode::kInvalidConfig, "replay capacity must be positive");
  data_.reserve(static_cast<std::size_t>(std::min(capacity, 1 << 16)));
}

void ReplayBuffer::add(Transition t) {
  std::lock_guard lock(mutex_);
  if (static_cast<int>(data_.size()) < capacity_) {
    data_.push_back(std::move(t));
  } else {
    data_[static_cast<std::size_t>(next_)] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

int ReplayBuffer::size() const {
  std::lock_guard lock(mutex_);
  return static_cast<int>(data_.size());
}

TransitionBatch ReplayBuffer::sample(int batch_size, Rng& rng) const {
  std::lock_guard lock(mutex_);
  require(!data_.empty(), ErrorCode::kEmptyBuffer, "sampling from an empty replay buffer");
  require(batch_size > 0, ErrorCode::kInvalidArgument, "batch size must be positive");
  const Transition& first = data_.front();
  TransitionBatch b;
  b.obs.resize(first.obs.size(), batch_size);
  b.next_obs.resize(first.obs.size(), batch_size);
  b.actions.resize(first.action.size(), batch_size);
  b.costs.resize(batch_size);
  b.constraint_costs.resize(batch_size);
  b.not_terminal.resize(batch_size);
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  for (int i = 0; i < batch_size; ++i) {
    const Transition& t = data_[pick(rng)];
    b.obs.col(i) = t.obs;
    b.next_obs.col(i) = t.next_obs;
    b.actions.col(i) = t.action;
    b.costs[i] = t.cost;
    b.constraint_costs[i] = t.constraint_cost;
    b.not_terminal[i] = t.terminal ? 0.0 : 1.0;
  }
  return b;
}

}  // namespace safe_rl::pg
