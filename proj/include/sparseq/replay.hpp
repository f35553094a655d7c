#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "sparseq/rng.hpp"
#include "sparseq/transition.hpp"

namespace sparseq {

// Fixed-capacity FIFO ring of transitions with uniform with-replacement
// sampling over the current contents.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("ReplayBuffer: zero capacity");
    ring_.reserve(capacity);
  }

  std::size_t size() const { return ring_.size(); }
  std::size_t capacity() const { return capacity_; }

  void add(Transition t) {
    if (ring_.size() < capacity_) {
      ring_.push_back(std::move(t));
    } else {
      ring_[cursor_] = std::move(t);
      cursor_ = (cursor_ + 1) % capacity_;
    }
  }

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const {
    if (i >= ring_.size()) throw std::out_of_range("ReplayBuffer::at");
    return ring_[(cursor_ + i) % ring_.size()];
  }

  const Transition& sample(SplitMix64& rng) const {
    if (ring_.empty()) throw std::logic_error("ReplayBuffer::sample: empty buffer");
    return ring_[rng.next_below(ring_.size())];
  }

  std::vector<Transition> sample_batch(int batch_size, SplitMix64& rng) const {
    std::vector<Transition> batch;
    batch.reserve(batch_size);
    for (int i = 0; i < batch_size; ++i) batch.push_back(sample(rng));
    return batch;
  }

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;
  std::vector<Transition> ring_;
};

}  // namespace sparseq
