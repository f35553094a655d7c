#pragma once

#include "sparseq/env.hpp"
#include "sparseq/rng.hpp"

namespace sparseq {

// Synthetic diagnostic chain: input i+1 at time t+1 copies input i at time t,
// and input 0 is driven by a seeded Bernoulli(1/2) bit. Laid out as a 1 x N
// single-channel grid so each input is its own spatial position; input i-1 is
// the one-step predictor of input i. One no-op action, zero reward, no
// termination.
class CopyChainEnv final : public Environment {
 public:
  explicit CopyChainEnv(int length) : length_(length), bits_(BinaryVector::Zero(length)) {}

  ObsSpec spec() const override { return {1, length_, 1, 1}; }

  Observation reset(std::uint64_t seed) override {
    rng_ = SplitMix64(seed);
    bits_.setZero();
    return observe();
  }

  StepResult step(int action) override {
    if (action != 0) throw std::invalid_argument("CopyChainEnv::step: action out of range");
    for (int i = length_ - 1; i > 0; --i) bits_[i] = bits_[i - 1];
    bits_[0] = static_cast<std::uint8_t>(rng_.next_below(2));
    return {observe(), 0.0, false};
  }

 private:
  Observation observe() const {
    Observation o = Observation::zeros(spec());
    o.flat = bits_;
    return o;
  }

  int length_;
  SplitMix64 rng_{0};
  BinaryVector bits_;
};

}  // namespace sparseq
