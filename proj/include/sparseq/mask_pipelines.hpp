#pragma once

#include <cstdint>
#include <utility>

#include "sparseq/agent.hpp"
#include "sparseq/mask.hpp"
#include "sparseq/pan.hpp"

namespace sparseq {

// Expands per-target spatial neighborhoods into mask columns: each position
// contributes all C channels, and each grouping fills `repeat` contiguous
// columns. Targets must be the H*W*C inputs themselves.
Mask neighborhoods_to_mask(const NeighborhoodSet& set, int H, int W, int C, int repeat);

// Phase-one pipeline: runs the online predictive learner and encodes its
// final neighborhoods as a mask.
Mask gen_predictive(Environment& env, const PanConfig& config, int repeat,
                    std::uint64_t seed);

struct L1Config {
  double beta = 2.5e-5;
  AgentConfig agent;  // total_steps is the training budget
  std::uint64_t seed = 0;
};

// End-to-end pipeline: trains a dense (all-ones mask) network with the
// L1-regularized loss, then keeps the hidden weights whose magnitude is at
// least the mean magnitude. Returns the mask and the achieved sparsity.
// Unlike the structured generators, per-column counts may vary.
std::pair<Mask, double> gen_l1(const std::string& env_name, const L1Config& config);

}  // namespace sparseq
