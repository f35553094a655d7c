#pragma once

#include "sparseq/types.hpp"

namespace sparseq {

// One environment step as stored in the replay buffer. Observations are kept
// in their binary form; the math casts to the working scalar on use.
struct Transition {
  BinaryVector obs;
  int action = 0;
  double reward = 0.0;
  BinaryVector next_obs;
  bool terminal = false;
};

}  // namespace sparseq
