#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>

#include "sparseq/types.hpp"

namespace sparseq {

struct ObsSpec {
  int h = 0, w = 0, c = 0;
  int num_actions = 0;
  int flat_size() const { return h * w * c; }
};

// Binary multi-channel grid observation, flattened channel-major:
// flat index = channel*H*W + row*W + col.
struct Observation {
  int h = 0, w = 0, c = 0;
  BinaryVector flat;

  static Observation zeros(const ObsSpec& spec) {
    Observation o;
    o.h = spec.h;
    o.w = spec.w;
    o.c = spec.c;
    o.flat = BinaryVector::Zero(spec.flat_size());
    return o;
  }
  int index(int row, int col, int channel) const { return channel * h * w + row * w + col; }
  std::uint8_t at(int row, int col, int channel) const { return flat[index(row, col, channel)]; }
  void set(int row, int col, int channel) { flat[index(row, col, channel)] = 1; }
};

struct StepResult {
  Observation obs;
  double reward = 0.0;
  bool terminal = false;
};

class Environment {
 public:
  virtual ~Environment() = default;
  virtual ObsSpec spec() const = 0;
  virtual Observation reset(std::uint64_t seed) = 0;
  // Advances one tick. Stepping a terminal environment without reset is a
  // logic error and throws.
  virtual StepResult step(int action) = 0;
};

// "breakout", "space_invaders", or "copy_chain:<N>" (synthetic diagnostic).
std::unique_ptr<Environment> make_environment(const std::string& name);

// Trajectory dump, one line per step, tab-separated:
//   step action reward terminal flat_obs_as_bitstring
// Steps are numbered from 1; the dump stops after a terminal step.
void dump_trajectory(Environment& env, std::uint64_t seed, std::span<const int> actions,
                     std::ostream& out);

}  // namespace sparseq
