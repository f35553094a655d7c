#pragma once

#include <optional>

#include "sparseq/env.hpp"
#include "sparseq/rng.hpp"

namespace sparseq {

// 10x10 single-ball brick game. Channels: 0 paddle, 1 ball, 2 trail (ball
// position one tick ago), 3 bricks. Actions: 0 no-op, 1 left, 2 right.
//
// Dynamics, one tick:
//   1. paddle moves per action, clamped to the grid
//   2. trail <- current ball position
//   3. side walls reflect the horizontal direction, the ceiling the vertical
//   4. a brick at the ball's next cell is cleared (+1 reward) and reflects the
//      vertical direction; the ball keeps its horizontal move
//   5. at the bottom row the ball bounces off the paddle the same way, and
//      ends the episode anywhere else
// The ball spawns below the brick wall (a spawn inside or above the wall
// would let it strip the bricks without ever reaching the paddle) at a
// seed-dependent column, moving down. When the last brick clears, the wall
// respawns and the ball position is re-randomized from the episode's seed
// stream.
class BreakoutEnv final : public Environment {
 public:
  static constexpr int kGrid = 10;
  static constexpr int kBrickRows = 3;  // rows 1..3
  static constexpr int kBallSpawnRow = kBrickRows + 1;
  static constexpr int kPaddleChannel = 0, kBallChannel = 1, kTrailChannel = 2,
                       kBrickChannel = 3;
  static constexpr int kNoop = 0, kLeft = 1, kRight = 2;

  ObsSpec spec() const override { return {kGrid, kGrid, 4, 3}; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

 private:
  Observation observe() const;
  void spawn_ball();
  void spawn_bricks();

  SplitMix64 rng_{0};
  int paddle_col_ = 0;
  int ball_row_ = 0, ball_col_ = 0;
  int dir_row_ = 1, dir_col_ = 1;
  std::optional<std::pair<int, int>> trail_;
  std::uint8_t bricks_[kGrid][kGrid] = {};
  bool live_ = false;
};

}  // namespace sparseq
