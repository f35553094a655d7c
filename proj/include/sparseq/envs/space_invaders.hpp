#pragma once

#include <vector>

#include "sparseq/env.hpp"

namespace sparseq {

// 10x10 alien-wave shooter, fully deterministic: reset ignores the seed and
// there is no RNG anywhere in the dynamics. Channels: 0 cannon, 1 aliens,
// 2 friendly bullet, 3 enemy bullets, 4 aliens-moving-left, 5
// aliens-moving-right. Actions: 0 no-op, 1 left, 2 right, 3 fire.
//
// Dynamics, one tick:
//   1. fire cooldown decrements
//   2. the friendly bullet moves up one cell; an alien in its cell is shot
//      (+1 reward, bullet consumed)
//   3. enemy bullets move down one cell; one entering the cannon's cell ends
//      the episode; bullets leave the grid at the bottom
//   4. the alien block steps sideways every `speed` ticks, descending one row
//      and reversing at the walls; speed rises (smaller tick count) as aliens
//      die and after every cleared wave; an alien reaching the bottom row or
//      walking into the friendly bullet is handled here
//   5. every 10 ticks the bottom-most alien of a cycling column drops a bullet
//   6. the player acts: move (clamped) or fire from the cell above the cannon,
//      gated by the cooldown and the one-friendly-bullet rule
// A cleared wave respawns the full block immediately.
class SpaceInvadersEnv final : public Environment {
 public:
  static constexpr int kGrid = 10;
  static constexpr int kCannonChannel = 0, kAlienChannel = 1, kFriendlyChannel = 2,
                       kEnemyChannel = 3, kLeftChannel = 4, kRightChannel = 5;
  static constexpr int kNoop = 0, kLeft = 1, kRight = 2, kFire = 3;
  static constexpr int kAlienRows = 4, kAlienCols = 6;  // block spawns at rows 1..4, cols 1..6
  static constexpr int kBaseSpeed = 4;                  // ticks per block move at full strength
  static constexpr int kFireCooldown = 5;
  static constexpr int kEnemyFirePeriod = 10;

  ObsSpec spec() const override { return {kGrid, kGrid, 6, 4}; }
  Observation reset(std::uint64_t seed) override;
  StepResult step(int action) override;

 private:
  Observation observe() const;
  int alive_count() const;
  int current_speed() const;
  void shoot_alien(int row, int col, double& reward);
  void respawn_wave();

  std::uint8_t aliens_[kGrid][kGrid] = {};
  int cannon_col_ = 0;
  int alien_dir_ = 1;
  int move_timer_ = 0;
  int waves_cleared_ = 0;
  int cooldown_ = 0;
  int enemy_fire_timer_ = 0;
  int enemy_fire_col_ = 0;
  bool friendly_live_ = false;
  int friendly_row_ = 0, friendly_col_ = 0;
  std::vector<std::pair<int, int>> enemy_bullets_;
  bool live_ = false;
};

}  // namespace sparseq
