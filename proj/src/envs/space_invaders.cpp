#include "sparseq/envs/space_invaders.hpp"

#include <algorithm>
#include <stdexcept>

namespace sparseq {

void SpaceInvadersEnv::respawn_wave() {
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c) aliens_[r][c] = 0;
  for (int r = 1; r <= kAlienRows; ++r)
    for (int c = 1; c <= kAlienCols; ++c) aliens_[r][c] = 1;
  alien_dir_ = 1;
  move_timer_ = 0;
}

Observation SpaceInvadersEnv::reset(std::uint64_t /*seed*/) {
  respawn_wave();
  waves_cleared_ = 0;
  cannon_col_ = kGrid / 2 - 1;
  cooldown_ = 0;
  enemy_fire_timer_ = 0;
  enemy_fire_col_ = 0;
  friendly_live_ = false;
  enemy_bullets_.clear();
  live_ = true;
  return observe();
}

int SpaceInvadersEnv::alive_count() const {
  int n = 0;
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c) n += aliens_[r][c];
  return n;
}

// Ticks per block move; fewer aliens (and more cleared waves) move faster.
int SpaceInvadersEnv::current_speed() const {
  const int alive = alive_count();
  const int speed = (alive + kAlienCols - 1) / kAlienCols - waves_cleared_;
  return std::max(1, speed);
}

void SpaceInvadersEnv::shoot_alien(int row, int col, double& reward) {
  aliens_[row][col] = 0;
  reward += 1.0;
  friendly_live_ = false;
  if (alive_count() == 0) {
    ++waves_cleared_;
    respawn_wave();
  }
}

StepResult SpaceInvadersEnv::step(int action) {
  if (!live_) throw std::logic_error("SpaceInvadersEnv::step: episode is over, call reset");
  if (action < 0 || action >= 4)
    throw std::invalid_argument("SpaceInvadersEnv::step: action out of range");

  double reward = 0.0;

  // 1. timers
  if (cooldown_ > 0) --cooldown_;

  // 2. friendly bullet
  if (friendly_live_) {
    --friendly_row_;
    if (friendly_row_ < 0) {
      friendly_live_ = false;
    } else if (aliens_[friendly_row_][friendly_col_]) {
      shoot_alien(friendly_row_, friendly_col_, reward);
    }
  }

  // 3. enemy bullets
  for (auto& b : enemy_bullets_) {
    ++b.first;
    if (b.first == kGrid - 1 && b.second == cannon_col_) live_ = false;
  }
  std::erase_if(enemy_bullets_, [](const auto& b) { return b.first >= kGrid; });

  // 4. alien block
  if (live_) {
    ++move_timer_;
    if (move_timer_ >= current_speed()) {
      move_timer_ = 0;
      int min_col = kGrid, max_col = -1;
      for (int r = 0; r < kGrid; ++r)
        for (int c = 0; c < kGrid; ++c)
          if (aliens_[r][c]) {
            min_col = std::min(min_col, c);
            max_col = std::max(max_col, c);
          }
      const bool at_wall = (alien_dir_ > 0 && max_col >= kGrid - 1) ||
                           (alien_dir_ < 0 && min_col <= 0);
      std::uint8_t next[kGrid][kGrid] = {};
      if (at_wall) {
        for (int r = kGrid - 1; r >= 1; --r)
          for (int c = 0; c < kGrid; ++c) next[r][c] = aliens_[r - 1][c];
        alien_dir_ = -alien_dir_;
      } else {
        for (int r = 0; r < kGrid; ++r)
          for (int c = 0; c < kGrid; ++c)
            if (aliens_[r][c]) next[r][c + alien_dir_] = 1;
      }
      for (int r = 0; r < kGrid; ++r)
        for (int c = 0; c < kGrid; ++c) aliens_[r][c] = next[r][c];

      for (int c = 0; c < kGrid; ++c)
        if (aliens_[kGrid - 1][c]) live_ = false;  // the wave reached the cannon row
      if (live_ && friendly_live_ && aliens_[friendly_row_][friendly_col_])
        shoot_alien(friendly_row_, friendly_col_, reward);
    }
  }

  // 5. enemy fire: bottom-most alien of the next occupied column in the cycle
  if (live_) {
    ++enemy_fire_timer_;
    if (enemy_fire_timer_ >= kEnemyFirePeriod) {
      enemy_fire_timer_ = 0;
      for (int probe = 0; probe < kGrid; ++probe) {
        const int col = (enemy_fire_col_ + probe) % kGrid;
        int bottom = -1;
        for (int r = 0; r < kGrid; ++r)
          if (aliens_[r][col]) bottom = r;
        if (bottom >= 0) {
          enemy_bullets_.emplace_back(bottom + 1, col);
          if (bottom + 1 == kGrid - 1 && col == cannon_col_) live_ = false;
          enemy_fire_col_ = (col + 1) % kGrid;
          break;
        }
      }
    }
  }

  // 6. player action
  if (live_) {
    if (action == kLeft && cannon_col_ > 0) --cannon_col_;
    if (action == kRight && cannon_col_ < kGrid - 1) ++cannon_col_;
    if (action == kFire && cooldown_ == 0 && !friendly_live_) {
      friendly_live_ = true;
      friendly_row_ = kGrid - 2;
      friendly_col_ = cannon_col_;
      cooldown_ = kFireCooldown;
      if (aliens_[friendly_row_][friendly_col_])
        shoot_alien(friendly_row_, friendly_col_, reward);
    }
  }

  return {observe(), reward, !live_};
}

Observation SpaceInvadersEnv::observe() const {
  Observation o = Observation::zeros(spec());
  o.set(kGrid - 1, cannon_col_, kCannonChannel);
  const int dir_channel = alien_dir_ < 0 ? kLeftChannel : kRightChannel;
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c)
      if (aliens_[r][c]) {
        o.set(r, c, kAlienChannel);
        o.set(r, c, dir_channel);
      }
  if (friendly_live_) o.set(friendly_row_, friendly_col_, kFriendlyChannel);
  for (const auto& b : enemy_bullets_)
    if (b.first >= 0 && b.first < kGrid) o.flat[o.index(b.first, b.second, kEnemyChannel)] = 1;
  return o;
}

}  // namespace sparseq
