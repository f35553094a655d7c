#include "sparseq/envs/breakout.hpp"

#include <stdexcept>

namespace sparseq {

void BreakoutEnv::spawn_bricks() {
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c) bricks_[r][c] = 0;
  for (int r = 1; r <= kBrickRows; ++r)
    for (int c = 0; c < kGrid; ++c) bricks_[r][c] = 1;
}

void BreakoutEnv::spawn_ball() {
  ball_row_ = kBallSpawnRow;
  ball_col_ = static_cast<int>(rng_.next_below(kGrid));
  dir_row_ = 1;
  dir_col_ = rng_.next_below(2) == 0 ? 1 : -1;
}

Observation BreakoutEnv::reset(std::uint64_t seed) {
  rng_ = SplitMix64(seed);
  paddle_col_ = kGrid / 2 - 1;
  spawn_bricks();
  spawn_ball();
  trail_.reset();
  live_ = true;
  return observe();
}

StepResult BreakoutEnv::step(int action) {
  if (!live_) throw std::logic_error("BreakoutEnv::step: episode is over, call reset");
  if (action < 0 || action >= 3)
    throw std::invalid_argument("BreakoutEnv::step: action out of range");

  if (action == kLeft && paddle_col_ > 0) --paddle_col_;
  if (action == kRight && paddle_col_ < kGrid - 1) ++paddle_col_;

  trail_ = {ball_row_, ball_col_};

  if (ball_col_ + dir_col_ < 0 || ball_col_ + dir_col_ >= kGrid) dir_col_ = -dir_col_;
  if (ball_row_ + dir_row_ < 0) dir_row_ = 1;
  const int next_row = ball_row_ + dir_row_;
  const int next_col = ball_col_ + dir_col_;

  double reward = 0.0;
  if (bricks_[next_row][next_col]) {
    bricks_[next_row][next_col] = 0;
    reward = 1.0;
    dir_row_ = -dir_row_;
    ball_col_ = next_col;

    bool any = false;
    for (int r = 1; r <= kBrickRows && !any; ++r)
      for (int c = 0; c < kGrid; ++c)
        if (bricks_[r][c]) { any = true; break; }
    if (!any) {
      spawn_bricks();
      spawn_ball();
    }
  } else if (next_row == kGrid - 1) {
    if (next_col == paddle_col_) {
      dir_row_ = -1;
      ball_col_ = next_col;
    } else {
      ball_row_ = next_row;
      ball_col_ = next_col;
      live_ = false;
    }
  } else {
    ball_row_ = next_row;
    ball_col_ = next_col;
  }

  return {observe(), reward, !live_};
}

Observation BreakoutEnv::observe() const {
  Observation o = Observation::zeros(spec());
  o.set(kGrid - 1, paddle_col_, kPaddleChannel);
  o.set(ball_row_, ball_col_, kBallChannel);
  if (trail_) o.set(trail_->first, trail_->second, kTrailChannel);
  for (int r = 0; r < kGrid; ++r)
    for (int c = 0; c < kGrid; ++c)
      if (bricks_[r][c]) o.set(r, c, kBrickChannel);
  return o;
}

}  // namespace sparseq
