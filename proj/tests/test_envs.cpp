#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sparseq/env.hpp"
#include "sparseq/envs/breakout.hpp"
#include "sparseq/envs/space_invaders.hpp"
#include "sparseq/rng.hpp"

using namespace sparseq;

namespace {

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) lines.push_back(line);
  return lines;
}

std::vector<int> actions_of(const std::vector<std::string>& dump_lines) {
  std::vector<int> actions;
  for (const std::string& line : dump_lines) {
    const auto t1 = line.find('\t');
    const auto t2 = line.find('\t', t1 + 1);
    actions.push_back(std::stoi(line.substr(t1 + 1, t2 - t1 - 1)));
  }
  return actions;
}

int channel_count(const Observation& obs, int channel) {
  int count = 0;
  for (int r = 0; r < obs.h; ++r)
    for (int c = 0; c < obs.w; ++c) count += obs.at(r, c, channel);
  return count;
}

}  // namespace

TEST_CASE("observation specs and flat lengths") {
  auto bk = make_environment("breakout");
  CHECK(bk->spec().h == 10);
  CHECK(bk->spec().w == 10);
  CHECK(bk->spec().c == 4);
  CHECK(bk->spec().num_actions == 3);
  CHECK(bk->spec().flat_size() == 400);
  auto si = make_environment("space_invaders");
  CHECK(si->spec().h == 10);
  CHECK(si->spec().w == 10);
  CHECK(si->spec().c == 6);
  CHECK(si->spec().num_actions == 4);
  CHECK(si->spec().flat_size() == 600);
  CHECK(bk->reset(3).flat.size() == 400);
  CHECK(si->reset(3).flat.size() == 600);
}

TEST_CASE("breakout: initial layout pixel counts") {
  BreakoutEnv env;
  Observation obs = env.reset(123);
  CHECK(channel_count(obs, BreakoutEnv::kBallChannel) == 1);
  CHECK(channel_count(obs, BreakoutEnv::kPaddleChannel) == 1);
  CHECK(channel_count(obs, BreakoutEnv::kTrailChannel) == 0);
  CHECK(channel_count(obs, BreakoutEnv::kBrickChannel) == 30);
}

TEST_CASE("breakout: same seed gives identical observation and trajectory") {
  BreakoutEnv a, b;
  Observation oa = a.reset(99), ob = b.reset(99);
  CHECK(oa.flat == ob.flat);
  SplitMix64 rng(4);
  for (int step = 0; step < 200; ++step) {
    const int action = static_cast<int>(rng.next_below(3));
    StepResult ra = a.step(action), rb = b.step(action);
    REQUIRE(ra.obs.flat == rb.obs.flat);
    REQUIRE(ra.reward == rb.reward);
    REQUIRE(ra.terminal == rb.terminal);
    if (ra.terminal) {
      a.reset(12);
      b.reset(12);
    }
  }
}

TEST_CASE("breakout: brick hit pays +1 and clears the brick pixel") {
  BreakoutEnv env;
  Observation prev = env.reset(7);
  bool saw_hit = false;
  for (int step = 0; step < 500 && !saw_hit; ++step) {
    StepResult r = env.step(BreakoutEnv::kNoop);
    if (r.reward == 1.0) {
      saw_hit = true;
      CHECK(channel_count(r.obs, BreakoutEnv::kBrickChannel) ==
            channel_count(prev, BreakoutEnv::kBrickChannel) - 1);
    }
    if (r.terminal) {
      prev = env.reset(step + 100);
    } else {
      prev = r.obs;
    }
  }
  CHECK(saw_hit);
}

TEST_CASE("breakout: ball past the paddle terminates with zero reward") {
  BreakoutEnv env;
  env.reset(21);
  for (int step = 0; step < 500; ++step) {
    StepResult r = env.step(BreakoutEnv::kLeft);  // park at the wall, lose the ball
    if (r.terminal) {
      CHECK(r.reward == 0.0);
      CHECK(channel_count(r.obs, BreakoutEnv::kBallChannel) == 1);
      CHECK(r.obs.at(9, 0, BreakoutEnv::kPaddleChannel) == 1);
      return;
    }
  }
  FAIL("episode never terminated");
}

TEST_CASE("breakout: trail channel equals the previous ball channel") {
  BreakoutEnv env;
  SplitMix64 rng(31);
  Observation prev = env.reset(5);
  for (int step = 0; step < 400; ++step) {
    StepResult r = env.step(static_cast<int>(rng.next_below(3)));
    const int hw = 100;
    CHECK(r.obs.flat.segment(BreakoutEnv::kTrailChannel * hw, hw) ==
          prev.flat.segment(BreakoutEnv::kBallChannel * hw, hw));
    CHECK(channel_count(r.obs, BreakoutEnv::kBallChannel) == 1);
    CHECK((r.reward == 0.0 || r.reward == 1.0));
    prev = r.terminal ? env.reset(step) : r.obs;
  }
}

TEST_CASE("breakout: observations are binary") {
  BreakoutEnv env;
  Observation obs = env.reset(17);
  for (int step = 0; step < 100; ++step) {
    for (int i = 0; i < obs.flat.size(); ++i) REQUIRE(obs.flat[i] <= 1);
    StepResult r = env.step(step % 3);
    obs = r.terminal ? env.reset(step) : r.obs;
  }
}

TEST_CASE("breakout: step after terminal is a hard error") {
  BreakoutEnv env;
  env.reset(21);
  for (int step = 0; step < 1000; ++step) {
    if (env.step(BreakoutEnv::kLeft).terminal) break;
  }
  CHECK_THROWS_AS(env.step(BreakoutEnv::kNoop), std::logic_error);
}

TEST_CASE("space invaders: reset is seed-independent") {
  SpaceInvadersEnv a, b;
  CHECK(a.reset(1).flat == b.reset(99).flat);
}

TEST_CASE("space invaders: identical action sequences are bitwise identical across seeds") {
  SpaceInvadersEnv a, b;
  a.reset(1);
  b.reset(424242);
  SplitMix64 rng(9);
  for (int step = 0; step < 300; ++step) {
    const int action = static_cast<int>(rng.next_below(4));
    StepResult ra = a.step(action), rb = b.step(action);
    REQUIRE(ra.obs.flat == rb.obs.flat);
    REQUIRE(ra.reward == rb.reward);
    REQUIRE(ra.terminal == rb.terminal);
    if (ra.terminal) {
      a.reset(step);
      b.reset(step * 7 + 1);
    }
  }
}

TEST_CASE("space invaders: direction channels track the block direction") {
  SpaceInvadersEnv env;
  Observation obs = env.reset(0);
  CHECK(channel_count(obs, SpaceInvadersEnv::kAlienChannel) == 24);
  CHECK(channel_count(obs, SpaceInvadersEnv::kRightChannel) == 24);
  CHECK(channel_count(obs, SpaceInvadersEnv::kLeftChannel) == 0);
  bool saw_left = false;
  for (int step = 0; step < 60; ++step) {
    StepResult r = env.step(SpaceInvadersEnv::kNoop);
    const int aliens = channel_count(r.obs, SpaceInvadersEnv::kAlienChannel);
    const int left = channel_count(r.obs, SpaceInvadersEnv::kLeftChannel);
    const int right = channel_count(r.obs, SpaceInvadersEnv::kRightChannel);
    REQUIRE(left + right == aliens);
    REQUIRE((left == 0 || right == 0));
    if (left > 0) saw_left = true;
    if (r.terminal) break;  // a stationary cannon eventually takes a bullet
  }
  CHECK(saw_left);  // the block bounces off the right wall well before that
}

TEST_CASE("space invaders: rewards are 0/+1 and shooting removes the alien") {
  SpaceInvadersEnv env;
  Observation prev = env.reset(0);
  bool saw_kill = false;
  for (int step = 0; step < 200; ++step) {
    StepResult r = env.step(step % 6 == 0 ? SpaceInvadersEnv::kFire : SpaceInvadersEnv::kNoop);
    REQUIRE((r.reward == 0.0 || r.reward == 1.0));
    if (r.reward == 1.0) {
      saw_kill = true;
      CHECK(channel_count(r.obs, SpaceInvadersEnv::kAlienChannel) ==
            channel_count(prev, SpaceInvadersEnv::kAlienChannel) - 1);
    }
    if (r.terminal) break;
    prev = r.obs;
  }
  CHECK(saw_kill);
}

TEST_CASE("space invaders: step after terminal is a hard error") {
  SpaceInvadersEnv env;
  env.reset(0);
  for (int step = 0; step < 5000; ++step) {
    if (env.step(SpaceInvadersEnv::kNoop).terminal) break;  // stand still until shot
  }
  CHECK_THROWS_AS(env.step(SpaceInvadersEnv::kNoop), std::logic_error);
}

TEST_CASE("golden fixture: breakout 40-step hand-simulated trajectory") {
  const auto expected = read_lines(std::string(SPARSEQ_FIXTURES_DIR) + "/breakout_golden.tsv");
  REQUIRE(expected.size() == 40);
  BreakoutEnv env;
  std::ostringstream out;
  dump_trajectory(env, 7, actions_of(expected), out);
  std::istringstream in(out.str());
  std::string line;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    REQUIRE(std::getline(in, line));
    REQUIRE(line == expected[i]);
  }
  CHECK(!std::getline(in, line));
}

TEST_CASE("golden fixture: space invaders 40-step hand-simulated trajectory") {
  const auto expected =
      read_lines(std::string(SPARSEQ_FIXTURES_DIR) + "/space_invaders_golden.tsv");
  REQUIRE(expected.size() == 40);
  SpaceInvadersEnv env;
  std::ostringstream out;
  dump_trajectory(env, 1, actions_of(expected), out);
  std::istringstream in(out.str());
  std::string line;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    REQUIRE(std::getline(in, line));
    REQUIRE(line == expected[i]);
  }
  CHECK(!std::getline(in, line));
}

TEST_CASE("copy chain: shift register with a seeded driving bit") {
  auto env = make_environment("copy_chain:6");
  CHECK(env->spec().flat_size() == 6);
  Observation obs = env->reset(11);
  CHECK(obs.flat.sum() == 0);
  BinaryVector prev = obs.flat;
  for (int step = 0; step < 50; ++step) {
    StepResult r = env->step(0);
    for (int i = 1; i < 6; ++i) REQUIRE(r.obs.flat[i] == prev[i - 1]);
    REQUIRE(!r.terminal);
    REQUIRE(r.reward == 0.0);
    prev = r.obs.flat;
  }
  auto env2 = make_environment("copy_chain:6");
  env2->reset(11);
  auto env3 = make_environment("copy_chain:6");
  env3->reset(11);
  for (int step = 0; step < 20; ++step)
    REQUIRE(env2->step(0).obs.flat == env3->step(0).obs.flat);
}
