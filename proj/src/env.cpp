#include "sparseq/env.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "sparseq/envs/breakout.hpp"
#include "sparseq/envs/copy_chain.hpp"
#include "sparseq/envs/space_invaders.hpp"

namespace sparseq {

std::unique_ptr<Environment> make_environment(const std::string& name) {
  if (name == "breakout") return std::make_unique<BreakoutEnv>();
  if (name == "space_invaders") return std::make_unique<SpaceInvadersEnv>();
  if (name.rfind("copy_chain:", 0) == 0) {
    const int n = std::stoi(name.substr(11));
    if (n <= 0) throw std::invalid_argument("copy_chain length must be positive");
    return std::make_unique<CopyChainEnv>(n);
  }
  throw std::invalid_argument("unknown environment: " + name);
}

void dump_trajectory(Environment& env, std::uint64_t seed, std::span<const int> actions,
                     std::ostream& out) {
  env.reset(seed);
  std::string bits(static_cast<std::size_t>(env.spec().flat_size()), '0');
  long step = 0;
  for (int action : actions) {
    StepResult r = env.step(action);
    ++step;
    for (int i = 0; i < r.obs.flat.size(); ++i) bits[i] = r.obs.flat[i] ? '1' : '0';
    char head[64];
    std::snprintf(head, sizeof(head), "%ld\t%d\t%g\t%d\t", step, action, r.reward,
                  r.terminal ? 1 : 0);
    out << head << bits << '\n';
    if (r.terminal) break;
  }
}

}  // namespace sparseq
