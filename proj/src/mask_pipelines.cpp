#include "sparseq/mask_pipelines.hpp"

#include <stdexcept>

namespace sparseq {

Mask neighborhoods_to_mask(const NeighborhoodSet& set, int H, int W, int C, int repeat) {
  const int d = H * W * C;
  if (static_cast<int>(set.positions.size()) != d)
    throw std::invalid_argument("neighborhoods_to_mask: need one grouping per input");

  Mask m;
  m.grouping_repeat = repeat;
  m.bits = MaskMatrix::Zero(d, d * repeat);
  for (int target = 0; target < d; ++target) {
    for (int p : set.positions[target]) {
      if (p < 0 || p >= H * W)
        throw std::invalid_argument("neighborhoods_to_mask: position out of range");
      for (int ch = 0; ch < C; ++ch) {
        const int input = ch * H * W + p;
        for (int r = 0; r < repeat; ++r) m.bits(input, target * repeat + r) = 1;
      }
    }
  }
  return m;
}

Mask gen_predictive(Environment& env, const PanConfig& config, int repeat,
                    std::uint64_t seed) {
  const ObsSpec spec = env.spec();
  NeighborhoodSet set = pan_run(env, config, seed);
  return neighborhoods_to_mask(set, spec.h, spec.w, spec.c, repeat);
}

std::pair<Mask, double> gen_l1(const std::string& env_name, const L1Config& config) {
  if (config.beta <= 0.0 || config.beta >= 1.0)
    throw std::invalid_argument("gen_l1: beta outside (0, 1)");

  std::unique_ptr<Environment> env = make_environment(env_name);
  const ObsSpec spec = env->spec();
  const int d = spec.flat_size();
  const Mask dense = all_ones(d, d * default_grouping_repeat(env_name));

  AgentConfig agent_config = config.agent;
  agent_config.hidden_frozen = false;
  agent_config.l1_beta = config.beta;

  DqnAgent<float> agent(*env, dense, agent_config, config.seed);
  for (long step = 0; step < agent_config.total_steps; ++step) agent.train_step();

  const Matrix<double> abs_phi = agent.net().phi.cwiseAbs().cast<double>();
  Mask mask = mask_from_magnitudes(abs_phi);
  return {mask, mask_sparsity(mask)};
}

}  // namespace sparseq
