#pragma once

#include <cstdio>
#include <deque>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "sparseq/adam.hpp"
#include "sparseq/env.hpp"
#include "sparseq/io_util.hpp"
#include "sparseq/loss.hpp"
#include "sparseq/mask.hpp"
#include "sparseq/network.hpp"
#include "sparseq/replay.hpp"
#include "sparseq/rng.hpp"

namespace sparseq {

struct AgentConfig {
  double gamma = 0.99;
  double epsilon = 0.1;
  double step_size = 1e-4;
  int buffer_capacity = 100'000;
  int batch_size = 32;
  long target_sync_period = 1'000;
  long learning_start = 5'000;
  long total_steps = 0;
  long sample_period = 10'000;
  bool hidden_frozen = false;
  double l1_beta = 0.0;  // > 0 switches the training loss to the L1-regularized one
};

// Epsilon-greedy over the network's action values, ties to the lowest index.
template <class T>
int select_action(const QNetwork<T>& net, const BinaryVector& obs, double epsilon,
                  SplitMix64& rng) {
  if (rng.next_double() < epsilon)
    return static_cast<int>(rng.next_below(net.num_actions()));
  Vector<T> q = forward(net, obs);
  int best = 0;
  for (int a = 1; a < q.size(); ++a)
    if (q[a] > q[best]) best = a;
  return best;
}

struct StepReport {
  double reward = 0.0;
  bool terminal = false;
  bool trained = false;
  double loss = 0.0;
};

// One trial's ownership domain: environment cursor, online/target networks,
// replay buffer, optimizer state, and the derived RNG streams.
template <class T>
class DqnAgent {
 public:
  DqnAgent(Environment& env, const Mask& mask, const AgentConfig& config,
           std::uint64_t seed)
      : env_(env),
        config_(config),
        buffer_(config.buffer_capacity),
        env_rng_(derive_seed(seed, 3)),
        action_rng_(derive_seed(seed, 2)),
        replay_rng_(derive_seed(seed, 4)) {
    const ObsSpec spec = env.spec();
    if (mask.rows() != spec.flat_size())
      throw std::invalid_argument("DqnAgent: mask rows do not match the observation size");
    net_ = init_network<T>(spec.flat_size(), mask.cols(), spec.num_actions, mask.bits,
                           derive_seed(seed, 1), config.hidden_frozen);
    target_ = net_;
    state_ = AdamState<T>::zero_like(net_, config.step_size);
    obs_ = env_.reset(env_rng_.next());
  }

  StepReport train_step() {
    ++step_;
    StepReport report;

    const int action = select_action(net_, obs_.flat, config_.epsilon, action_rng_);
    StepResult result = env_.step(action);
    report.reward = result.reward;
    report.terminal = result.terminal;
    episode_return_ += result.reward;
    buffer_.add(Transition{obs_.flat, action, result.reward, result.obs.flat,
                           result.terminal});

    if (step_ >= config_.learning_start) {
      const std::vector<Transition> batch =
          buffer_.sample_batch(config_.batch_size, replay_rng_);
      if (config_.l1_beta > 0.0) {
        report.loss = l1_loss_and_grads(net_, target_, std::span(batch), config_.gamma,
                                        config_.l1_beta, grads_);
      } else {
        report.loss = dqn_loss_and_grads(net_, target_, std::span(batch), config_.gamma,
                                         grads_);
      }
      adam_step(net_, grads_, state_);
      report.trained = true;
    }

    if (step_ % config_.target_sync_period == 0) target_ = net_;

    if (result.terminal) {
      recent_returns_.push_back(episode_return_);
      if (recent_returns_.size() > 100) recent_returns_.pop_front();
      episode_return_ = 0.0;
      ++episodes_;
      obs_ = env_.reset(env_rng_.next());
    } else {
      obs_ = std::move(result.obs);
    }
    return report;
  }

  // Mean undiscounted return over the trailing (up to) 100 completed episodes.
  double mean_recent_return() const {
    if (recent_returns_.empty()) return 0.0;
    double sum = 0.0;
    for (double r : recent_returns_) sum += r;
    return sum / static_cast<double>(recent_returns_.size());
  }

  long step_count() const { return step_; }
  long episodes() const { return episodes_; }
  const QNetwork<T>& net() const { return net_; }
  const QNetwork<T>& target_net() const { return target_; }
  const ReplayBuffer& buffer() const { return buffer_; }

 private:
  Environment& env_;
  AgentConfig config_;
  QNetwork<T> net_, target_;
  AdamState<T> state_;
  Gradients<T> grads_;
  ReplayBuffer buffer_;
  SplitMix64 env_rng_, action_rng_, replay_rng_;
  Observation obs_;
  double episode_return_ = 0.0;
  std::deque<double> recent_returns_;
  long step_ = 0;
  long episodes_ = 0;
};

struct TrialSample {
  long step = 0;
  long episodes = 0;
  double mean_return = 0.0;
};

struct TrialResult {
  std::vector<TrialSample> samples;
  std::string config_hash;
  double epsilon = 0.0;
  double alpha = 0.0;
};

int default_grouping_repeat(const std::string& env_name);

// Builds the mask named by mask_source for the given environment:
// "dense", "random", "spatial", "predictive:<path>", "l1:<path>".
// Path-based sources are loaded and dimension-checked; "random" derives its
// bits from the trial seed.
Mask build_trial_mask(const std::string& env_name, const std::string& mask_source,
                      const ObsSpec& spec, std::uint64_t seed);

// Canonical key=value map describing one trial configuration (seed excluded,
// mask file contents hashed in), used for the config fingerprint stamped into
// every output row.
std::map<std::string, std::string> trial_config_kv(const std::string& env_name,
                                                   const std::string& mask_source,
                                                   const AgentConfig& config);

// Runs one full trial: builds/loads the mask, initializes the network from the
// seed, interacts for config.total_steps, and records the trailing-100-episode
// mean return every sample_period steps. Byte-reproducible from
// (seed, config, mask file contents).
template <class T>
TrialResult run_trial(const std::string& env_name, const std::string& mask_source,
                      const AgentConfig& config, std::uint64_t seed) {
  std::unique_ptr<Environment> env = make_environment(env_name);
  const Mask mask = build_trial_mask(env_name, mask_source, env->spec(), seed);

  DqnAgent<T> agent(*env, mask, config, seed);
  TrialResult result;
  result.config_hash = fingerprint(trial_config_kv(env_name, mask_source, config));
  result.epsilon = config.epsilon;
  result.alpha = config.step_size;
  for (long step = 1; step <= config.total_steps; ++step) {
    agent.train_step();
    if (step % config.sample_period == 0)
      result.samples.push_back({step, agent.episodes(), agent.mean_recent_return()});
  }
  return result;
}

std::string trial_csv_text(const TrialResult& result);
void write_trial_csv(const TrialResult& result, const std::string& path);
TrialResult read_trial_csv(const std::string& path);

}  // namespace sparseq
