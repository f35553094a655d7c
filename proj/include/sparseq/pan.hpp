#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sparseq/env.hpp"
#include "sparseq/gvf.hpp"
#include "sparseq/rng.hpp"
#include "sparseq/transition.hpp"

namespace sparseq {

// Phase-one configuration: GVF bank, neighborhood refresh, and the QV(0)
// behavior learner. Defaults follow the reference settings for the two games.
struct PanConfig {
  long steps = 0;
  int k = 9;
  double gvf_step_size = 3e-6;
  double gvf_discount = 0.99;
  long update_period = 1000;
  int n_pre = 16;
  double qv_step_size = 5e-6;
  double qv_discount = 0.99;
  double epsilon = 0.1;
};

// Linear value network over fixed random features of the current
// neighborhoods: each target contributes n_pre ReLU features reading only the
// k*C inputs of its neighborhood (bias 0). V and Q are linear in the feature
// vector. Features of unchanged neighborhoods (and their V/Q weights) survive
// a refresh; rebuilt ones restart at zero weight.
class PanValueNet {
 public:
  PanValueNet(NeighborhoodSet neighborhoods, int H, int W, int C, int num_actions,
              int n_pre, SplitMix64& feature_rng);

  int feature_dim() const { return static_cast<int>(v_weights_.size()); }
  int num_targets() const { return static_cast<int>(feature_weights_.size()); }

  Vector<double> features(const BinaryVector& obs) const;
  double state_value(const Vector<double>& features) const;
  Vector<double> action_values(const Vector<double>& features) const;

  // Swaps in new neighborhoods, regenerating random features (and zeroing the
  // V/Q weights) only for targets whose neighborhood changed, in ascending
  // target order from the shared feature stream.
  void refresh_neighborhoods(const NeighborhoodSet& next, SplitMix64& feature_rng);

  const NeighborhoodSet& neighborhoods() const { return neighborhoods_; }
  const Vector<double>& v_weights() const { return v_weights_; }
  const Matrix<double>& q_weights() const { return q_weights_; }
  const std::vector<Eigen::MatrixXd>& feature_weights() const { return feature_weights_; }
  const std::vector<std::vector<int>>& input_indices() const { return input_indices_; }
  void set_feature_weights(int target, Eigen::MatrixXd w) {
    feature_weights_[target] = std::move(w);
  }

  friend void qv0_update(PanValueNet& net, const Transition& transition, double step_size,
                         double gamma);

 private:
  void rebuild_target(int target, SplitMix64& feature_rng);
  std::vector<int> expand_inputs(const std::vector<int>& positions) const;

  NeighborhoodSet neighborhoods_;
  int h_ = 0, w_ = 0, c_ = 0, n_pre_ = 0;
  std::vector<Eigen::MatrixXd> feature_weights_;  // per target: n_pre x (k*C)
  std::vector<std::vector<int>> input_indices_;   // per target: the k*C flat inputs
  Vector<double> v_weights_;                      // m * n_pre
  Matrix<double> q_weights_;                      // (m * n_pre) x A
};

// Fully online QV(0): with phi = features(obs),
//   delta = r + gamma * V(obs') - V(obs)       (r - V(obs) on terminal)
//   v += alpha * delta * phi
//   q_a += alpha * (r + gamma * V(obs') - Q(obs, a)) * phi   (target r on terminal)
// No replay, no target network.
void qv0_update(PanValueNet& net, const Transition& transition, double step_size,
                double gamma);

struct PanRunStats {
  std::vector<long> neighborhood_change_steps;
  long episodes = 0;
};

// The phase-one loop: act epsilon-greedily on the QV(0) action values, update
// the GVF bank and the value net every step, re-select neighborhoods every
// update_period steps. Returns the final neighborhoods; fully determined by
// (seed, config).
NeighborhoodSet pan_run(Environment& env, const PanConfig& config, std::uint64_t seed,
                        PanRunStats* stats = nullptr);

// ASCII export, one line per target: "i: p1 p2 ... pk".
void save_neighborhoods(const NeighborhoodSet& set, const std::string& path);
NeighborhoodSet load_neighborhoods(const std::string& path);

}  // namespace sparseq
