#include "sparseq/pan.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sparseq {

PanValueNet::PanValueNet(NeighborhoodSet neighborhoods, int H, int W, int C,
                         int num_actions, int n_pre, SplitMix64& feature_rng)
    : neighborhoods_(std::move(neighborhoods)), h_(H), w_(W), c_(C), n_pre_(n_pre) {
  const int m = static_cast<int>(neighborhoods_.positions.size());
  if (m == 0) throw std::invalid_argument("PanValueNet: empty neighborhood set");
  feature_weights_.resize(m);
  input_indices_.resize(m);
  v_weights_ = Vector<double>::Zero(m * n_pre_);
  q_weights_ = Matrix<double>::Zero(m * n_pre_, num_actions);
  for (int g = 0; g < m; ++g) rebuild_target(g, feature_rng);
}

std::vector<int> PanValueNet::expand_inputs(const std::vector<int>& positions) const {
  std::vector<int> inputs;
  inputs.reserve(positions.size() * c_);
  for (int ch = 0; ch < c_; ++ch)
    for (int p : positions) inputs.push_back(ch * h_ * w_ + p);
  return inputs;
}

void PanValueNet::rebuild_target(int target, SplitMix64& feature_rng) {
  input_indices_[target] = expand_inputs(neighborhoods_.positions[target]);
  const int fan_in = static_cast<int>(input_indices_[target].size());
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  Eigen::MatrixXd w(n_pre_, fan_in);
  for (int j = 0; j < n_pre_; ++j)
    for (int i = 0; i < fan_in; ++i) w(j, i) = feature_rng.uniform(-bound, bound);
  feature_weights_[target] = std::move(w);
  v_weights_.segment(target * n_pre_, n_pre_).setZero();
  q_weights_.middleRows(target * n_pre_, n_pre_).setZero();
}

void PanValueNet::refresh_neighborhoods(const NeighborhoodSet& next, SplitMix64& feature_rng) {
  if (next.positions.size() != neighborhoods_.positions.size())
    throw std::invalid_argument("refresh_neighborhoods: target count changed");
  for (int g = 0; g < num_targets(); ++g) {
    if (next.positions[g] != neighborhoods_.positions[g]) {
      neighborhoods_.positions[g] = next.positions[g];
      rebuild_target(g, feature_rng);
    }
  }
  neighborhoods_.k = next.k;
}

Vector<double> PanValueNet::features(const BinaryVector& obs) const {
  Vector<double> f(feature_dim());
  Eigen::VectorXd gathered;
  for (int g = 0; g < num_targets(); ++g) {
    const auto& idx = input_indices_[g];
    gathered.resize(static_cast<int>(idx.size()));
    for (std::size_t i = 0; i < idx.size(); ++i)
      gathered[static_cast<int>(i)] = static_cast<double>(obs[idx[i]]);
    f.segment(g * n_pre_, n_pre_) =
        (feature_weights_[g] * gathered).cwiseMax(0.0);
  }
  return f;
}

double PanValueNet::state_value(const Vector<double>& features) const {
  return v_weights_.dot(features);
}

Vector<double> PanValueNet::action_values(const Vector<double>& features) const {
  return q_weights_.transpose() * features;
}

void qv0_update(PanValueNet& net, const Transition& transition, double step_size,
                double gamma) {
  const Vector<double> f = net.features(transition.obs);
  double next_v = 0.0;
  if (!transition.terminal) {
    const Vector<double> f_next = net.features(transition.next_obs);
    next_v = net.state_value(f_next);
  }
  const double target = transition.reward + gamma * (transition.terminal ? 0.0 : next_v);
  const double v_delta = target - net.state_value(f);
  const double q_delta = target - net.q_weights_.col(transition.action).dot(f);
  net.v_weights_ += step_size * v_delta * f;
  net.q_weights_.col(transition.action) += step_size * q_delta * f;
}

NeighborhoodSet pan_run(Environment& env, const PanConfig& config, std::uint64_t seed,
                        PanRunStats* stats) {
  const ObsSpec spec = env.spec();
  const int d = spec.flat_size();

  SplitMix64 env_rng(derive_seed(seed, 1));
  SplitMix64 action_rng(derive_seed(seed, 2));
  SplitMix64 feature_rng(derive_seed(seed, 3));

  GVFBank bank = GVFBank::zeros(d, config.gvf_step_size, config.gvf_discount);
  NeighborhoodSet nbhd = select_neighborhoods(bank, config.k, spec.h, spec.w, spec.c);
  PanValueNet net(nbhd, spec.h, spec.w, spec.c, spec.num_actions, config.n_pre,
                  feature_rng);

  Observation obs = env.reset(env_rng.next());
  for (long step = 1; step <= config.steps; ++step) {
    int action;
    if (action_rng.next_double() < config.epsilon) {
      action = static_cast<int>(action_rng.next_below(spec.num_actions));
    } else {
      const Vector<double> q = net.action_values(net.features(obs.flat));
      int best = 0;
      for (int a = 1; a < q.size(); ++a)
        if (q[a] > q[best]) best = a;
      action = best;
    }

    StepResult result = env.step(action);
    gvf_update(bank, obs.flat, result.obs.flat);
    qv0_update(net,
               Transition{obs.flat, action, result.reward, result.obs.flat, result.terminal},
               config.qv_step_size, config.qv_discount);

    if (result.terminal) {
      if (stats) ++stats->episodes;
      obs = env.reset(env_rng.next());
    } else {
      obs = std::move(result.obs);
    }

    if (step % config.update_period == 0) {
      NeighborhoodSet next = select_neighborhoods(bank, config.k, spec.h, spec.w, spec.c);
      if (stats && !(next == net.neighborhoods()))
        stats->neighborhood_change_steps.push_back(step);
      net.refresh_neighborhoods(next, feature_rng);
    }
  }
  return net.neighborhoods();
}

void save_neighborhoods(const NeighborhoodSet& set, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_neighborhoods: cannot open " + path);
  for (std::size_t i = 0; i < set.positions.size(); ++i) {
    out << i << ':';
    for (int p : set.positions[i]) out << ' ' << p;
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_neighborhoods: write failed for " + path);
}

NeighborhoodSet load_neighborhoods(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_neighborhoods: cannot open " + path);
  NeighborhoodSet set;
  std::string line;
  long expected = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    long index = 0;
    char colon = 0;
    if (!(row >> index >> colon) || colon != ':' || index != expected)
      throw std::runtime_error("load_neighborhoods: " + path + ": bad line " +
                               std::to_string(expected + 1));
    std::vector<int> positions;
    int p = 0;
    while (row >> p) positions.push_back(p);
    set.positions.push_back(std::move(positions));
    ++expected;
  }
  if (!set.positions.empty()) set.k = static_cast<int>(set.positions.front().size());
  return set;
}

}  // namespace sparseq
