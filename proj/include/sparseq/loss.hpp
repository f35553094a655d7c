#pragma once

#include <span>
#include <stdexcept>
#include <utility>

#include "sparseq/network.hpp"
#include "sparseq/transition.hpp"

namespace sparseq {

// Parameter-shaped gradient accumulators. When the hidden layer is frozen the
// hidden blocks are identically zero; they are reported as empty matrices and
// the optimizer skips them.
template <class T>
struct Gradients {
  Matrix<T> phi;
  Vector<T> hidden_bias;
  Matrix<T> w_out;
  Vector<T> out_bias;
};

namespace detail {

template <class T>
void prepare_gradients(const QNetwork<T>& net, Gradients<T>& g) {
  if (net.hidden_frozen) {
    g.phi.resize(0, 0);
    g.hidden_bias.resize(0);
  } else {
    g.phi.resize(net.phi.rows(), net.phi.cols());
    g.phi.setZero();
    g.hidden_bias = Vector<T>::Zero(net.hidden_bias.size());
  }
  g.w_out.resize(net.w_out.rows(), net.w_out.cols());
  g.w_out.setZero();
  g.out_bias = Vector<T>::Zero(net.out_bias.size());
}

}  // namespace detail

// Squared TD-error loss of DQN, averaged over the batch, with its analytic
// gradients. Per transition the bootstrap target is
//   y = r                                   if terminal
//   y = r + gamma * max_a' q_target(o', a') otherwise
// and y is a constant: no gradient flows through the target network.
// Gradient entries at masked-off phi positions are forced to zero.
template <class T>
T dqn_loss_and_grads(const QNetwork<T>& net, const QNetwork<T>& target_net,
                     std::span<const Transition> batch, double gamma,
                     Gradients<T>& grads) {
  if (batch.empty()) throw std::invalid_argument("dqn_loss_and_grads: empty batch");
  if (!same_shape(net, target_net))
    throw std::invalid_argument("dqn_loss_and_grads: online/target shape mismatch");
  if (gamma < 0.0 || gamma >= 1.0)
    throw std::invalid_argument("dqn_loss_and_grads: gamma outside [0, 1)");

  detail::prepare_gradients(net, grads);

  const int num_actions = net.num_actions();
  const T inv_b = T(1) / static_cast<T>(batch.size());
  T loss = T(0);

  Vector<T> pre(net.hidden());
  for (const Transition& tr : batch) {
    if (tr.action < 0 || tr.action >= num_actions)
      throw std::invalid_argument("dqn_loss_and_grads: action index out of range");

    T y = static_cast<T>(tr.reward);
    if (!tr.terminal) {
      Vector<T> q_next = forward(target_net, tr.next_obs);
      y += static_cast<T>(gamma) * q_next.maxCoeff();
    }

    // Online forward, keeping the pre-activation for the ReLU derivative.
    if (tr.obs.size() != net.phi.rows())
      throw std::invalid_argument("dqn_loss_and_grads: observation length mismatch");
    pre = net.hidden_bias;
    for (int i = 0; i < tr.obs.size(); ++i)
      if (tr.obs[i]) pre += net.phi.row(i).transpose();
    Vector<T> h = pre.cwiseMax(T(0));
    const T q_sa = net.w_out.col(tr.action).dot(h) + net.out_bias[tr.action];

    const T err = q_sa - y;
    loss += err * err * inv_b;

    // d loss / d q_sa, then backprop through the linear head and the ReLU.
    const T dq = T(2) * err * inv_b;
    grads.out_bias[tr.action] += dq;
    grads.w_out.col(tr.action) += dq * h;

    if (!net.hidden_frozen) {
      Vector<T> dpre =
          (dq * net.w_out.col(tr.action).array() * (pre.array() > T(0)).template cast<T>())
              .matrix();
      grads.hidden_bias += dpre;
      for (int i = 0; i < tr.obs.size(); ++i)
        if (tr.obs[i]) grads.phi.row(i) += dpre.transpose();
    }
  }

  if (!net.hidden_frozen) {
    // Mask the hidden-weight gradient. Only rows touched by the batch can be
    // nonzero, but masking the full block keeps this independent of batch
    // content; it is a single elementwise pass.
    grads.phi.array() *= net.mask.template cast<T>().array();
  }
  return loss;
}

template <class T>
std::pair<T, Gradients<T>> dqn_loss_and_grads(const QNetwork<T>& net,
                                              const QNetwork<T>& target_net,
                                              std::span<const Transition> batch,
                                              double gamma) {
  Gradients<T> g;
  T loss = dqn_loss_and_grads(net, target_net, batch, gamma, g);
  return {loss, std::move(g)};
}

// DQN loss plus beta * ||phi||_1. The penalty applies to the hidden weights
// only; its subgradient uses sign(0) = 0, so masked (zero) entries contribute
// nothing and the mask pass stays a no-op for them.
template <class T>
T l1_loss_and_grads(const QNetwork<T>& net, const QNetwork<T>& target_net,
                    std::span<const Transition> batch, double gamma, double beta,
                    Gradients<T>& grads) {
  if (beta < 0.0 || beta >= 1.0)
    throw std::invalid_argument("l1_loss_and_grads: beta outside [0, 1)");

  T loss = dqn_loss_and_grads(net, target_net, batch, gamma, grads);
  if (beta == 0.0) return loss;  // bitwise identical to the plain loss
  loss += static_cast<T>(beta) * net.phi.template lpNorm<1>();
  if (!net.hidden_frozen) {
    grads.phi.array() += static_cast<T>(beta) * net.phi.array().sign();
  }
  return loss;
}

template <class T>
std::pair<T, Gradients<T>> l1_loss_and_grads(const QNetwork<T>& net,
                                             const QNetwork<T>& target_net,
                                             std::span<const Transition> batch,
                                             double gamma, double beta) {
  Gradients<T> g;
  T loss = l1_loss_and_grads(net, target_net, batch, gamma, beta, g);
  return {loss, std::move(g)};
}

}  // namespace sparseq
