#pragma once

#include <cmath>
#include <stdexcept>

#include "sparseq/loss.hpp"
#include "sparseq/network.hpp"

namespace sparseq {

// Bias-corrected Adam moments for every parameter block of a QNetwork.
// Conventional defaults: beta1 = 0.9, beta2 = 0.999, epsilon = 1e-8.
template <class T>
struct AdamState {
  Matrix<T> m_phi, v_phi;
  Vector<T> m_hidden_bias, v_hidden_bias;
  Matrix<T> m_w_out, v_w_out;
  Vector<T> m_out_bias, v_out_bias;
  long step_count = 0;
  double step_size = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState zero_like(const QNetwork<T>& net, double step_size) {
    AdamState s;
    s.step_size = step_size;
    s.m_phi = Matrix<T>::Zero(net.phi.rows(), net.phi.cols());
    s.v_phi = s.m_phi;
    s.m_hidden_bias = Vector<T>::Zero(net.hidden_bias.size());
    s.v_hidden_bias = s.m_hidden_bias;
    s.m_w_out = Matrix<T>::Zero(net.w_out.rows(), net.w_out.cols());
    s.v_w_out = s.m_w_out;
    s.m_out_bias = Vector<T>::Zero(net.out_bias.size());
    s.v_out_bias = s.m_out_bias;
    return s;
  }
};

namespace detail {

template <class P, class G, class M, class T>
void adam_update_block(P&& param, const G& grad, M& m, M& v, T alpha, T beta1,
                       T beta2, T eps, T bias1, T bias2) {
  m = beta1 * m + (T(1) - beta1) * grad;
  v = beta2 * v + (T(1) - beta2) * grad.cwiseProduct(grad);
  param.array() -=
      alpha * (m.array() / bias1) / ((v.array() / bias2).sqrt() + eps);
}

}  // namespace detail

// One Adam step over all trainable parameter blocks. With a frozen hidden
// layer (signalled by empty hidden gradient blocks) phi and hidden_bias are
// left untouched, byte for byte. After the update the mask is re-applied to
// phi: gradients are already masked, but the moment accumulators could
// otherwise leak updates into masked positions.
template <class T>
void adam_step(QNetwork<T>& net, const Gradients<T>& grads, AdamState<T>& state) {
  const bool hidden_trained = grads.phi.size() > 0;
  if (grads.w_out.rows() != net.w_out.rows() || grads.w_out.cols() != net.w_out.cols() ||
      grads.out_bias.size() != net.out_bias.size() ||
      (hidden_trained &&
       (grads.phi.rows() != net.phi.rows() || grads.phi.cols() != net.phi.cols() ||
        grads.hidden_bias.size() != net.hidden_bias.size())))
    throw std::invalid_argument("adam_step: gradient shape mismatch");
  if (hidden_trained == net.hidden_frozen)
    throw std::invalid_argument(
        net.hidden_frozen ? "adam_step: hidden gradients supplied for a frozen network"
                          : "adam_step: missing hidden gradients for a trainable network");

  state.step_count += 1;
  const T alpha = static_cast<T>(state.step_size);
  const T beta1 = static_cast<T>(state.beta1);
  const T beta2 = static_cast<T>(state.beta2);
  const T eps = static_cast<T>(state.epsilon);
  const T bias1 = T(1) - static_cast<T>(std::pow(state.beta1, state.step_count));
  const T bias2 = T(1) - static_cast<T>(std::pow(state.beta2, state.step_count));

  if (hidden_trained) {
    detail::adam_update_block(net.phi, grads.phi, state.m_phi, state.v_phi, alpha,
                              beta1, beta2, eps, bias1, bias2);
    detail::adam_update_block(net.hidden_bias, grads.hidden_bias, state.m_hidden_bias,
                              state.v_hidden_bias, alpha, beta1, beta2, eps, bias1, bias2);
    apply_mask(net);
  }
  detail::adam_update_block(net.w_out, grads.w_out, state.m_w_out, state.v_w_out,
                            alpha, beta1, beta2, eps, bias1, bias2);
  detail::adam_update_block(net.out_bias, grads.out_bias, state.m_out_bias,
                            state.v_out_bias, alpha, beta1, beta2, eps, bias1, bias2);
}

}  // namespace sparseq
