#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "sparseq/rng.hpp"
#include "sparseq/types.hpp"

namespace sparseq {

// Single-hidden-layer Q-network with a fixed binary connectivity mask on the
// hidden weights. Masked entries of phi are pinned at exactly zero at all
// times: construction applies the mask and every optimizer step re-applies it,
// so the masked product mask.*phi reduces to phi itself in the forward pass.
template <class T>
struct QNetwork {
  Matrix<T> phi;         // d x n hidden weights
  MaskMatrix mask;       // d x n, 0/1
  Vector<T> hidden_bias; // n
  Matrix<T> w_out;       // n x A, column a holds the output weights for action a
  Vector<T> out_bias;    // A
  bool hidden_frozen = false;

  int inputs() const { return static_cast<int>(phi.rows()); }
  int hidden() const { return static_cast<int>(phi.cols()); }
  int num_actions() const { return static_cast<int>(w_out.cols()); }
};

// Zeroes every phi entry whose mask bit is 0.
template <class T>
void apply_mask(QNetwork<T>& net) {
  net.phi.array() *= net.mask.template cast<T>().array();
}

template <class T>
bool same_shape(const QNetwork<T>& a, const QNetwork<T>& b) {
  return a.phi.rows() == b.phi.rows() && a.phi.cols() == b.phi.cols() &&
         a.w_out.rows() == b.w_out.rows() && a.w_out.cols() == b.w_out.cols();
}

// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero, mask
// applied last. Draw order is fixed (phi row-major, then w_out row-major) so
// one seed always produces bitwise-identical networks.
template <class T>
QNetwork<T> init_network(int d, int n, int num_actions, const MaskMatrix& mask,
                         std::uint64_t seed, bool hidden_frozen = false) {
  if (d <= 0 || n <= 0 || num_actions <= 0)
    throw std::invalid_argument("init_network: dimensions must be positive");
  if (mask.rows() != d || mask.cols() != n)
    throw std::invalid_argument("init_network: mask shape does not match (d, n)");

  QNetwork<T> net;
  net.mask = mask;
  net.hidden_frozen = hidden_frozen;
  net.phi.resize(d, n);
  net.w_out.resize(n, num_actions);
  net.hidden_bias = Vector<T>::Zero(n);
  net.out_bias = Vector<T>::Zero(num_actions);

  SplitMix64 rng(seed);
  const double phi_bound = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < n; ++j)
      net.phi(i, j) = static_cast<T>(rng.uniform(-phi_bound, phi_bound));
  const double out_bound = 1.0 / std::sqrt(static_cast<double>(n));
  for (int j = 0; j < n; ++j)
    for (int a = 0; a < num_actions; ++a)
      net.w_out(j, a) = static_cast<T>(rng.uniform(-out_bound, out_bound));

  apply_mask(net);
  return net;
}

// Hidden activations h = relu(phi^T obs + hidden_bias) for a binary
// observation, accumulated over the active input rows.
template <class T>
Vector<T> hidden_activations(const QNetwork<T>& net, const BinaryVector& obs) {
  if (obs.size() != net.phi.rows())
    throw std::invalid_argument("forward: observation length does not match input dim");
  Vector<T> pre = net.hidden_bias;
  for (int i = 0; i < obs.size(); ++i)
    if (obs[i]) pre += net.phi.row(i).transpose();
  return pre.cwiseMax(T(0));
}

// q[a] = w_a^T relu((mask.*phi)^T obs + hidden_bias) + out_bias[a].
// Pure function of (net, obs).
template <class T>
Vector<T> forward(const QNetwork<T>& net, const BinaryVector& obs) {
  Vector<T> h = hidden_activations(net, obs);
  return net.w_out.transpose() * h + net.out_bias;
}

}  // namespace sparseq
