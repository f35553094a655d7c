#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "sparseq/types.hpp"

namespace sparseq {

// Per-target spatial neighborhoods: positions[i] holds the k spatial positions
// (row-major position indices into the H*W grid) feeding target input i,
// sorted ascending.
struct NeighborhoodSet {
  int k = 0;
  std::vector<std::vector<int>> positions;

  bool operator==(const NeighborhoodSet&) const = default;
};

// Bank of linear one-per-input predictors of the discounted future value of
// each raw input (nexting). Row i of `weights` predicts input i.
struct GVFBank {
  Matrix<double> weights;  // m x d, m == d
  double step_size = 3e-6;
  double discount = 0.99;

  static GVFBank zeros(int d, double step_size, double discount) {
    GVFBank b;
    b.weights = Matrix<double>::Zero(d, d);
    b.step_size = step_size;
    b.discount = discount;
    return b;
  }
};

// TD(0) update of every predictor: for target i, with cumulant c = obs_next[i],
//   delta_i = c + discount * (U_i . obs_next) - (U_i . obs_t)
//   U_i    += step_size * delta_i * obs_t
// A zero obs_t leaves the bank unchanged.
inline void gvf_update(GVFBank& bank, const BinaryVector& obs_t, const BinaryVector& obs_next) {
  const auto d = bank.weights.cols();
  if (obs_t.size() != d || obs_next.size() != d)
    throw std::invalid_argument("gvf_update: observation length mismatch");

  Vector<double> pred_t = Vector<double>::Zero(bank.weights.rows());
  Vector<double> pred_next = pred_t;
  for (int j = 0; j < d; ++j) {
    if (obs_t[j]) pred_t += bank.weights.col(j);
    if (obs_next[j]) pred_next += bank.weights.col(j);
  }
  Vector<double> delta = obs_next.cast<double>() + bank.discount * pred_next - pred_t;
  delta *= bank.step_size;
  for (int j = 0; j < d; ++j)
    if (obs_t[j]) bank.weights.col(j) += delta;
}

// Scores spatial position p for target i by the channel-summed weight
// magnitude sum_c |U(i, c*H*W + p)| and keeps the k highest-scoring positions,
// ties broken by ascending position index.
inline NeighborhoodSet select_neighborhoods(const GVFBank& bank, int k, int H, int W, int C) {
  const int num_pos = H * W;
  if (k > num_pos) throw std::invalid_argument("select_neighborhoods: k exceeds H*W");
  const int m = static_cast<int>(bank.weights.rows());
  if (bank.weights.cols() != num_pos * C)
    throw std::invalid_argument("select_neighborhoods: bank width != H*W*C");

  NeighborhoodSet out;
  out.k = k;
  out.positions.resize(m);

  std::vector<double> score(num_pos);
  std::vector<int> order(num_pos);
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < num_pos; ++p) {
      double s = 0.0;
      for (int c = 0; c < C; ++c) s += std::abs(bank.weights(i, c * num_pos + p));
      score[p] = s;
    }
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (score[a] != score[b]) return score[a] > score[b];
      return a < b;
    });
    out.positions[i].assign(order.begin(), order.begin() + k);
    std::sort(out.positions[i].begin(), out.positions[i].end());
  }
  return out;
}

}  // namespace sparseq
