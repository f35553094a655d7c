#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace sparseq {

// Row-major throughout: the hot loops accumulate and scatter whole rows of the
// hidden weight matrix (one row per active input pixel), which wants rows
// contiguous in memory.
template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Binary data (observations, connectivity masks) is stored as uint8 0/1.
using MaskMatrix = Matrix<std::uint8_t>;
using BinaryVector = Vector<std::uint8_t>;

// Indices of the set entries of a binary vector, ascending.
inline std::vector<int> active_indices(const BinaryVector& v) {
  std::vector<int> idx;
  idx.reserve(64);
  for (int i = 0; i < v.size(); ++i)
    if (v[i]) idx.push_back(i);
  return idx;
}

}  // namespace sparseq
