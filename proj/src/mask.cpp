#include "sparseq/mask.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "sparseq/rng.hpp"

namespace sparseq {

Mask all_ones(int d, int n) {
  Mask m;
  m.bits = MaskMatrix::Ones(d, n);
  m.grouping_repeat = 1;
  return m;
}

Mask gen_random(int d, int n_distinct, int C, int k, int repeat, std::uint64_t seed) {
  const int per_group = k * C;
  if (per_group > d)
    throw std::invalid_argument("gen_random: k*C exceeds the number of inputs");
  if (d <= 0 || n_distinct <= 0 || repeat <= 0)
    throw std::invalid_argument("gen_random: dimensions must be positive");

  Mask m;
  m.grouping_repeat = repeat;
  m.bits = MaskMatrix::Zero(d, n_distinct * repeat);

  SplitMix64 rng(seed);
  std::vector<int> pool(d);
  for (int g = 0; g < n_distinct; ++g) {
    std::iota(pool.begin(), pool.end(), 0);
    // Partial Fisher-Yates: the first per_group entries become the grouping.
    for (int t = 0; t < per_group; ++t) {
      const int j = t + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(d - t)));
      std::swap(pool[t], pool[j]);
    }
    for (int t = 0; t < per_group; ++t)
      for (int r = 0; r < repeat; ++r) m.bits(pool[t], g * repeat + r) = 1;
  }
  return m;
}

Mask gen_spatial(int H, int W, int C, int kernel, int repeat) {
  if (kernel % 2 == 0 || kernel <= 0)
    throw std::invalid_argument("gen_spatial: kernel must be odd and positive");
  if (kernel > H || kernel > W)
    throw std::invalid_argument("gen_spatial: kernel exceeds grid");

  const int d = H * W * C;
  Mask m;
  m.grouping_repeat = repeat;
  m.bits = MaskMatrix::Zero(d, d * repeat);

  const int half = kernel / 2;
  for (int input = 0; input < d; ++input) {
    const int pos = input % (H * W);
    const int row = pos / W, col = pos % W;
    const int r0 = std::clamp(row - half, 0, H - kernel);
    const int c0 = std::clamp(col - half, 0, W - kernel);
    for (int dr = 0; dr < kernel; ++dr)
      for (int dc = 0; dc < kernel; ++dc)
        for (int ch = 0; ch < C; ++ch) {
          const int src = ch * H * W + (r0 + dr) * W + (c0 + dc);
          for (int r = 0; r < repeat; ++r) m.bits(src, input * repeat + r) = 1;
        }
  }
  return m;
}

double mask_sparsity(const Mask& mask) {
  const long total = static_cast<long>(mask.bits.size());
  long ones = 0;
  for (int j = 0; j < mask.bits.cols(); ++j)
    for (int i = 0; i < mask.bits.rows(); ++i) ones += mask.bits(i, j);
  return 1.0 - static_cast<double>(ones) / static_cast<double>(total);
}

Mask mask_from_magnitudes(const Matrix<double>& abs_phi) {
  const double mean = abs_phi.mean();
  Mask m;
  m.grouping_repeat = 1;
  m.bits = (abs_phi.array() >= mean).cast<std::uint8_t>();
  return m;
}

void save_mask(const Mask& mask, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_mask: cannot open " + path);
  out << "SPMASK1 " << mask.rows() << ' ' << mask.cols() << ' ' << mask.grouping_repeat
      << '\n';
  for (int j = 0; j < mask.cols(); ++j) {
    bool first = true;
    for (int i = 0; i < mask.rows(); ++i)
      if (mask.bits(i, j)) {
        if (!first) out << ' ';
        out << i;
        first = false;
      }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_mask: write failed for " + path);
}

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw std::runtime_error("load_mask: " + path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

Mask load_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_mask: cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) parse_fail(path, 1, "missing header");
  std::istringstream head(line);
  std::string magic;
  int d = 0, n = 0, repeat = 0;
  if (!(head >> magic >> d >> n >> repeat) || magic != "SPMASK1" || d <= 0 || n <= 0 ||
      repeat <= 0)
    parse_fail(path, 1, "malformed header, expected 'SPMASK1 d n repeat'");

  Mask m;
  m.grouping_repeat = repeat;
  m.bits = MaskMatrix::Zero(d, n);
  for (int j = 0; j < n; ++j) {
    const int line_no = j + 2;
    if (!std::getline(in, line)) parse_fail(path, line_no, "missing column line");
    std::istringstream row(line);
    long idx = 0, prev = -1;
    while (row >> idx) {
      if (idx < 0 || idx >= d) parse_fail(path, line_no, "row index out of range");
      if (idx <= prev) parse_fail(path, line_no, "row indices not strictly ascending");
      m.bits(static_cast<int>(idx), j) = 1;
      prev = idx;
    }
    if (!row.eof()) parse_fail(path, line_no, "trailing garbage");
  }
  return m;
}

MaskStats mask_stats(const Mask& mask) {
  MaskStats s;
  s.rows = mask.rows();
  s.cols = mask.cols();
  s.grouping_repeat = mask.grouping_repeat;

  long total_ones = 0;
  s.col_ones_min = s.rows + 1;
  s.col_ones_max = -1;
  for (int j = 0; j < s.cols; ++j) {
    int ones = 0;
    for (int i = 0; i < s.rows; ++i) ones += mask.bits(i, j);
    total_ones += ones;
    s.col_ones_min = std::min(s.col_ones_min, ones);
    s.col_ones_max = std::max(s.col_ones_max, ones);
  }
  s.ones = total_ones;
  s.col_ones_mean = static_cast<double>(total_ones) / static_cast<double>(s.cols);
  s.sparsity = 1.0 - static_cast<double>(total_ones) / static_cast<double>(mask.bits.size());

  s.grouping_structure_ok = (s.cols % mask.grouping_repeat == 0);
  for (int j = 0; s.grouping_structure_ok && j < s.cols; ++j) {
    const int block_start = (j / mask.grouping_repeat) * mask.grouping_repeat;
    if (j != block_start &&
        !(mask.bits.col(j).array() == mask.bits.col(block_start).array()).all())
      s.grouping_structure_ok = false;
  }
  return s;
}

}  // namespace sparseq
