#pragma once

#include <cstdint>
#include <string>

#include "sparseq/types.hpp"

namespace sparseq {

// Binary hidden-layer connectivity. Column j gates the inputs feeding hidden
// feature j. Structured masks (random/spatial/predictive) are built from
// `cols()/grouping_repeat` distinct input groupings, each repeated
// grouping_repeat times into contiguous columns.
struct Mask {
  MaskMatrix bits;
  int grouping_repeat = 1;

  int rows() const { return static_cast<int>(bits.rows()); }
  int cols() const { return static_cast<int>(bits.cols()); }
};

// Fully-connected baseline.
Mask all_ones(int d, int n);

// One grouping per distinct column block, each sampling k*C input indices
// uniformly without replacement from the d inputs.
Mask gen_random(int d, int n_distinct, int C, int k, int repeat, std::uint64_t seed);

// One grouping per input: the kernel x kernel window of spatial positions
// centered on the input's position, shifted inward at the borders so the
// window never shrinks, expanded across all C channels. The C inputs sharing
// a position get identical groupings. No RNG.
Mask gen_spatial(int H, int W, int C, int kernel, int repeat);

// Fraction of zero entries.
double mask_sparsity(const Mask& mask);

// Keep-above-average threshold used by the end-to-end sparsification route:
// bit = 1 iff |phi| >= mean(|phi|) (ties kept).
Mask mask_from_magnitudes(const Matrix<double>& abs_phi);

// SPMASK1 format: header "SPMASK1 d n repeat", then n lines, line j listing
// the sorted row indices set in column j (empty line for an empty column).
// save/load round-trips bit-exactly; malformed input raises an error naming
// the offending line.
void save_mask(const Mask& mask, const std::string& path);
Mask load_mask(const std::string& path);

struct MaskStats {
  int rows = 0, cols = 0, grouping_repeat = 1;
  double sparsity = 0.0;
  long ones = 0;
  int col_ones_min = 0, col_ones_max = 0;
  double col_ones_mean = 0.0;
  bool grouping_structure_ok = false;  // contiguous runs of `repeat` identical columns
};
MaskStats mask_stats(const Mask& mask);

}  // namespace sparseq
