#pragma once

#include <vector>

#include "sonoforge/image.hpp"
#include "sonoforge/rng.hpp"

namespace sonoforge {

/// Piecewise-linear frequency warp. f0 and fmax are row indices
/// (0 < f0 < fmax); per temporal slice the factor is drawn in [a, b].
struct VtlnParams {
  double alpha = 1.0;
  int f0 = 0;
  int fmax = 0;
  double a = 0.9, b = 1.1;
};

/// f0 defaults to round(0.8 * fmax) when not given.
VtlnParams vtln_params_for(const GrayImage& img, double a = 0.9, double b = 1.1);

/// Row/column zeroing dimensions and counts.
struct MaskSpec {
  int row_width = 1;
  int col_width = 1;
  int max_rows = 2;
  int max_cols = 2;
};

/// Rows shifted with zero fill (pitch), columns shifted circularly (time).
GrayImage spec_pitch_time_shift(const GrayImage& img, int row_shift,
                                int col_shift);

/// The warp map G(f): alpha*f below f0, then linear up to G(fmax) = fmax.
double vtln_map(double f, double f0, double fmax, double alpha);

/// Per temporal slice, rows are resampled through G with a factor drawn
/// independently in [p.a, p.b].
GrayImage vtln_warp(const GrayImage& img, const VtlnParams& p, int n_slices,
                    RngStream& rng);

/// Columns reordered to [T..M], [1..T-1] (T is 1-based, in [1, cols]).
GrayImage spec_circular_time_shift(const GrayImage& img, int t_col);

/// Horizontal-only warp: anchor columns displaced by draws in
/// [-max_disp, max_disp], others interpolated; then mask.max_rows row
/// bands of width mask.row_width and mask.max_cols column bands of width
/// mask.col_width are zeroed (counts of 0 disable masking).
GrayImage tps_warp_mask(const GrayImage& img, int n_anchors, double max_disp,
                        const MaskSpec& mask, RngStream& rng);

/// k_rows ~ U{0..max_rows}, k_cols ~ U{0..max_cols}; chosen bands zeroed.
GrayImage freq_time_mask(const GrayImage& img, const MaskSpec& mask,
                         RngStream& rng);

/// Each pixel is multiplied, with the given probability, by an
/// independent draw u ~ U[lo, hi]; result clamped to [0, 255].
GrayImage mult_noise(const GrayImage& img, double lo, double hi, double prob,
                     RngStream& rng);

struct SspaParams {
  int max_row_shift = 0;   // 0 selects max(1, rows/20)
  double vtln_a = 0.9, vtln_b = 1.1;
  int vtln_slices = 10;
  int tps_anchors = 5;
  double tps_disp_frac = 0.05;  // of image width
  MaskSpec tps_mask{5, 15, 2, 1};
  double noise_lo = 1.0 - 1.7320508075688772;  // mean 1, variance 1
  double noise_hi = 1.0 + 1.7320508075688772;
  double noise_prob = 0.3;
};

struct SusaParams {
  int max_row_shift = 1;
  double vtln_a = 0.9, vtln_b = 1.1;
  int vtln_slices = 10;
  MaskSpec mask{1, 1, 2, 2};
  double noise_lo = 0.3, noise_hi = 1.7;
  double noise_prob = 0.1;
  int copies = 29;
};

/// Five copies, one transform each: shift, VTLN, circular time shift,
/// TPS warp + mask, multiplicative noise.
std::vector<GrayImage> augment_sspa(const GrayImage& img, RngStream rng,
                                    const SspaParams& p = {});

/// Twenty-nine copies, each applying the five transforms in order with
/// independently randomized parameters.
std::vector<GrayImage> augment_susa(const GrayImage& img, RngStream rng,
                                    const SusaParams& p = {});

}  // namespace sonoforge
