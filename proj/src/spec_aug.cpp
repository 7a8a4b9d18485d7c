#include "sonoforge/spec_aug.hpp"

#include <algorithm>
#include <cmath>

namespace sonoforge {

VtlnParams vtln_params_for(const GrayImage& img, double a, double b) {
  VtlnParams p;
  p.fmax = img.rows - 1;
  p.f0 = std::max(1, static_cast<int>(std::lround(0.8 * p.fmax)));
  if (p.f0 >= p.fmax) p.f0 = p.fmax - 1;
  p.a = a;
  p.b = b;
  p.alpha = 0.5 * (a + b);
  return p;
}

GrayImage spec_pitch_time_shift(const GrayImage& img, int row_shift,
                                int col_shift) {
  validate(img);
  require(std::abs(row_shift) < img.rows, ErrorCode::InvalidArgument,
          "spec shift: row_shift out of range");
  require(std::abs(col_shift) <= img.cols, ErrorCode::InvalidArgument,
          "spec shift: col_shift out of range");
  GrayImage out;
  out.rows = img.rows;
  out.cols = img.cols;
  out.pixels.assign(img.pixels.size(), 0);
  for (int r = 0; r < img.rows; ++r) {
    const int src_r = r + row_shift;
    if (src_r < 0 || src_r >= img.rows) continue;  // zero fill
    for (int c = 0; c < img.cols; ++c) {
      int src_c = (c + col_shift) % img.cols;
      if (src_c < 0) src_c += img.cols;
      out.at(r, c) = img.at(src_r, src_c);
    }
  }
  return out;
}

double vtln_map(double f, double f0, double fmax, double alpha) {
  if (f < f0) return alpha * f;
  return (fmax - alpha * f0) / (fmax - f0) * (f - f0) + alpha * f0;
}

namespace {

double vtln_map_inverse(double g, double f0, double fmax, double alpha) {
  const double knee = alpha * f0;
  if (g < knee) return g / alpha;
  return (g - knee) * (fmax - f0) / (fmax - knee) + f0;
}

std::uint8_t sample_column(const GrayImage& img, double r, int c) {
  const double rc = std::clamp(r, 0.0, double(img.rows - 1));
  const int r0 = static_cast<int>(rc);
  const int r1 = std::min(r0 + 1, img.rows - 1);
  const double w = rc - r0;
  const double v = (1.0 - w) * img.at(r0, c) + w * img.at(r1, c);
  return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
}

}  // namespace

GrayImage vtln_warp(const GrayImage& img, const VtlnParams& p, int n_slices,
                    RngStream& rng) {
  validate(img);
  require(n_slices >= 1 && img.cols >= n_slices, ErrorCode::InvalidArgument,
          "vtln_warp: image narrower than slice count");
  require(p.f0 > 0 && p.f0 < p.fmax && p.fmax <= img.rows - 1,
          ErrorCode::InvalidArgument, "vtln_warp: need 0 < f0 < fmax < rows");
  require(p.a <= p.b, ErrorCode::InvalidArgument, "vtln_warp: a > b");
  require(p.b * p.f0 < p.fmax, ErrorCode::InvalidArgument,
          "vtln_warp: alpha*f0 must stay below fmax");

  GrayImage out = img;
  for (int s = 0; s < n_slices; ++s) {
    const int c0 = static_cast<int>(std::size_t(s) * img.cols / n_slices);
    const int c1 = static_cast<int>(std::size_t(s + 1) * img.cols / n_slices);
    const double alpha = rng_uniform(rng, p.a, p.b);
    for (int c = c0; c < c1; ++c)
      for (int r = 0; r < img.rows; ++r) {
        const double src = vtln_map_inverse(r, p.f0, p.fmax, alpha);
        out.at(r, c) = sample_column(img, src, c);
      }
  }
  return out;
}

GrayImage spec_circular_time_shift(const GrayImage& img, int t_col) {
  validate(img);
  require(t_col >= 1 && t_col <= img.cols, ErrorCode::InvalidArgument,
          "spec_circular_time_shift: T out of [1, cols]");
  GrayImage out = img;
  const int shift = t_col - 1;  // columns [T..M] first, then [1..T-1]
  for (int c = 0; c < img.cols; ++c) {
    const int src = (c + shift) % img.cols;
    for (int r = 0; r < img.rows; ++r) out.at(r, c) = img.at(r, src);
  }
  return out;
}

namespace {

void zero_row_band(GrayImage& img, int start, int width) {
  for (int r = start; r < std::min(start + width, img.rows); ++r)
    for (int c = 0; c < img.cols; ++c) img.at(r, c) = 0;
}

void zero_col_band(GrayImage& img, int start, int width) {
  for (int c = start; c < std::min(start + width, img.cols); ++c)
    for (int r = 0; r < img.rows; ++r) img.at(r, c) = 0;
}

}  // namespace

GrayImage tps_warp_mask(const GrayImage& img, int n_anchors, double max_disp,
                        const MaskSpec& mask, RngStream& rng) {
  validate(img);
  require(n_anchors >= 2, ErrorCode::InvalidArgument,
          "tps_warp_mask: need at least two anchors");
  require(mask.max_rows == 0 || mask.row_width <= img.rows,
          ErrorCode::InvalidArgument, "tps_warp_mask: row mask wider than image");
  require(mask.max_cols == 0 || mask.col_width <= img.cols,
          ErrorCode::InvalidArgument, "tps_warp_mask: column mask wider than image");

  // Horizontal displacement field, linear between anchor columns.
  std::vector<double> anchor_pos(n_anchors), anchor_disp(n_anchors);
  for (int i = 0; i < n_anchors; ++i) {
    anchor_pos[i] = double(i) * (img.cols - 1) / (n_anchors - 1);
    anchor_disp[i] = rng_uniform(rng, -max_disp, max_disp);
  }

  GrayImage out = img;
  for (int c = 0; c < img.cols; ++c) {
    int seg = 0;
    while (seg + 2 < n_anchors && c > anchor_pos[seg + 1]) ++seg;
    const double span = anchor_pos[seg + 1] - anchor_pos[seg];
    const double w = span > 0.0 ? (c - anchor_pos[seg]) / span : 0.0;
    const double disp = (1.0 - w) * anchor_disp[seg] + w * anchor_disp[seg + 1];
    const double src = std::clamp(c + disp, 0.0, double(img.cols - 1));
    const int c0 = static_cast<int>(src);
    const int c1 = std::min(c0 + 1, img.cols - 1);
    const double f = src - c0;
    for (int r = 0; r < img.rows; ++r) {
      const double v = (1.0 - f) * img.at(r, c0) + f * img.at(r, c1);
      out.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
  }

  for (int i = 0; i < mask.max_rows; ++i)
    zero_row_band(out, int(rng_uniform_int(rng, img.rows - mask.row_width + 1)),
                  mask.row_width);
  for (int i = 0; i < mask.max_cols; ++i)
    zero_col_band(out, int(rng_uniform_int(rng, img.cols - mask.col_width + 1)),
                  mask.col_width);
  return out;
}

GrayImage freq_time_mask(const GrayImage& img, const MaskSpec& mask,
                         RngStream& rng) {
  validate(img);
  require(mask.row_width >= 1 && mask.row_width <= img.rows &&
              mask.col_width >= 1 && mask.col_width <= img.cols,
          ErrorCode::InvalidArgument, "freq_time_mask: mask wider than image");
  GrayImage out = img;
  const int k_rows = int(rng_uniform_int(rng, mask.max_rows + 1));
  for (int i = 0; i < k_rows; ++i)
    zero_row_band(out, int(rng_uniform_int(rng, img.rows - mask.row_width + 1)),
                  mask.row_width);
  const int k_cols = int(rng_uniform_int(rng, mask.max_cols + 1));
  for (int i = 0; i < k_cols; ++i)
    zero_col_band(out, int(rng_uniform_int(rng, img.cols - mask.col_width + 1)),
                  mask.col_width);
  return out;
}

GrayImage mult_noise(const GrayImage& img, double lo, double hi, double prob,
                     RngStream& rng) {
  validate(img);
  require(lo <= hi, ErrorCode::InvalidArgument, "mult_noise: lo > hi");
  require(prob >= 0.0 && prob <= 1.0, ErrorCode::InvalidArgument,
          "mult_noise: prob outside [0, 1]");
  GrayImage out = img;
  for (auto& px : out.pixels) {
    if (rng_uniform(rng, 0.0, 1.0) < prob) {
      const double u = rng_uniform(rng, lo, hi);
      px = static_cast<std::uint8_t>(std::clamp(std::lround(px * u), 0L, 255L));
    }
  }
  return out;
}

std::vector<GrayImage> augment_sspa(const GrayImage& img, RngStream rng,
                                    const SspaParams& p) {
  validate(img);
  std::vector<GrayImage> out;
  out.reserve(5);
  {
    RngStream s = rng_split(rng, 0);
    const int mr = p.max_row_shift > 0 ? p.max_row_shift
                                       : std::max(1, img.rows / 20);
    const int row = int(rng_uniform_int(s, 2 * mr + 1)) - mr;
    const int col = int(rng_uniform_int(s, img.cols));
    out.push_back(spec_pitch_time_shift(img, row, col));
  }
  {
    RngStream s = rng_split(rng, 1);
    const auto vp = vtln_params_for(img, p.vtln_a, p.vtln_b);
    out.push_back(vtln_warp(img, vp, std::min(p.vtln_slices, img.cols), s));
  }
  {
    RngStream s = rng_split(rng, 2);
    out.push_back(
        spec_circular_time_shift(img, 1 + int(rng_uniform_int(s, img.cols))));
  }
  {
    RngStream s = rng_split(rng, 3);
    const double disp = p.tps_disp_frac * img.cols;
    out.push_back(tps_warp_mask(img, p.tps_anchors, disp, p.tps_mask, s));
  }
  {
    RngStream s = rng_split(rng, 4);
    out.push_back(mult_noise(img, p.noise_lo, p.noise_hi, p.noise_prob, s));
  }
  return out;
}

std::vector<GrayImage> augment_susa(const GrayImage& img, RngStream rng,
                                    const SusaParams& p) {
  validate(img);
  std::vector<GrayImage> out;
  out.reserve(p.copies);
  for (int copy = 0; copy < p.copies; ++copy) {
    RngStream s = rng_split(rng, copy);
    const int row =
        int(rng_uniform_int(s, 2 * p.max_row_shift + 1)) - p.max_row_shift;
    GrayImage c = spec_pitch_time_shift(img, row, 0);
    const auto vp = vtln_params_for(c, p.vtln_a, p.vtln_b);
    c = vtln_warp(c, vp, std::min(p.vtln_slices, c.cols), s);
    c = spec_circular_time_shift(c, 1 + int(rng_uniform_int(s, c.cols)));
    c = freq_time_mask(c, p.mask, s);
    c = mult_noise(c, p.noise_lo, p.noise_hi, p.noise_prob, s);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sonoforge
