#pragma once

#include <filesystem>
#include <vector>

#include "sonoforge/errors.hpp"

namespace sonoforge {

/// Mono sample sequence. Samples are dimensionless amplitudes, nominal
/// range [-1, 1]; quantization happens only at WAV or image export.
struct AudioClip {
  std::vector<double> samples;
  int sample_rate = 0;  // Hz

  std::size_t size() const { return samples.size(); }
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

/// Throws unless the clip satisfies the type invariants
/// (rate > 0, length >= 1, all samples finite).
void validate(const AudioClip& clip);

/// Reads a RIFF/WAVE file: PCM 8/16/24/32-bit or 32-bit float.
/// Multi-channel input is averaged to mono; integer samples are scaled
/// to [-1, 1) by 2^(bits-1).
AudioClip load_wav(const std::filesystem::path& path);

/// Writes 16-bit PCM mono, little-endian, fmt+data chunks only.
/// Samples are clamped to [-1, 1 - 2^-15] and rounded to the nearest code.
void save_wav(const AudioClip& clip, const std::filesystem::path& path);

/// Band-limited rate conversion (windowed-sinc, 64-tap at unity ratio).
/// Output length = round(len * new_rate / old_rate).
AudioClip resample(const AudioClip& clip, double new_rate);

/// Windowed-sinc read of x at fractional position t (samples); out-of-range
/// taps read as zero. cutoff is in cycles/sample, (0, 0.5].
double sinc_interpolate(const std::vector<double>& x, double t,
                        double cutoff = 0.46, int half_taps = 32);

}  // namespace sonoforge
