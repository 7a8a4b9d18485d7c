#pragma once

#include <numbers>
#include <vector>

#include "sonoforge/audio.hpp"

namespace sonoforge {

/// Real-valued frequency x time matrix. Rows are frequency bins ordered
/// low to high, columns are time frames.
struct TimeFreqMatrix {
  std::vector<double> values;  // row-major rows*cols
  int rows = 0;
  int cols = 0;
  double bin_hz = 0.0;          // Hz per row on uniform grids (DGT)
  std::vector<double> row_hz;   // per-row center frequency (Mel/Gammatone/Cochlea)
  double frame_s = 0.0;         // seconds per column

  double& at(int r, int c) { return values[std::size_t(r) * cols + c]; }
  double at(int r, int c) const { return values[std::size_t(r) * cols + c]; }
};

/// STFT framing parameters. sigma2 is the Gaussian width of the analysis
/// window with time measured in window lengths: w[n] = exp(-pi*sigma2*u^2),
/// u = (n - (W-1)/2)/W. The default puts the window's standard deviation
/// at window_len/6.
struct StftParams {
  int window_len = 1024;
  int hop = 256;
  double sigma2 = 36.0 / (2.0 * std::numbers::pi);
  int fft_len = 1024;
};

void validate(const StftParams& p);

/// Triangular filterbank on the mel scale, sampled on FFT bins. Each
/// filter peaks at exactly 1 on its center bin and is 0 at and beyond
/// its neighbors' center bins.
struct MelBank {
  int n_filters = 0;
  double f_lo = 0.0, f_hi = 0.0;
  int n_bins = 0;                 // fft_len/2 + 1
  std::vector<double> weights;    // n_filters x n_bins, row-major
  std::vector<int> center_bins;   // per filter
  std::vector<double> center_hz;  // per filter
};

struct GammatoneChannel {
  double center_hz = 0.0;
  double bandwidth_hz = 0.0;
  int order = 4;
  double gain = 1.0;
  double phase = 0.0;
};

/// FIR gammatone bank; channel impulse responses are sampled from the
/// analytic form and truncated to impulse_len samples.
struct GammatoneBank {
  std::vector<GammatoneChannel> channels;
  int sample_rate = 0;
  int impulse_len = 4096;
};

/// Corrected Hz->mel map, m = 2595*log10(1 + f/700).
double hz_to_mel(double f);
double mel_to_hz(double m);

double erb_bandwidth(double f_hz);  // 24.7*(4.37*f/1000 + 1)

MelBank make_mel_bank(int n_filters, double f_lo, double f_hi, int fft_len,
                      int sample_rate);

/// Centers equally spaced on the ERB-rate scale in [f_lo, f_hi]
/// (f_hi <= 0 selects 0.45*sample_rate); bandwidth 1.019*ERB(center);
/// gains normalized for unit magnitude response at each center.
GammatoneBank make_gammatone_bank(int n_channels, int sample_rate,
                                  double f_lo = 50.0, double f_hi = 0.0,
                                  int order = 4, double phase = 0.0,
                                  int impulse_len = 4096);

/// Gamma-envelope sinusoid, zero for t < 0.
double gammatone_response(const GammatoneBank& bank, int channel, double t);

/// Channel impulse response sampled at the bank rate.
std::vector<double> gammatone_impulse(const GammatoneBank& bank, int channel);

/// |STFT| with Gaussian window (discrete Gabor transform magnitude).
/// rows = fft_len/2 + 1, cols = 1 + floor((len - window_len)/hop).
/// Scaled so that sum(|G|^2)*hop/sum(w^2) ~= sum(x^2).
TimeFreqMatrix dgt_spectrogram(const AudioClip& clip, const StftParams& p);

/// Mel filterbank applied to the per-frame power spectrum of the
/// Gaussian-window STFT. rows = bank.n_filters.
TimeFreqMatrix mel_spectrogram(const AudioClip& clip, const StftParams& p,
                               const MelBank& bank);

/// Per-frame RMS of the clip filtered by each gammatone channel.
TimeFreqMatrix gammatone_spectrogram(const AudioClip& clip,
                                     const GammatoneBank& bank, int frame_len,
                                     int hop);

/// Windowed energy (sum of squares) of each gammatone channel output.
TimeFreqMatrix cochleagram(const AudioClip& clip, const GammatoneBank& bank,
                           double win_s, double hop_s);

/// v' = max(20*log10(v + 1e-10), max_db + floor_db).
TimeFreqMatrix to_db(const TimeFreqMatrix& m, double floor_db = -80.0);

}  // namespace sonoforge
