#include "sonoforge/tfr.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "fft.hpp"

namespace sonoforge {

void validate(const StftParams& p) {
  require(p.hop > 0 && p.hop <= p.window_len && p.window_len <= p.fft_len,
          ErrorCode::InvalidArgument,
          "stft params: need 0 < hop <= window_len <= fft_len");
  require(p.sigma2 > 0.0, ErrorCode::InvalidArgument,
          "stft params: sigma2 must be positive");
}

double hz_to_mel(double f) {
  require(f >= 0.0, ErrorCode::InvalidArgument, "hz_to_mel: negative frequency");
  return 2595.0 * std::log10(1.0 + f / 700.0);
}

double mel_to_hz(double m) {
  return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0);
}

double erb_bandwidth(double f_hz) {
  return 24.7 * (4.37 * f_hz / 1000.0 + 1.0);
}

namespace {

std::vector<double> gaussian_window(int len, double sigma2) {
  std::vector<double> w(len);
  const double center = 0.5 * (len - 1);
  for (int n = 0; n < len; ++n) {
    const double u = (n - center) / len;
    w[n] = std::exp(-std::numbers::pi * sigma2 * u * u);
  }
  return w;
}

int frame_count(std::size_t len, int window_len, int hop) {
  return 1 + static_cast<int>((len - window_len) / hop);
}

}  // namespace

TimeFreqMatrix dgt_spectrogram(const AudioClip& clip, const StftParams& p) {
  validate(clip);
  validate(p);
  require(clip.samples.size() >= static_cast<std::size_t>(p.window_len),
          ErrorCode::InvalidArgument, "dgt_spectrogram: clip shorter than one window");

  const auto w = gaussian_window(p.window_len, p.sigma2);
  const int cols = frame_count(clip.samples.size(), p.window_len, p.hop);
  const int rows = p.fft_len / 2 + 1;
  const double scale = std::sqrt(2.0 / p.fft_len);

  TimeFreqMatrix m;
  m.rows = rows;
  m.cols = cols;
  m.values.assign(std::size_t(rows) * cols, 0.0);
  m.bin_hz = static_cast<double>(clip.sample_rate) / p.fft_len;
  m.frame_s = static_cast<double>(p.hop) / clip.sample_rate;

  detail::Fft fft;
  std::vector<double> frame(p.fft_len, 0.0);
  for (int c = 0; c < cols; ++c) {
    const std::size_t start = std::size_t(c) * p.hop;
    std::fill(frame.begin(), frame.end(), 0.0);
    for (int n = 0; n < p.window_len; ++n)
      frame[n] = w[n] * clip.samples[start + n];
    const auto spec = fft.forward(frame);
    for (int r = 0; r < rows; ++r) m.at(r, c) = scale * std::abs(spec[r]);
  }
  return m;
}

MelBank make_mel_bank(int n_filters, double f_lo, double f_hi, int fft_len,
                      int sample_rate) {
  require(n_filters >= 1, ErrorCode::InvalidArgument, "mel bank: n_filters < 1");
  require(f_lo >= 0.0 && f_lo < f_hi, ErrorCode::InvalidArgument,
          "mel bank: need 0 <= f_lo < f_hi");
  require(f_hi <= sample_rate / 2.0 + 1e-9, ErrorCode::InvalidArgument,
          "mel bank: f_hi above Nyquist");

  const int n_bins = fft_len / 2 + 1;
  const double hz_per_bin = static_cast<double>(sample_rate) / fft_len;
  const double m_lo = hz_to_mel(f_lo), m_hi = hz_to_mel(f_hi);

  // Edge + center frequencies, snapped to FFT bins so each filter peaks
  // exactly on a bin; collisions at low frequency are pushed up a bin.
  std::vector<int> bins(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i) {
    const double mel = m_lo + (m_hi - m_lo) * i / (n_filters + 1);
    bins[i] = static_cast<int>(std::lround(mel_to_hz(mel) / hz_per_bin));
    bins[i] = std::min(bins[i], n_bins - 1);
    if (i > 0) bins[i] = std::max(bins[i], bins[i - 1] + 1);
  }
  require(bins[n_filters + 1] <= n_bins - 1 + n_filters, ErrorCode::InvalidArgument,
          "mel bank: too many filters for FFT resolution");

  MelBank bank;
  bank.n_filters = n_filters;
  bank.f_lo = f_lo;
  bank.f_hi = f_hi;
  bank.n_bins = n_bins;
  bank.weights.assign(std::size_t(n_filters) * n_bins, 0.0);
  bank.center_bins.resize(n_filters);
  bank.center_hz.resize(n_filters);
  for (int f = 0; f < n_filters; ++f) {
    const int lo = bins[f], c = bins[f + 1], hi = bins[f + 2];
    bank.center_bins[f] = c;
    bank.center_hz[f] = c * hz_per_bin;
    for (int k = lo + 1; k <= std::min(hi - 1, n_bins - 1); ++k) {
      double w;
      if (k <= c)
        w = static_cast<double>(k - lo) / (c - lo);
      else
        w = static_cast<double>(hi - k) / (hi - c);
      bank.weights[std::size_t(f) * n_bins + k] = w;
    }
  }
  return bank;
}

TimeFreqMatrix mel_spectrogram(const AudioClip& clip, const StftParams& p,
                               const MelBank& bank) {
  require(bank.n_bins == p.fft_len / 2 + 1, ErrorCode::ShapeMismatch,
          "mel_spectrogram: bank bins do not match fft_len");
  const TimeFreqMatrix spec = dgt_spectrogram(clip, p);

  TimeFreqMatrix m;
  m.rows = bank.n_filters;
  m.cols = spec.cols;
  m.values.assign(std::size_t(m.rows) * m.cols, 0.0);
  m.row_hz = bank.center_hz;
  m.frame_s = spec.frame_s;
  for (int f = 0; f < bank.n_filters; ++f) {
    const double* w = &bank.weights[std::size_t(f) * bank.n_bins];
    for (int c = 0; c < spec.cols; ++c) {
      double acc = 0.0;
      for (int k = 0; k < bank.n_bins; ++k) {
        const double v = spec.at(k, c);
        acc += w[k] * v * v;
      }
      m.at(f, c) = acc;
    }
  }
  return m;
}

namespace {

double gammatone_eval(const GammatoneChannel& ch, double t) {
  if (t < 0.0) return 0.0;
  return ch.gain * std::pow(t, ch.order - 1) *
         std::exp(-2.0 * std::numbers::pi * ch.bandwidth_hz * t) *
         std::cos(2.0 * std::numbers::pi * ch.center_hz * t + ch.phase);
}

}  // namespace

double gammatone_response(const GammatoneBank& bank, int channel, double t) {
  require(channel >= 0 && channel < static_cast<int>(bank.channels.size()),
          ErrorCode::InvalidArgument, "gammatone_response: channel out of range");
  return gammatone_eval(bank.channels[channel], t);
}

std::vector<double> gammatone_impulse(const GammatoneBank& bank, int channel) {
  require(channel >= 0 && channel < static_cast<int>(bank.channels.size()),
          ErrorCode::InvalidArgument, "gammatone_impulse: channel out of range");
  std::vector<double> h(bank.impulse_len);
  for (int n = 0; n < bank.impulse_len; ++n)
    h[n] = gammatone_eval(bank.channels[channel],
                          static_cast<double>(n) / bank.sample_rate);
  return h;
}

GammatoneBank make_gammatone_bank(int n_channels, int sample_rate, double f_lo,
                                  double f_hi, int order, double phase,
                                  int impulse_len) {
  require(n_channels >= 1 && sample_rate > 0, ErrorCode::InvalidArgument,
          "gammatone bank: bad channel count or rate");
  if (f_hi <= 0.0) f_hi = 0.45 * sample_rate;
  require(f_lo > 0.0 && f_lo < f_hi, ErrorCode::InvalidArgument,
          "gammatone bank: need 0 < f_lo < f_hi");

  auto erb_rate = [](double f) { return 21.4 * std::log10(1.0 + 0.00437 * f); };
  auto erb_rate_inv = [](double e) {
    return (std::pow(10.0, e / 21.4) - 1.0) / 0.00437;
  };

  GammatoneBank bank;
  bank.sample_rate = sample_rate;
  bank.impulse_len = impulse_len;
  bank.channels.resize(n_channels);
  const double e_lo = erb_rate(f_lo), e_hi = erb_rate(f_hi);
  for (int i = 0; i < n_channels; ++i) {
    const double e =
        n_channels == 1 ? e_lo : e_lo + (e_hi - e_lo) * i / (n_channels - 1);
    GammatoneChannel& ch = bank.channels[i];
    ch.center_hz = erb_rate_inv(e);
    ch.bandwidth_hz = 1.019 * erb_bandwidth(ch.center_hz);
    ch.order = order;
    ch.phase = phase;
    ch.gain = 1.0;
  }

  // Normalize each channel for unit magnitude response at its center.
  for (int i = 0; i < n_channels; ++i) {
    const auto h = gammatone_impulse(bank, i);
    const double w =
        2.0 * std::numbers::pi * bank.channels[i].center_hz / sample_rate;
    std::complex<double> resp = 0.0;
    for (int n = 0; n < static_cast<int>(h.size()); ++n)
      resp += h[n] * std::exp(std::complex<double>(0.0, -w * n));
    const double mag = std::abs(resp);
    if (mag > 0.0) bank.channels[i].gain = 1.0 / mag;
  }
  return bank;
}

namespace {

/// y[n] = sum_m h[m] x[n-m], truncated to len(x).
std::vector<double> convolve_trunc(const std::vector<double>& x,
                                   const std::vector<double>& h,
                                   const std::vector<std::complex<double>>& x_spec,
                                   std::size_t fft_len, detail::Fft& fft) {
  std::vector<double> hp(fft_len, 0.0);
  std::copy(h.begin(), h.end(), hp.begin());
  auto h_spec = fft.forward(hp);
  for (std::size_t k = 0; k < fft_len; ++k) h_spec[k] *= x_spec[k];
  const auto y = fft.inverse(h_spec);
  std::vector<double> out(x.size());
  for (std::size_t n = 0; n < x.size(); ++n) out[n] = y[n].real();
  return out;
}

}  // namespace

TimeFreqMatrix gammatone_spectrogram(const AudioClip& clip,
                                     const GammatoneBank& bank, int frame_len,
                                     int hop) {
  validate(clip);
  require(frame_len > 0 && hop > 0, ErrorCode::InvalidArgument,
          "gammatone_spectrogram: bad framing");
  require(clip.samples.size() >= static_cast<std::size_t>(frame_len),
          ErrorCode::InvalidArgument,
          "gammatone_spectrogram: clip shorter than one frame");

  const int n_ch = static_cast<int>(bank.channels.size());
  const int cols = frame_count(clip.samples.size(), frame_len, hop);

  TimeFreqMatrix m;
  m.rows = n_ch;
  m.cols = cols;
  m.values.assign(std::size_t(n_ch) * cols, 0.0);
  m.frame_s = static_cast<double>(hop) / clip.sample_rate;
  m.row_hz.resize(n_ch);

  detail::Fft fft;
  const std::size_t fft_len =
      detail::next_pow2(clip.samples.size() + bank.impulse_len);
  std::vector<double> xp(fft_len, 0.0);
  std::copy(clip.samples.begin(), clip.samples.end(), xp.begin());
  const auto x_spec = fft.forward(xp);

  for (int i = 0; i < n_ch; ++i) {
    m.row_hz[i] = bank.channels[i].center_hz;
    const auto y =
        convolve_trunc(clip.samples, gammatone_impulse(bank, i), x_spec, fft_len, fft);
    for (int c = 0; c < cols; ++c) {
      const std::size_t start = std::size_t(c) * hop;
      double acc = 0.0;
      for (int n = 0; n < frame_len; ++n) acc += y[start + n] * y[start + n];
      m.at(i, c) = std::sqrt(acc / frame_len);
    }
  }
  return m;
}

TimeFreqMatrix cochleagram(const AudioClip& clip, const GammatoneBank& bank,
                           double win_s, double hop_s) {
  validate(clip);
  require(hop_s > 0.0 && win_s >= hop_s, ErrorCode::InvalidArgument,
          "cochleagram: need win_s >= hop_s > 0");
  const int win = static_cast<int>(std::lround(win_s * clip.sample_rate));
  const int hop = static_cast<int>(std::lround(hop_s * clip.sample_rate));
  require(win > 0 && hop > 0, ErrorCode::InvalidArgument,
          "cochleagram: window shorter than one sample");
  require(clip.samples.size() >= static_cast<std::size_t>(win),
          ErrorCode::InvalidArgument, "cochleagram: clip shorter than one window");

  const int n_ch = static_cast<int>(bank.channels.size());
  const int cols = frame_count(clip.samples.size(), win, hop);

  TimeFreqMatrix m;
  m.rows = n_ch;
  m.cols = cols;
  m.values.assign(std::size_t(n_ch) * cols, 0.0);
  m.frame_s = hop_s;
  m.row_hz.resize(n_ch);

  detail::Fft fft;
  const std::size_t fft_len =
      detail::next_pow2(clip.samples.size() + bank.impulse_len);
  std::vector<double> xp(fft_len, 0.0);
  std::copy(clip.samples.begin(), clip.samples.end(), xp.begin());
  const auto x_spec = fft.forward(xp);

  for (int i = 0; i < n_ch; ++i) {
    m.row_hz[i] = bank.channels[i].center_hz;
    const auto y =
        convolve_trunc(clip.samples, gammatone_impulse(bank, i), x_spec, fft_len, fft);
    for (int c = 0; c < cols; ++c) {
      const std::size_t start = std::size_t(c) * hop;
      double acc = 0.0;
      for (int n = 0; n < win; ++n) acc += y[start + n] * y[start + n];
      m.at(i, c) = acc;
    }
  }
  return m;
}

TimeFreqMatrix to_db(const TimeFreqMatrix& m, double floor_db) {
  require(floor_db < 0.0, ErrorCode::InvalidArgument,
          "to_db: floor_db must be negative");
  require(m.rows >= 1 && m.cols >= 1, ErrorCode::InvalidArgument,
          "to_db: empty matrix");
  TimeFreqMatrix out = m;
  double max_db = -std::numeric_limits<double>::infinity();
  for (double& v : out.values) {
    v = 20.0 * std::log10(std::max(v, 0.0) + 1e-10);
    max_db = std::max(max_db, v);
  }
  const double floor_val = max_db + floor_db;
  for (double& v : out.values) v = std::max(v, floor_val);
  return out;
}

}  // namespace sonoforge
