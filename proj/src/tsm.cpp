#include "sonoforge/tsm.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "fft.hpp"

namespace sonoforge {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<double> hann_window(int len) {
  std::vector<double> w(len);
  for (int n = 0; n < len; ++n)
    w[n] = 0.5 - 0.5 * std::cos(kTwoPi * n / len);
  return w;
}

double wrap_phase(double x) { return x - kTwoPi * std::round(x / kTwoPi); }

std::vector<double> padded_samples(const AudioClip& clip, int pad) {
  std::vector<double> x = clip.samples;
  x.resize(x.size() + pad, 0.0);
  return x;
}

AudioClip finalize_output(std::vector<double> num, const std::vector<double>& den,
                          std::size_t out_len, int sample_rate) {
  AudioClip out;
  out.sample_rate = sample_rate;
  out.samples.assign(out_len, 0.0);
  const std::size_t n = std::min(out_len, num.size());
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = den[i] > 1e-12 ? num[i] / den[i] : 0.0;
  return out;
}

void check_tsm_inputs(const AudioClip& clip, const TsmParams& p) {
  validate(clip);
  validate(p);
  require(clip.samples.size() >= static_cast<std::size_t>(p.window_len),
          ErrorCode::InvalidArgument, "tsm: clip shorter than one window");
}

AudioClip ola_wsola_core(const AudioClip& clip, const TsmParams& p,
                         int tolerance) {
  check_tsm_inputs(clip, p);
  const int N = p.window_len;
  const long L = static_cast<long>(clip.samples.size());
  const auto x = padded_samples(clip, N);
  const auto w = hann_window(N);
  const double Ha = p.analysis_hop;
  const long Hs = std::lround(p.synthesis_hop);
  const auto out_len = static_cast<std::size_t>(std::llround(p.alpha * L));

  const long frames = static_cast<long>(std::floor(L / Ha)) + 1;
  std::vector<double> num(std::size_t((frames - 1) * Hs + N), 0.0);
  std::vector<double> den(num.size(), 0.0);

  long prev_pos = 0;
  for (long k = 0; k < frames; ++k) {
    const long a = std::lround(k * Ha);
    if (a > L) break;
    long pos = a;
    if (k > 0 && tolerance > 0) {
      const long ref = std::min(prev_pos + Hs, L);
      const long lo = std::max(0L, a - tolerance);
      const long hi = std::min(L, a + tolerance);
      double best = -std::numeric_limits<double>::infinity();
      for (long cand = lo; cand <= hi; ++cand) {
        double corr = 0.0;
        for (int n = 0; n < N; ++n) corr += x[ref + n] * x[cand + n];
        if (corr > best) {
          best = corr;
          pos = cand;
        }
      }
    }
    const std::size_t s = std::size_t(k * Hs);
    for (int n = 0; n < N; ++n) {
      num[s + n] += w[n] * x[pos + n];
      den[s + n] += w[n];
    }
    prev_pos = pos;
  }
  return finalize_output(std::move(num), den, out_len, clip.sample_rate);
}

/// Peak bins (magnitude exceeds two neighbors on each side) and, per bin,
/// the index of the peak owning its region of influence (regions split at
/// magnitude minima between adjacent peaks).
void assign_peak_regions(const std::vector<double>& mag, std::vector<int>& owner) {
  const int n = static_cast<int>(mag.size());
  std::vector<int> peaks;
  for (int j = 0; j < n; ++j) {
    bool is_peak = mag[j] > 0.0;
    for (int d = 1; d <= 2 && is_peak; ++d) {
      if (j - d >= 0 && mag[j] <= mag[j - d]) is_peak = false;
      if (j + d < n && mag[j] <= mag[j + d]) is_peak = false;
    }
    if (is_peak) peaks.push_back(j);
  }
  owner.assign(n, -1);
  if (peaks.empty()) return;
  int start = 0;
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    int end = n - 1;
    if (i + 1 < peaks.size()) {
      int split = peaks[i];
      double lowest = std::numeric_limits<double>::infinity();
      for (int j = peaks[i] + 1; j < peaks[i + 1]; ++j)
        if (mag[j] < lowest) {
          lowest = mag[j];
          split = j;
        }
      end = split;
    }
    for (int j = start; j <= end; ++j) owner[j] = peaks[i];
    start = end + 1;
  }
}

AudioClip pv_core(const AudioClip& clip, const TsmParams& p, bool phase_lock) {
  check_tsm_inputs(clip, p);
  const int N = p.window_len;
  const int half = N / 2;
  const long L = static_cast<long>(clip.samples.size());
  const auto x = padded_samples(clip, N);
  const auto w = hann_window(N);
  const long Ha = std::lround(p.analysis_hop);
  const double Hs = p.synthesis_hop;
  const auto out_len = static_cast<std::size_t>(std::llround(p.alpha * L));

  const long frames = L / Ha + 1;
  const long last_s = std::lround((frames - 1) * Hs);
  std::vector<double> num(std::size_t(last_s + N), 0.0);
  std::vector<double> den(num.size(), 0.0);

  detail::Fft fft;
  std::vector<double> prev_phase(half + 1, 0.0), psi(half + 1, 0.0);
  std::vector<double> mag(half + 1), phase(half + 1), omega_inst(half + 1);
  std::vector<std::complex<double>> spec_buf(N);
  std::vector<double> frame(N);
  std::vector<int> owner;
  long prev_s = 0;

  for (long k = 0; k < frames; ++k) {
    const long a = k * Ha;
    const long s = std::lround(k * Hs);
    for (int n = 0; n < N; ++n) frame[n] = w[n] * x[a + n];
    const auto spec = fft.forward(frame);
    for (int j = 0; j <= half; ++j) {
      mag[j] = std::abs(spec[j]);
      phase[j] = std::arg(spec[j]);
    }

    if (k == 0) {
      psi = phase;
    } else {
      const double dt_s = static_cast<double>(s - prev_s);
      for (int j = 0; j <= half; ++j) {
        const double omega = kTwoPi * j / N;
        const double dev = wrap_phase(phase[j] - prev_phase[j] - omega * Ha);
        omega_inst[j] = omega + dev / Ha;
      }
      if (phase_lock) {
        assign_peak_regions(mag, owner);
        std::vector<double> psi_next(half + 1);
        for (int j = 0; j <= half; ++j) {
          const int pk = owner[j];
          if (pk < 0) {
            psi_next[j] = psi[j] + dt_s * omega_inst[j];
          } else if (pk == j) {
            psi_next[j] = psi[j] + dt_s * omega_inst[j];
          } else {
            // Phase rotation identical to the owning peak's.
            psi_next[j] =
                phase[j] + (psi[pk] + dt_s * omega_inst[pk] - phase[pk]);
          }
        }
        psi = std::move(psi_next);
      } else {
        for (int j = 0; j <= half; ++j) psi[j] += dt_s * omega_inst[j];
      }
    }
    prev_phase = phase;
    prev_s = s;

    for (int j = 0; j <= half; ++j)
      spec_buf[j] = std::polar(mag[j], psi[j]);
    for (int j = half + 1; j < N; ++j) spec_buf[j] = std::conj(spec_buf[N - j]);
    const auto synth = fft.inverse(spec_buf);
    // WOLA: synthesis window equals analysis window, normalize by sum of w^2.
    for (int n = 0; n < N; ++n) {
      num[std::size_t(s + n)] += w[n] * synth[n].real();
      den[std::size_t(s + n)] += w[n] * w[n];
    }
  }
  return finalize_output(std::move(num), den, out_len, clip.sample_rate);
}

}  // namespace

TsmParams tsm_params_ola(double alpha, int window_len) {
  TsmParams p;
  p.alpha = alpha;
  p.window_len = window_len;
  p.synthesis_hop = window_len / 2.0;
  p.analysis_hop = p.synthesis_hop / alpha;
  return p;
}

TsmParams tsm_params_pv(double alpha, int window_len) {
  TsmParams p;
  p.alpha = alpha;
  p.window_len = window_len;
  p.analysis_hop = window_len / 4.0;
  p.synthesis_hop = alpha * p.analysis_hop;
  return p;
}

void validate(const TsmParams& p) {
  require(p.alpha > 0.0, ErrorCode::InvalidArgument, "tsm: alpha must be positive");
  require(p.analysis_hop > 0.0 && p.synthesis_hop > 0.0 &&
              p.analysis_hop <= p.window_len,
          ErrorCode::InvalidArgument, "tsm: bad hop sizes");
  require(std::abs(p.alpha - p.synthesis_hop / p.analysis_hop) <=
              1e-9 * p.alpha,
          ErrorCode::InvalidArgument, "tsm: alpha != H_s/H_a");
}

AudioClip ola(const AudioClip& clip, const TsmParams& p) {
  return ola_wsola_core(clip, p, 0);
}

AudioClip wsola(const AudioClip& clip, const WsolaParams& p) {
  require(p.tolerance >= 0, ErrorCode::InvalidArgument,
          "wsola: tolerance must be >= 0");
  return ola_wsola_core(clip, p.base, p.tolerance);
}

AudioClip phase_vocoder(const AudioClip& clip, const TsmParams& p) {
  return pv_core(clip, p, false);
}

AudioClip pv_identity_phase_locking(const AudioClip& clip, const TsmParams& p) {
  return pv_core(clip, p, true);
}

HpssMasks hpss_separate(const TimeFreqMatrix& mag, int median_len) {
  require(mag.rows >= 1 && mag.cols >= 1, ErrorCode::InvalidArgument,
          "hpss_separate: empty matrix");
  require(median_len >= 1 && median_len % 2 == 1, ErrorCode::InvalidArgument,
          "hpss_separate: median_len must be odd and positive");
  const int rows = mag.rows, cols = mag.cols, halfw = median_len / 2;

  auto median_of = [&](std::vector<double>& buf) {
    const auto mid = buf.begin() + buf.size() / 2;
    std::nth_element(buf.begin(), mid, buf.end());
    return *mid;
  };

  // Median along time per row (zero-padded outside the matrix).
  std::vector<double> harm(std::size_t(rows) * cols);
  std::vector<double> perc(std::size_t(rows) * cols);
  std::vector<double> buf(median_len);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      for (int d = -halfw; d <= halfw; ++d) {
        const int cc = c + d;
        buf[d + halfw] = (cc >= 0 && cc < cols) ? mag.at(r, cc) : 0.0;
      }
      harm[std::size_t(r) * cols + c] = median_of(buf);
    }
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      for (int d = -halfw; d <= halfw; ++d) {
        const int rr = r + d;
        buf[d + halfw] = (rr >= 0 && rr < rows) ? mag.at(rr, c) : 0.0;
      }
      perc[std::size_t(r) * cols + c] = median_of(buf);
    }

  HpssMasks masks;
  masks.rows = rows;
  masks.cols = cols;
  masks.harmonic.resize(harm.size());
  masks.percussive.resize(harm.size());
  for (std::size_t i = 0; i < harm.size(); ++i) {
    const bool h = harm[i] >= perc[i];
    masks.harmonic[i] = h ? 1 : 0;
    masks.percussive[i] = h ? 0 : 1;
  }
  return masks;
}

namespace {

struct ComplexStft {
  std::vector<std::vector<std::complex<double>>> frames;  // half+1 bins each
  int window_len = 0;
  int hop = 0;
};

ComplexStft stft_complex(const AudioClip& clip, int N, int hop) {
  const long L = static_cast<long>(clip.samples.size());
  const auto x = padded_samples(clip, N);
  const auto w = hann_window(N);
  const int half = N / 2;
  ComplexStft out;
  out.window_len = N;
  out.hop = hop;
  detail::Fft fft;
  std::vector<double> frame(N);
  for (long a = 0; a <= L; a += hop) {
    for (int n = 0; n < N; ++n) frame[n] = w[n] * x[a + n];
    const auto spec = fft.forward(frame);
    out.frames.emplace_back(spec.begin(), spec.begin() + half + 1);
  }
  return out;
}

std::vector<double> istft(const ComplexStft& stft, std::size_t out_len) {
  const int N = stft.window_len;
  const int half = N / 2;
  const auto w = hann_window(N);
  const std::size_t total = (stft.frames.size() - 1) * stft.hop + N;
  std::vector<double> num(total, 0.0), den(total, 0.0);
  detail::Fft fft;
  std::vector<std::complex<double>> full(N);
  for (std::size_t k = 0; k < stft.frames.size(); ++k) {
    for (int j = 0; j <= half; ++j) full[j] = stft.frames[k][j];
    for (int j = half + 1; j < N; ++j) full[j] = std::conj(full[N - j]);
    const auto synth = fft.inverse(full);
    const std::size_t s = k * stft.hop;
    for (int n = 0; n < N; ++n) {
      num[s + n] += w[n] * synth[n].real();
      den[s + n] += w[n] * w[n];
    }
  }
  std::vector<double> y(out_len, 0.0);
  for (std::size_t i = 0; i < std::min(out_len, total); ++i)
    y[i] = den[i] > 1e-12 ? num[i] / den[i] : 0.0;
  return y;
}

}  // namespace

AudioClip hpss_tsm(const AudioClip& clip, const TsmParams& p) {
  check_tsm_inputs(clip, p);
  const int N = p.window_len;
  const int hop = N / 4;
  const auto stft = stft_complex(clip, N, hop);
  const int half = N / 2;
  const int cols = static_cast<int>(stft.frames.size());

  TimeFreqMatrix mag;
  mag.rows = half + 1;
  mag.cols = cols;
  mag.values.resize(std::size_t(mag.rows) * cols);
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r <= half; ++r) mag.at(r, c) = std::abs(stft.frames[c][r]);

  const auto masks = hpss_separate(mag, 17);

  ComplexStft harm = stft, perc = stft;
  for (int c = 0; c < cols; ++c)
    for (int r = 0; r <= half; ++r) {
      const std::size_t i = std::size_t(r) * cols + c;
      if (!masks.harmonic[i]) harm.frames[c][r] = 0.0;
      if (!masks.percussive[i]) perc.frames[c][r] = 0.0;
    }

  AudioClip xh{istft(harm, clip.samples.size()), clip.sample_rate};
  AudioClip xp{istft(perc, clip.samples.size()), clip.sample_rate};

  const AudioClip yh = pv_identity_phase_locking(xh, tsm_params_pv(p.alpha, N));
  const AudioClip yp = ola(xp, tsm_params_ola(p.alpha, N));

  AudioClip out;
  out.sample_rate = clip.sample_rate;
  const std::size_t n = std::min(yh.samples.size(), yp.samples.size());
  out.samples.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    out.samples[i] = yh.samples[i] + yp.samples[i];
  return out;
}

const std::vector<std::string>& tsm_algorithm_names() {
  static const std::vector<std::string> names = {"ola", "wsola", "pv", "pvipl",
                                                 "hpss"};
  return names;
}

std::vector<AudioClip> augment_tsm(const AudioClip& clip,
                                   const std::vector<double>& alphas) {
  validate(clip);
  require(!alphas.empty(), ErrorCode::InvalidArgument,
          "augment_tsm: need at least one stretch factor");
  std::vector<AudioClip> out;
  out.reserve(5 * alphas.size());
  for (int algo = 0; algo < 5; ++algo) {
    for (double a : alphas) {
      switch (algo) {
        case 0: out.push_back(ola(clip, tsm_params_ola(a))); break;
        case 1: out.push_back(wsola(clip, WsolaParams{tsm_params_ola(a), 512})); break;
        case 2: out.push_back(phase_vocoder(clip, tsm_params_pv(a))); break;
        case 3: out.push_back(pv_identity_phase_locking(clip, tsm_params_pv(a))); break;
        case 4: out.push_back(hpss_tsm(clip, tsm_params_pv(a))); break;
      }
    }
  }
  return out;
}

}  // namespace sonoforge
