#include "sonoforge/signal_aug.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "sonoforge/tsm.hpp"

namespace sonoforge {

DrcCurve default_drc_curve() {
  return DrcCurve{{{-90.0, -80.0},
                   {-60.0, -50.0},
                   {-40.0, -30.0},
                   {-20.0, -16.0},
                   {0.0, -8.0}}};
}

void validate(const DrcCurve& curve) {
  require(curve.breakpoints.size() >= 2, ErrorCode::InvalidArgument,
          "drc curve: need at least two breakpoints");
  for (std::size_t i = 1; i < curve.breakpoints.size(); ++i) {
    require(curve.breakpoints[i].first > curve.breakpoints[i - 1].first,
            ErrorCode::InvalidArgument, "drc curve: inputs must strictly increase");
    require(curve.breakpoints[i].second >= curve.breakpoints[i - 1].second,
            ErrorCode::InvalidArgument, "drc curve: outputs must be non-decreasing");
  }
}

ProtocolSpec protocol_spec(Protocol p) {
  switch (p) {
    case Protocol::Sgn: return {Protocol::Sgn, 10, "each-with-prob-p"};
    case Protocol::Ssa: return {Protocol::Ssa, 10, "one-per-copy"};
    case Protocol::Ssia: return {Protocol::Ssia, 29, "all-per-copy"};
    case Protocol::Tsm: return {Protocol::Tsm, 10, "grid"};
    case Protocol::Sspa: return {Protocol::Sspa, 5, "one-per-copy"};
    case Protocol::Susa: return {Protocol::Susa, 29, "all-per-copy"};
  }
  raise(ErrorCode::InvalidArgument, "unknown protocol");
}

Protocol protocol_from_name(const std::string& name) {
  if (name == "sgn") return Protocol::Sgn;
  if (name == "ssa") return Protocol::Ssa;
  if (name == "ssia") return Protocol::Ssia;
  if (name == "tsm") return Protocol::Tsm;
  if (name == "sspa") return Protocol::Sspa;
  if (name == "susa") return Protocol::Susa;
  raise(ErrorCode::InvalidArgument, "unknown protocol: " + name);
}

std::string protocol_name(Protocol p) {
  switch (p) {
    case Protocol::Sgn: return "sgn";
    case Protocol::Ssa: return "ssa";
    case Protocol::Ssia: return "ssia";
    case Protocol::Tsm: return "tsm";
    case Protocol::Sspa: return "sspa";
    case Protocol::Susa: return "susa";
  }
  return "?";
}

bool protocol_is_spectral(Protocol p) {
  return p == Protocol::Sspa || p == Protocol::Susa;
}

AudioClip wow_resample(const AudioClip& clip, const WowParams& p) {
  validate(clip);
  require(p.f_m > 0.0, ErrorCode::InvalidArgument, "wow: f_m must be positive");
  const double rate = clip.sample_rate;
  const double t_max = (clip.samples.size() - 1) / rate;
  AudioClip out;
  out.sample_rate = clip.sample_rate;
  out.samples.resize(clip.samples.size());
  const double k = 2.0 * std::numbers::pi * p.f_m;
  for (std::size_t n = 0; n < out.samples.size(); ++n) {
    const double x = n / rate;
    const double warped = std::clamp(x + p.a_m * std::sin(k * x) / k, 0.0, t_max);
    out.samples[n] = sinc_interpolate(clip.samples, warped * rate);
  }
  return out;
}

AudioClip add_noise_snr(const AudioClip& clip, double snr_db, RngStream& rng) {
  validate(clip);
  double power = 0.0;
  for (double v : clip.samples) power += v * v;
  power /= clip.samples.size();
  require(power > 0.0, ErrorCode::SilentClip,
          "add_noise_snr: silent input, SNR undefined");
  const double sigma = std::sqrt(power * std::pow(10.0, -snr_db / 10.0));
  AudioClip out = clip;
  for (double& v : out.samples) v += sigma * rng_gaussian(rng);
  return out;
}

AudioClip clip_fraction(const AudioClip& clip, double fraction) {
  validate(clip);
  require(fraction > 0.0 && fraction < 1.0, ErrorCode::InvalidArgument,
          "clip_fraction: fraction must be in (0, 1)");
  std::vector<double> mags(clip.samples.size());
  for (std::size_t i = 0; i < mags.size(); ++i) mags[i] = std::abs(clip.samples[i]);
  const bool all_zero = std::all_of(mags.begin(), mags.end(),
                                    [](double m) { return m == 0.0; });
  if (all_zero) return clip;  // degenerate input, returned unchanged

  const std::size_t n = mags.size();
  auto idx = static_cast<std::size_t>(std::ceil((1.0 - fraction) * n));
  idx = std::min(n, std::max<std::size_t>(idx, 1)) - 1;
  std::nth_element(mags.begin(), mags.begin() + idx, mags.end());
  double q = mags[idx];
  if (q <= 0.0) {
    // Quantile landed on zeros; fall back to the smallest positive magnitude.
    q = std::numeric_limits<double>::infinity();
    for (double m : mags)
      if (m > 0.0) q = std::min(q, m);
  }
  AudioClip out = clip;
  for (double& v : out.samples) {
    v /= q;
    if (v > 1.0) v = 1.0;
    if (v < -1.0) v = -1.0;
  }
  return out;
}

AudioClip change_speed(const AudioClip& clip, double factor) {
  validate(clip);
  require(factor > 0.0, ErrorCode::InvalidArgument,
          "change_speed: factor must be positive");
  if (factor == 1.0) return clip;
  const double new_rate = std::max(1.0, std::round(clip.sample_rate / factor));
  AudioClip out = resample(clip, new_rate);
  out.sample_rate = clip.sample_rate;
  return out;
}

AudioClip harmonic_distortion(const AudioClip& clip, int iterations) {
  validate(clip);
  require(iterations >= 1, ErrorCode::InvalidArgument,
          "harmonic_distortion: iterations must be >= 1");
  AudioClip out = clip;
  for (int it = 0; it < iterations; ++it)
    for (double& v : out.samples) v = std::sin(2.0 * std::numbers::pi * v);
  return out;
}

AudioClip apply_gain_db(const AudioClip& clip, double gain_db) {
  validate(clip);
  const double g = std::pow(10.0, gain_db / 20.0);
  AudioClip out = clip;
  for (double& v : out.samples) v *= g;
  return out;
}

AudioClip circular_time_shift(const AudioClip& clip, long t_star) {
  validate(clip);
  const long T = static_cast<long>(clip.samples.size());
  require(t_star >= 0 && t_star <= T, ErrorCode::InvalidArgument,
          "circular_time_shift: t_star out of [0, T]");
  AudioClip out = clip;
  for (long t = 0; t < T; ++t) out.samples[t] = clip.samples[(t_star + t) % T];
  return out;
}

namespace {

double interpolate_curve(const DrcCurve& curve, double level_db) {
  const auto& bp = curve.breakpoints;
  std::size_t hi = 1;
  while (hi + 1 < bp.size() && level_db > bp[hi].first) ++hi;
  const auto& [x0, y0] = bp[hi - 1];
  const auto& [x1, y1] = bp[hi];
  // End segments extrapolate linearly.
  return y0 + (y1 - y0) * (level_db - x0) / (x1 - x0);
}

}  // namespace

AudioClip dynamic_range_compress(const AudioClip& clip, const DrcCurve& curve) {
  validate(clip);
  validate(curve);
  AudioClip out = clip;
  for (double& v : out.samples) {
    const double level = 20.0 * std::log10(std::abs(v) + 1e-10);
    const double mapped = interpolate_curve(curve, level);
    const double mag = std::pow(10.0, mapped / 20.0);
    v = v > 0.0 ? mag : (v < 0.0 ? -mag : 0.0);
  }
  return out;
}

AudioClip pitch_shift(const AudioClip& clip, double semitones) {
  validate(clip);
  const std::size_t target_len = clip.samples.size();
  const double factor = std::pow(2.0, semitones / 12.0);
  AudioClip sped = change_speed(clip, factor);
  const double alpha =
      static_cast<double>(target_len) / static_cast<double>(sped.samples.size());
  AudioClip out = phase_vocoder(sped, tsm_params_pv(alpha));
  out.samples.resize(target_len, 0.0);
  return out;
}

namespace {

AudioClip shift_by_seconds(const AudioClip& clip, double dt_s) {
  const long T = static_cast<long>(clip.samples.size());
  long shift = std::lround(dt_s * clip.sample_rate) % T;
  if (shift < 0) shift += T;
  return circular_time_shift(clip, shift);
}

}  // namespace

std::vector<AudioClip> augment_sgn(const AudioClip& clip, RngStream rng,
                                   const SgnParams& p) {
  validate(clip);
  std::vector<AudioClip> out;
  out.reserve(p.copies);
  for (int copy = 0; copy < p.copies; ++copy) {
    RngStream s = rng_split(rng, copy);
    AudioClip c = clip;
    if (rng_uniform(s, 0.0, 1.0) < p.prob)
      c = change_speed(c, rng_uniform(s, p.speed_lo, p.speed_hi));
    if (rng_uniform(s, 0.0, 1.0) < p.prob)
      c = pitch_shift(c, rng_uniform(s, p.pitch_lo, p.pitch_hi));
    if (rng_uniform(s, 0.0, 1.0) < p.prob)
      c = apply_gain_db(c, rng_uniform(s, p.gain_lo, p.gain_hi));
    if (rng_uniform(s, 0.0, 1.0) < p.prob)
      c = add_noise_snr(c, rng_uniform(s, p.snr_lo, p.snr_hi), s);
    if (rng_uniform(s, 0.0, 1.0) < p.prob)
      c = shift_by_seconds(c, rng_uniform(s, p.shift_lo_s, p.shift_hi_s));
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<AudioClip> augment_ssa(const AudioClip& clip, RngStream rng,
                                   const SsaParams& p) {
  validate(clip);
  std::vector<AudioClip> out;
  out.reserve(10);
  out.push_back(wow_resample(clip, p.wow));
  {
    RngStream s = rng_split(rng, 1);
    out.push_back(add_noise_snr(clip, p.noise_snr_db, s));
  }
  out.push_back(clip_fraction(clip, p.clip_frac));
  out.push_back(change_speed(clip, p.speed));
  out.push_back(harmonic_distortion(clip, p.distortion_iterations));
  out.push_back(apply_gain_db(clip, p.gain_db));
  {
    RngStream s = rng_split(rng, 6);
    const long T = static_cast<long>(clip.samples.size());
    out.push_back(circular_time_shift(clip, long(rng_uniform_int(s, T))));
  }
  out.push_back(dynamic_range_compress(clip, p.drc));
  out.push_back(pitch_shift(clip, p.pitch_up));
  out.push_back(pitch_shift(clip, p.pitch_down));
  return out;
}

std::vector<AudioClip> augment_ssia(const AudioClip& clip, RngStream rng,
                                    const SsiaParams& p) {
  validate(clip);
  std::vector<AudioClip> out;
  out.reserve(p.copies);
  for (int copy = 0; copy < p.copies; ++copy) {
    RngStream s = rng_split(rng, copy);
    AudioClip c = wow_resample(clip, p.wow);
    c = change_speed(c, 1.0 + rng_uniform(s, -p.speed_pct, p.speed_pct) / 100.0);
    c = apply_gain_db(c, rng_uniform(s, -p.gain_db, p.gain_db));
    const long T = static_cast<long>(c.samples.size());
    c = circular_time_shift(c, long(rng_uniform_int(s, T)));
    c = pitch_shift(c, rng_uniform(s, -p.pitch_st, p.pitch_st));
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace sonoforge
