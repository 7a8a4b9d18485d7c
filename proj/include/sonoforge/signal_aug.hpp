#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sonoforge/audio.hpp"
#include "sonoforge/rng.hpp"

namespace sonoforge {

/// Time-warp F(x) = x + a_m * sin(2*pi*f_m*x) / (2*pi*f_m), x in seconds.
struct WowParams {
  double a_m = 3.0;
  double f_m = 2.0;  // Hz, must be positive
};

/// Static level map as (input dBFS, output dBFS) breakpoints; inputs
/// strictly increasing, outputs non-decreasing.
struct DrcCurve {
  std::vector<std::pair<double, double>> breakpoints;
};

/// Boosts below -40 dBFS by +10 dB and compresses above -20 dBFS at 2.5:1.
DrcCurve default_drc_curve();

void validate(const DrcCurve& curve);

enum class Protocol { Sgn, Ssa, Ssia, Tsm, Sspa, Susa };

/// Named augmentation protocol with its fixed output count and per-copy
/// application rule.
struct ProtocolSpec {
  Protocol name;
  int copies;
  const char* application_rule;  // each-with-prob-p | one-per-copy | all-per-copy | grid
};

ProtocolSpec protocol_spec(Protocol p);
Protocol protocol_from_name(const std::string& name);
std::string protocol_name(Protocol p);
bool protocol_is_spectral(Protocol p);  // SSpA/SuSA operate on images

/// output[t] = input read at warped time F(t), clamped to the clip span;
/// length and rate preserved.
AudioClip wow_resample(const AudioClip& clip, const WowParams& p = {});

/// White Gaussian noise scaled for 10*log10(P_signal/P_noise) = snr_db.
AudioClip add_noise_snr(const AudioClip& clip, double snr_db, RngStream& rng);

/// Rescales so the given fraction of samples falls outside [-1, 1], then
/// replaces out-of-range samples with their sign. An all-zero clip is
/// returned unchanged.
AudioClip clip_fraction(const AudioClip& clip, double fraction);

/// Plain resampling by 1/factor reinterpreted at the original rate
/// (pitch moves with speed).
AudioClip change_speed(const AudioClip& clip, double factor);

/// s = sin(2*pi*s), applied iteratively.
AudioClip harmonic_distortion(const AudioClip& clip, int iterations = 5);

AudioClip apply_gain_db(const AudioClip& clip, double gain_db);

/// out[t] = in[(t_star + t) mod T]; t_star in [0, T].
AudioClip circular_time_shift(const AudioClip& clip, long t_star);

/// Per-sample static map of 20*log10(|v| + 1e-10) through the curve
/// (linear interpolation, end slopes extrapolated); sign preserved.
AudioClip dynamic_range_compress(const AudioClip& clip, const DrcCurve& curve);

/// Resample by 2^(semitones/12) then phase-vocoder stretch back to the
/// original length (within +-1 sample; padded/trimmed exactly).
AudioClip pitch_shift(const AudioClip& clip, double semitones);

struct SgnParams {
  double speed_lo = 0.8, speed_hi = 1.2;
  double pitch_lo = -2.0, pitch_hi = 2.0;   // semitones
  double gain_lo = -3.0, gain_hi = 3.0;     // dB
  double snr_lo = 0.0, snr_hi = 10.0;       // dB
  double shift_lo_s = -0.005, shift_hi_s = 0.005;
  double prob = 0.5;
  int copies = 10;
};

struct SsaParams {
  WowParams wow;
  double noise_snr_db = 10.0;
  double clip_frac = 0.1;
  double speed = 1.15;
  int distortion_iterations = 5;
  double gain_db = 10.0;
  DrcCurve drc = default_drc_curve();
  double pitch_up = 2.0, pitch_down = -2.0;  // semitones
};

struct SsiaParams {
  WowParams wow;
  double speed_pct = 5.0;   // percent, drawn in [-pct, pct]
  double gain_db = 0.5;     // drawn in [-gain, gain]
  double pitch_st = 0.5;    // drawn in [-pitch, pitch]
  int copies = 29;
};

/// Ten copies; each of the five transforms fires independently with
/// probability prob, in listed order (speed, pitch, gain, noise, shift).
std::vector<AudioClip> augment_sgn(const AudioClip& clip, RngStream rng,
                                   const SgnParams& p = {});

/// Ten copies, one fixed-preset transform each, in the documented order.
std::vector<AudioClip> augment_ssa(const AudioClip& clip, RngStream rng,
                                   const SsaParams& p = {});

/// Twenty-nine copies; every copy applies wow, speed, gain, circular
/// shift and pitch with small randomized parameters.
std::vector<AudioClip> augment_ssia(const AudioClip& clip, RngStream rng,
                                    const SsiaParams& p = {});

}  // namespace sonoforge
