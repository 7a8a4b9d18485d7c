#pragma once

#include <cstdint>
#include <vector>

#include "sonoforge/audio.hpp"
#include "sonoforge/tfr.hpp"

namespace sonoforge {

/// Hop geometry for time-scale modification. alpha = synthesis_hop /
/// analysis_hop is the stretch factor; hops may be fractional since one
/// of the two is derived from alpha. Window is Hann (periodic).
struct TsmParams {
  double alpha = 1.0;
  double analysis_hop = 256.0;   // H_a, samples
  double synthesis_hop = 256.0;  // H_s, samples
  int window_len = 1024;
};

/// OLA/WSOLA geometry: synthesis hop fixed at window_len/2, analysis hop
/// adjusted to window_len/2 / alpha.
TsmParams tsm_params_ola(double alpha, int window_len = 1024);

/// Phase-vocoder geometry: analysis hop fixed at window_len/4, synthesis
/// hop alpha * window_len/4.
TsmParams tsm_params_pv(double alpha, int window_len = 1024);

void validate(const TsmParams& p);

struct WsolaParams {
  TsmParams base;
  int tolerance = 512;  // search half-width, samples
};

/// Plain overlap-add stretch; output length is exactly round(alpha * len).
AudioClip ola(const AudioClip& clip, const TsmParams& p);

/// OLA with per-frame position search of +-tolerance maximizing cross-
/// correlation with the natural continuation of the previous frame.
/// tolerance = 0 reproduces ola() bit for bit.
AudioClip wsola(const AudioClip& clip, const WsolaParams& p);

/// STFT phase vocoder with per-bin instantaneous-frequency propagation.
AudioClip phase_vocoder(const AudioClip& clip, const TsmParams& p);

/// Phase vocoder with identity phase locking: bins around each spectral
/// peak receive the peak's phase rotation.
AudioClip pv_identity_phase_locking(const AudioClip& clip, const TsmParams& p);

/// Binary masks partitioning every time-frequency bin (1 = selected).
struct HpssMasks {
  std::vector<std::uint8_t> harmonic;
  std::vector<std::uint8_t> percussive;
  int rows = 0;
  int cols = 0;
};

/// Median filter along time (harmonic) and frequency (percussive);
/// harmonic wins ties. median_len is used in both directions.
HpssMasks hpss_separate(const TimeFreqMatrix& mag, int median_len = 17);

/// Harmonic component stretched with identity phase locking, percussive
/// with OLA, then summed.
AudioClip hpss_tsm(const AudioClip& clip, const TsmParams& p);

/// {ola, wsola, phase_vocoder, pv_identity_phase_locking, hpss_tsm} x
/// alphas, algorithm-major. Deterministic.
std::vector<AudioClip> augment_tsm(const AudioClip& clip,
                                   const std::vector<double>& alphas = {0.8, 1.5});

/// Names aligned with augment_tsm's algorithm order.
const std::vector<std::string>& tsm_algorithm_names();

}  // namespace sonoforge
