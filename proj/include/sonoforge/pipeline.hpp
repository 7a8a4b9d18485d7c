#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "sonoforge/fusion.hpp"
#include "sonoforge/image.hpp"
#include "sonoforge/signal_aug.hpp"
#include "sonoforge/spec_aug.hpp"
#include "sonoforge/tfr.hpp"
#include "sonoforge/tsm.hpp"

namespace sonoforge {

struct ManifestRow {
  std::string pattern_id;
  std::string wav_path;
  std::string label;
  int fold = 0;
};

/// Dataset listing; folds are validated to form a contiguous 1..K range
/// and pattern ids to be unique.
struct Manifest {
  std::vector<ManifestRow> rows;
  int n_folds = 0;
};

/// CSV with header "pattern_id,wav_path,label,fold".
Manifest parse_manifest(const std::filesystem::path& path);

std::vector<FoldSplit> fold_splits(const Manifest& manifest);

enum class ReprKind { Dgt, Mel, Gamma, Cochlea };
ReprKind repr_from_name(const std::string& name);
std::string repr_name(ReprKind r);

struct ReprParams {
  ReprKind kind = ReprKind::Dgt;
  StftParams stft;
  int mel_filters = 64;
  double mel_f_lo = 0.0;
  double mel_f_hi = 0.0;  // 0 selects Nyquist
  int gammatone_channels = 64;
  int gammatone_frame_len = 1024;
  int gammatone_hop = 256;
  double cochlea_win_s = 0.02;
  double cochlea_hop_s = 0.01;
  bool db_scale = true;
  double floor_db = -80.0;
};

/// Clip -> matrix for the configured representation (dB scaling applied
/// when enabled).
TimeFreqMatrix compute_representation(const AudioClip& clip, const ReprParams& p);

struct PipelineConfig {
  int schema_version = 1;
  int working_rate = 32000;
  ReprParams repr;
  std::vector<Protocol> protocols;
  std::uint64_t seed = 0;
  std::filesystem::path out_dir;
  ImageFormat export_format = ImageFormat::Pgm;
  int resize = 0;  // 0 = no resize
  SgnParams sgn;
  SsaParams ssa;
  SsiaParams ssia;
  std::vector<double> tsm_alphas = {0.8, 1.5};
  int tsm_window_len = 1024;
  int wsola_tolerance = 512;
  SspaParams sspa;
  SusaParams susa;
  int workers = 1;
  bool skip_errors = false;
  bool emit_scores = false;
  int prototype_side = 32;
};

/// JSON with a versioned schema field; all protocol presets overridable.
PipelineConfig load_config_json(const std::filesystem::path& path);
PipelineConfig parse_config_json(const std::string& text);
std::string config_to_json(const PipelineConfig& config);

struct ProtocolFoldCount {
  int fold = 0;
  long train_images = 0;
  long test_images = 0;
};

struct RunSummary {
  std::uint64_t seed = 0;
  std::string repr;
  std::string export_format;
  int working_rate = 0;
  int folds = 0;
  long patterns = 0;
  std::vector<std::pair<std::string, std::vector<ProtocolFoldCount>>> protocols;
  std::vector<std::pair<std::string, std::string>> failures;  // pattern -> error
};

std::string summary_to_json(const RunSummary& summary);

/// Converts and augments every train-side pattern of every fold, writes
/// the fold/protocol image tree plus run_summary.json, and (optionally)
/// per-protocol prototype-classifier score files.
RunSummary run_pipeline(const PipelineConfig& config, const Manifest& manifest);

/// Signal-domain protocol copies of a clip (SGN/SSA/SSiA/TSM).
std::vector<AudioClip> augment_signal_protocol(const AudioClip& clip,
                                               Protocol protocol,
                                               const PipelineConfig& config,
                                               RngStream rng);

/// Image-domain protocol copies (SSpA/SuSA).
std::vector<GrayImage> augment_image_protocol(const GrayImage& img,
                                              Protocol protocol,
                                              const PipelineConfig& config,
                                              RngStream rng);

/// Default number of worker threads: SONOFORGE_WORKERS or 1.
int default_workers();

}  // namespace sonoforge
