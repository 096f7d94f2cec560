#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "srs/image_io.hpp"
#include "srs/phantom.hpp"
#include "srs/solver.hpp"

namespace srs {

struct AngleSpec {
  double start = 6.0;
  double step = 6.0;
  double stop = 180.0;

  std::vector<double> angles() const { return angle_range(start, step, stop); }
  static AngleSpec parse(const std::string& text);  // "start:step:stop"
  std::string to_string() const;
};

struct ExperimentConfig {
  PhantomKind phantom = PhantomKind::Piecewise;
  int n = 64;
  /// 0 selects round(91 n / 64), which keeps M/N near 0.667 with 30 angles.
  int detectors = 0;
  AngleSpec angles;
  double noise = 0.05;
  int trials = 1;
  std::uint64_t seed = 1;
  SolverConfig solver;
  Variant variant = Variant::Model16;
  std::filesystem::path out_dir = "srs_out";
  /// Empty means take the phantom's class means / standard deviation.
  std::vector<double> means;
  std::vector<double> std_devs;
  PgmFormat pgm_format = PgmFormat::Binary;
  bool write_artifacts = true;
  std::filesystem::path export_matrix;  // empty: no triplet export
  /// Worker threads for trials; 0 means SRS_THREADS or the OpenMP default.
  int threads = 0;

  /// Defaults for the piecewise (8-class) or smooth (3-class) experiments.
  static ExperimentConfig preset(PhantomKind kind);

  void validate() const;
};

/// Applies "key=value" pairs onto cfg. Throws ParameterError on unknown keys
/// or unparseable values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Reads a flat key=value file; '#' starts a comment.
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

struct TrialResult {
  std::uint64_t seed = 0;
  double rec_err = 0.0;
  double seg_err = 0.0;
  double seconds = 0.0;
  int outer_iters = 0;
  std::string status = "ok";
  std::size_t isolated_points = 0;

  bool ok() const { return status == "ok"; }
};

struct RunReport {
  int n = 0;
  int detectors = 0;
  std::size_t rays = 0;
  std::size_t pixels = 0;
  std::vector<TrialResult> trials;
  double mean_rec_err = 0.0;
  double mean_seg_err = 0.0;
  double mean_seconds = 0.0;
  double mean_outer_iters = 0.0;
  double std_rec_err = 0.0;
  double std_seg_err = 0.0;
  double std_seconds = 0.0;
  std::vector<std::filesystem::path> files;

  std::size_t failed_trials() const;
};

/// Trial seeds are seed, seed+1, ..., seed+trials-1.
RunReport run_experiment(const ExperimentConfig& cfg);

/// Detector count keeping M/N near 0.667: round(91 n / 64).
int sweep_detectors(int n);
/// Angle step 6 * 64 / n degrees.
double sweep_angle_step(int n);

/// One report per side; each run writes into out_dir/n<side>.
std::vector<RunReport> scale_sweep(const ExperimentConfig& base, const std::vector<int>& sides);

/// Header seed,rec_err,seg_err,seconds,outer_iters,status; one row per trial
/// followed by an aggregate row whose seed column is "mean".
void write_report_csv(const RunReport& report, const std::filesystem::path& path);

/// iter,E0,F,rel_change_x
void write_energy_trace_csv(const std::vector<EnergyRecord>& trace,
                            const std::filesystem::path& path);

/// Summary of a sweep, one line per side.
void write_sweep_csv(const std::vector<RunReport>& reports, const std::filesystem::path& path);

/// Effective detector count for cfg (resolves the 0 = auto setting).
int resolved_detectors(const ExperimentConfig& cfg);

}  // namespace srs
