#ifndef SSMT_PIPELINE_HPP
#define SSMT_PIPELINE_HPP

#include <filesystem>
#include <optional>
#include <string>

#include "ssmt/adaptive.hpp"
#include "ssmt/em.hpp"
#include "ssmt/metrics.hpp"
#include "ssmt/simulate.hpp"
#include "ssmt/spectrogram.hpp"

namespace ssmt {

enum class Method { mt, ssmt, assmt };

Method parse_method(std::string_view name);
std::string_view to_string(Method method);

/// Everything needed to reproduce one `estimate` run.
struct RunConfig {
  Method method = Method::assmt;
  double window_seconds = 6.0;
  double overlap_fraction = 0.0;
  std::size_t tapers = 3;
  std::optional<double> nw;  // default (M + 1) / 2
  double alpha = 0.95;
  /// Length of the initial segment used for the EM fit. Required (> 0) for
  /// assmt; for ssmt zero means the whole record.
  double baseline_seconds = 0.0;
  double em_tol = 1e-6;
  int em_max_iter = 50;
  bool demean = false;
  Scale scale = Scale::dB;
  bool full_grid = false;
  bool binary = false;
  Backend backend = Backend::openmp;

  std::filesystem::path input;
  std::string input_format = "csv";  // csv | f64
  std::optional<double> sample_rate_hz;
  std::filesystem::path output_dir;

  /// Throws ConfigError for out-of-range or inconsistent settings.
  void validate() const;
  double time_half_bandwidth() const;
};

struct EstimateResult {
  RunConfig config;
  std::size_t window_length = 0;
  std::size_t hop = 0;
  std::size_t num_samples = 0;
  Spectrogram spectrogram;            // linear, full grid
  std::optional<EmResult> em;         // ssmt / assmt
  std::optional<Tensor3<double>> gains;
  std::optional<Tensor3<double>> state_var;
};

/// Window length in samples and hop for a config at a given sample rate.
std::size_t window_samples(double window_seconds, double sample_rate_hz);
std::size_t hop_samples(std::size_t window_length, double overlap_fraction);

/// Pure computation: segmentation, tapering, fitting and filtering.
EstimateResult estimate(const TimeSeries& series, const RunConfig& config);

TimeSeries read_input(const RunConfig& config);

/// Writes spectrogram (CSV or binary), axis files, params and traces for the
/// state-space methods, and manifest.json into config.output_dir.
void write_estimate(const EstimateResult& result);

/// read_input + estimate + write_estimate. Nothing is written if reading or
/// estimation fails.
EstimateResult run_pipeline(const RunConfig& config);

/// Rebuilds the RunConfig recorded in a manifest written by write_estimate.
RunConfig load_run_config(const std::filesystem::path& manifest_path);

enum class Scenario { paper, regime_switch };

struct SimulateRequest {
  Scenario scenario = Scenario::paper;
  SimulationConfig paper = paper_simulation_config();
  RegimeSwitchConfig regime;
  std::uint64_t seed = 1;
  double truth_window_seconds = 6.0;
  std::filesystem::path output_dir;
};

/// The regime-switch scenario used by the CLI: 900 s at 100 Hz, a 10 Hz AR(2)
/// band (pole radius 0.9) whose power steps up 20 dB between 300 s and 600 s,
/// in white noise that exceeds the band outside that segment.
RegimeSwitchConfig default_regime_switch_config();

/// Noise-free spectrum of a regime-switch signal on a window grid: the mean
/// level over each window times the base AR density, divided by J.
Spectrogram regime_switch_ground_truth(const RegimeSwitchConfig& config,
                                       std::size_t window_length, std::size_t hop);

/// Writes signal.csv, truth.csv (+ axes) and manifest.json.
void run_simulate(const SimulateRequest& request);

/// Scores the spectrogram in estimate_dir against either a simulation
/// manifest (truth recomputed on the estimate's own window grid) or a truth
/// matrix CSV on the same grid.
DivergenceReport run_compare(const std::filesystem::path& estimate_dir,
                             const std::filesystem::path& truth);

}  // namespace ssmt

#endif  // SSMT_PIPELINE_HPP
