// Command-line front end: simulate, estimate, compare, tapers.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ssmt/io.hpp"
#include "ssmt/pipeline.hpp"
#include "ssmt/tapers.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct SimulateOptions {
  bool paper_flag = false;
  std::string scenario = "paper";
  std::uint64_t seed = 1;
  std::optional<double> snr_db;
  double truth_window_seconds = 6.0;
  std::string out;
};

struct EstimateOptions {
  ssmt::RunConfig config;
  std::string method = "assmt";
  std::string scale = "dB";
  std::string backend = "openmp";
  std::string input;
  std::string out;
  std::optional<double> nw;
  std::optional<double> sample_rate_hz;
  std::string manifest;
};

struct CompareOptions {
  std::string estimate_dir;
  std::string truth;
};

struct TaperOptions {
  std::optional<std::size_t> length;
  std::optional<double> window_seconds;
  std::optional<double> sample_rate_hz;
  std::size_t tapers = 3;
  std::optional<double> nw;
  std::string out;
};

void run_simulate(const SimulateOptions& opts) {
  ssmt::SimulateRequest request;
  if (opts.paper_flag || opts.scenario == "paper") {
    request.scenario = ssmt::Scenario::paper;
  } else if (opts.scenario == "regime-switch") {
    request.scenario = ssmt::Scenario::regime_switch;
  } else {
    throw ssmt::ConfigError("unknown scenario '" + opts.scenario + "'");
  }
  request.seed = opts.seed;
  request.truth_window_seconds = opts.truth_window_seconds;
  request.output_dir = opts.out;
  request.paper = ssmt::paper_simulation_config(opts.seed);
  request.regime = ssmt::default_regime_switch_config();
  if (opts.snr_db) request.paper.snr_db = *opts.snr_db;
  request.paper.validate();
  ssmt::run_simulate(request);
  std::cout << "wrote simulation to " << opts.out << '\n';
}

void run_estimate(EstimateOptions opts) {
  ssmt::RunConfig config;
  if (!opts.manifest.empty()) {
    config = ssmt::load_run_config(opts.manifest);
    if (!opts.out.empty()) config.output_dir = opts.out;
  } else {
    config = opts.config;
    config.method = ssmt::parse_method(opts.method);
    config.scale = ssmt::parse_scale(opts.scale);
    config.backend = ssmt::parse_backend(opts.backend);
    config.nw = opts.nw;
    config.sample_rate_hz = opts.sample_rate_hz;
    config.input = opts.input;
    config.output_dir = opts.out;
    if (opts.input.empty()) throw ssmt::ConfigError("--input is required");
  }
  if (config.output_dir.empty()) throw ssmt::ConfigError("--out is required");

  const ssmt::EstimateResult result = ssmt::run_pipeline(config);
  std::cout << "method=" << ssmt::to_string(config.method)
            << " windows=" << result.spectrogram.num_windows()
            << " window_length=" << result.window_length << " hop=" << result.hop << '\n';
  if (result.em) {
    std::cout << "em_iterations=" << result.em->iterations
              << " em_converged=" << (result.em->converged ? "true" : "false") << '\n';
  }
  std::cout << "wrote estimate to " << config.output_dir.string() << '\n';
}

void run_compare(const CompareOptions& opts) {
  const ssmt::DivergenceReport report = ssmt::run_compare(opts.estimate_dir, opts.truth);
  const auto bins = std::count(report.bins_used.begin(), report.bins_used.end(), true);
  std::vector<double> sorted = report.per_window;
  std::sort(sorted.begin(), sorted.end());
  const double median = sorted.empty() ? 0.0 : sorted[sorted.size() / 2];

  std::cout << "Itakura-Saito divergence (truth first, mean over bins)\n"
            << "  windows:        " << report.per_window.size() << '\n'
            << "  frequency bins: " << bins << '\n'
            << "  total:          " << ssmt::io::format_value(report.total) << '\n';
  if (!sorted.empty()) {
    std::cout << "  per window:     min " << ssmt::io::format_value(sorted.front()) << ", median "
              << ssmt::io::format_value(median) << ", max "
              << ssmt::io::format_value(sorted.back()) << '\n';
  }
  std::cout << "is_total=" << ssmt::io::format_value(report.total) << '\n'
            << "windows=" << report.per_window.size() << '\n'
            << "bins_used=" << bins << '\n';
}

void run_tapers(const TaperOptions& opts) {
  std::size_t length = 0;
  if (opts.length) {
    length = *opts.length;
  } else if (opts.window_seconds && opts.sample_rate_hz) {
    length = ssmt::window_samples(*opts.window_seconds, *opts.sample_rate_hz);
  } else {
    throw ssmt::ConfigError("give --length, or --window-seconds with --sample-rate");
  }
  const double nw = opts.nw ? *opts.nw : ssmt::default_time_half_bandwidth(opts.tapers);
  const ssmt::TaperBank bank = ssmt::dpss(length, nw, opts.tapers);

  std::cout << "J=" << length << " NW=" << ssmt::io::format_value(nw) << " M=" << opts.tapers
            << '\n';
  for (std::size_t m = 0; m < bank.concentrations.size(); ++m) {
    std::cout << "taper " << m << " concentration=" << ssmt::io::format_value(bank.concentrations[m])
              << '\n';
  }
  if (!opts.out.empty()) {
    std::filesystem::create_directories(opts.out);
    const std::filesystem::path dir = opts.out;
    ssmt::io::write_matrix_csv(dir / "tapers.csv", bank.tapers, ssmt::Scale::linear,
                               "nw=" + ssmt::io::format_value(nw));
    ssmt::io::write_vector_csv(dir / "concentrations.csv", bank.concentrations);
    std::cout << "wrote tapers to " << opts.out << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multitaper and state-space multitaper spectrogram estimation"};
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic signal and its true spectrogram");
  simulate->add_flag("--paper-iv-a", sim.paper_flag, "Two-component AR/ARMA benchmark (default)");
  simulate->add_option("--scenario", sim.scenario, "paper | regime-switch")->capture_default_str();
  simulate->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  simulate->add_option("--snr-db", sim.snr_db, "Signal-to-noise ratio in dB (paper scenario)");
  simulate->add_option("--truth-window-seconds", sim.truth_window_seconds,
                       "Window length of truth.csv")->capture_default_str();
  simulate->add_option("--out", sim.out, "Output directory")->required();

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate a spectrogram");
  estimate->add_option("--input", est.input, "Signal file");
  estimate->add_option("--input-format", est.config.input_format, "csv | f64")->capture_default_str();
  estimate->add_option("--sample-rate", est.sample_rate_hz, "Sample rate in Hz (required for f64)");
  estimate->add_option("--out", est.out, "Output directory");
  estimate->add_option("--method", est.method, "mt | ssmt | assmt")->capture_default_str();
  estimate->add_option("--window-seconds", est.config.window_seconds)->capture_default_str();
  estimate->add_option("--overlap", est.config.overlap_fraction, "Window overlap fraction in [0, 1)")
      ->capture_default_str();
  estimate->add_option("--tapers", est.config.tapers, "Number of Slepian tapers")->capture_default_str();
  estimate->add_option("--nw", est.nw, "Time-half-bandwidth product (default (M+1)/2)");
  estimate->add_option("--alpha", est.config.alpha, "EMA forgetting factor")->capture_default_str();
  estimate->add_option("--baseline-seconds", est.config.baseline_seconds,
                       "Initial segment used for the EM fit")->capture_default_str();
  estimate->add_option("--em-tol", est.config.em_tol)->capture_default_str();
  estimate->add_option("--em-max-iter", est.config.em_max_iter)->capture_default_str();
  estimate->add_flag("--demean", est.config.demean, "Subtract each window's mean");
  estimate->add_option("--scale", est.scale, "dB | linear")->capture_default_str();
  estimate->add_flag("--full-grid", est.config.full_grid, "Write all J frequency bins");
  estimate->add_flag("--binary", est.config.binary, "Write spectrogram.f32 instead of CSV");
  estimate->add_option("--backend", est.backend, "serial | openmp")->capture_default_str();
  estimate->add_option("--manifest", est.manifest, "Replay the run recorded in a manifest.json");

  CompareOptions cmp;
  auto* compare = app.add_subcommand("compare", "Itakura-Saito divergence against ground truth");
  compare->add_option("--estimate", cmp.estimate_dir, "Estimate output directory")->required();
  compare->add_option("--truth", cmp.truth,
                      "Simulation directory or manifest.json, or a truth matrix CSV")->required();

  TaperOptions tap;
  auto* tapers = app.add_subcommand("tapers", "Print or dump a Slepian taper bank");
  tapers->add_option("--length", tap.length, "Taper length J in samples");
  tapers->add_option("--window-seconds", tap.window_seconds);
  tapers->add_option("--sample-rate", tap.sample_rate_hz);
  tapers->add_option("--tapers", tap.tapers)->capture_default_str();
  tapers->add_option("--nw", tap.nw);
  tapers->add_option("--out", tap.out, "Directory for tapers.csv and concentrations.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) run_simulate(sim);
    if (*estimate) run_estimate(est);
    if (*compare) run_compare(cmp);
    if (*tapers) run_tapers(tap);
  } catch (const ssmt::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ssmt::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
