#include "ssmt/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <numbers>

#include "json.hpp"
#include "ssmt/io.hpp"

namespace ssmt {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kManifestName = "manifest.json";

json roots_to_json(const std::vector<RootPair>& roots) {
  json out = json::array();
  for (const auto& r : roots) out.push_back({{"freq_hz", r.freq_hz}, {"radius", r.radius}});
  return out;
}

std::vector<RootPair> roots_from_json(const json& j) {
  std::vector<RootPair> out;
  for (const auto& r : j) out.push_back({r.at("freq_hz").get<double>(), r.at("radius").get<double>()});
  return out;
}

json ar_to_json(const ArProcess& p) {
  return {{"coeffs", p.coeffs}, {"innovation_std", p.innovation_std}};
}

ArProcess ar_from_json(const json& j) {
  return {j.at("coeffs").get<std::vector<double>>(), j.at("innovation_std").get<double>()};
}

json simulation_to_json(const SimulationConfig& c) {
  json knots = json::array();
  for (const auto& k : c.arma2.knots) {
    knots.push_back({{"time_s", k.time_s}, {"poles", roots_to_json(k.poles)},
                     {"zeros", roots_to_json(k.zeros)}});
  }
  return {{"duration_s", c.duration_s},
          {"sample_rate_hz", c.sample_rate_hz},
          {"ar1", ar_to_json(c.ar1)},
          {"arma2", {{"knots", knots}, {"innovation_std", c.arma2.innovation_std}}},
          {"carrier_freq_hz", c.carrier_freq_hz},
          // JSON has no infinity; null stands for a noiseless record.
          {"snr_db", std::isinf(c.snr_db) ? json(nullptr) : json(c.snr_db)},
          {"rng_seed", c.rng_seed}};
}

SimulationConfig simulation_from_json(const json& j) {
  SimulationConfig c;
  c.duration_s = j.at("duration_s").get<double>();
  c.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  c.ar1 = ar_from_json(j.at("ar1"));
  c.arma2.knots.clear();
  for (const auto& k : j.at("arma2").at("knots")) {
    c.arma2.knots.push_back({k.at("time_s").get<double>(), roots_from_json(k.at("poles")),
                             roots_from_json(k.at("zeros"))});
  }
  c.arma2.innovation_std = j.at("arma2").at("innovation_std").get<double>();
  c.carrier_freq_hz = j.at("carrier_freq_hz").get<double>();
  c.snr_db = j.at("snr_db").is_null() ? std::numeric_limits<double>::infinity()
                                      : j.at("snr_db").get<double>();
  c.rng_seed = j.at("rng_seed").get<std::uint64_t>();
  return c;
}

json regime_to_json(const RegimeSwitchConfig& c) {
  return {{"levels", c.levels},          {"switch_times_s", c.switch_times_s},
          {"base", ar_to_json(c.base)},  {"duration_s", c.duration_s},
          {"sample_rate_hz", c.sample_rate_hz}, {"noise_std", c.noise_std}};
}

RegimeSwitchConfig regime_from_json(const json& j) {
  RegimeSwitchConfig c;
  c.levels = j.at("levels").get<std::vector<double>>();
  c.switch_times_s = j.at("switch_times_s").get<std::vector<double>>();
  c.base = ar_from_json(j.at("base"));
  c.duration_s = j.at("duration_s").get<double>();
  c.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  c.noise_std = j.at("noise_std").get<double>();
  return c;
}

json run_config_to_json(const RunConfig& c) {
  json j = {{"method", to_string(c.method)},
            {"window_seconds", c.window_seconds},
            {"overlap_fraction", c.overlap_fraction},
            {"tapers", c.tapers},
            {"nw", c.time_half_bandwidth()},
            {"alpha", c.alpha},
            {"baseline_seconds", c.baseline_seconds},
            {"em_tol", c.em_tol},
            {"em_max_iter", c.em_max_iter},
            {"demean", c.demean},
            {"scale", to_string(c.scale)},
            {"full_grid", c.full_grid},
            {"binary", c.binary},
            {"backend", to_string(c.backend)},
            {"input", c.input.string()},
            {"input_format", c.input_format},
            {"output_dir", c.output_dir.string()}};
  j["sample_rate_hz"] = c.sample_rate_hz ? json(*c.sample_rate_hz) : json(nullptr);
  return j;
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  c.method = parse_method(j.at("method").get<std::string>());
  c.window_seconds = j.at("window_seconds").get<double>();
  c.overlap_fraction = j.at("overlap_fraction").get<double>();
  c.tapers = j.at("tapers").get<std::size_t>();
  c.nw = j.at("nw").get<double>();
  c.alpha = j.at("alpha").get<double>();
  c.baseline_seconds = j.at("baseline_seconds").get<double>();
  c.em_tol = j.at("em_tol").get<double>();
  c.em_max_iter = j.at("em_max_iter").get<int>();
  c.demean = j.at("demean").get<bool>();
  c.scale = parse_scale(j.at("scale").get<std::string>());
  c.full_grid = j.at("full_grid").get<bool>();
  c.binary = j.at("binary").get<bool>();
  c.backend = parse_backend(j.at("backend").get<std::string>());
  c.input = j.at("input").get<std::string>();
  c.input_format = j.at("input_format").get<std::string>();
  if (!j.at("sample_rate_hz").is_null()) c.sample_rate_hz = j.at("sample_rate_hz").get<double>();
  c.output_dir = j.at("output_dir").get<std::string>();
  return c;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io::FormatError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw io::FormatError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_json(const fs::path& path, const json& value) {
  std::ofstream out(path, std::ios::trunc);
  out << value.dump(2) << '\n';
  if (!out) throw io::FormatError("failed writing '" + path.string() + "'");
}

void write_spectrogram_files(const fs::path& dir, const std::string& stem,
                             const Spectrogram& spec, bool binary) {
  if (binary) {
    io::write_matrix_f32(dir / (stem + ".f32"), spec.power);
  } else {
    io::write_matrix_csv(dir / (stem + ".csv"), spec.power, spec.scale);
  }
}

// K x (J' M) matrix of a trace restricted to the first `freqs` bins.
Matrix<double> flatten_trace(const Tensor3<double>& trace, std::size_t freqs) {
  const std::size_t tapers = trace.tapers();
  Matrix<double> out(trace.windows(), freqs * tapers);
  for (std::size_t k = 0; k < trace.windows(); ++k) {
    for (std::size_t j = 0; j < freqs; ++j) {
      for (std::size_t m = 0; m < tapers; ++m) out(k, j * tapers + m) = trace(k, j, m);
    }
  }
  return out;
}

Spectrogram from_stored(Matrix<double> values, Scale scale) {
  Spectrogram spec;
  spec.power = std::move(values);
  spec.scale = scale;
  if (scale == Scale::dB) {
    for (double& p : spec.power.data()) p = std::pow(10.0, p / 10.0);
    spec.scale = Scale::linear;
  }
  return spec;
}

double base_ar_density(const ArProcess& base, double omega) {
  return arma_density(base.coeffs, {}, base.innovation_std * base.innovation_std, omega);
}

}  // namespace

Method parse_method(std::string_view name) {
  if (name == "mt") return Method::mt;
  if (name == "ssmt") return Method::ssmt;
  if (name == "assmt") return Method::assmt;
  throw ConfigError("unknown method '" + std::string(name) + "' (expected mt, ssmt or assmt)");
}

std::string_view to_string(Method method) {
  switch (method) {
    case Method::mt: return "mt";
    case Method::ssmt: return "ssmt";
    case Method::assmt: return "assmt";
  }
  return "?";
}

void RunConfig::validate() const {
  if (!(window_seconds > 0.0)) throw ConfigError("window length must be positive");
  if (!(overlap_fraction >= 0.0 && overlap_fraction < 1.0)) {
    throw ConfigError("overlap must lie in [0, 1)");
  }
  if (tapers < 1) throw ConfigError("at least one taper is required");
  if (nw && !(*nw > 0.0)) throw ConfigError("NW must be positive");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
  if (!(baseline_seconds >= 0.0)) throw ConfigError("baseline seconds must be >= 0");
  if (method == Method::assmt && !(baseline_seconds > 0.0)) {
    throw ConfigError("assmt requires --baseline-seconds > 0");
  }
  if (method != Method::mt && overlap_fraction != 0.0) {
    throw ConfigError("state-space methods use non-overlapping windows (overlap 0)");
  }
  if (em_max_iter < 1) throw ConfigError("EM needs at least one iteration");
  if (!(em_tol >= 0.0)) throw ConfigError("EM tolerance must be >= 0");
  if (input_format != "csv" && input_format != "f64") {
    throw ConfigError("input format must be csv or f64");
  }
  if (input_format == "f64" && !sample_rate_hz) {
    throw ConfigError("binary input requires --sample-rate");
  }
  if (sample_rate_hz && !(*sample_rate_hz > 0.0)) throw ConfigError("sample rate must be positive");
}

double RunConfig::time_half_bandwidth() const {
  return nw ? *nw : default_time_half_bandwidth(tapers);
}

std::size_t window_samples(double window_seconds, double sample_rate_hz) {
  const auto n = static_cast<std::size_t>(std::llround(window_seconds * sample_rate_hz));
  if (n < 2) throw ConfigError("window must span at least two samples");
  return n;
}

std::size_t hop_samples(std::size_t window_length, double overlap_fraction) {
  const auto hop = static_cast<std::size_t>(
      std::llround(static_cast<double>(window_length) * (1.0 - overlap_fraction)));
  return std::clamp<std::size_t>(hop, 1, window_length);
}

EstimateResult estimate(const TimeSeries& series, const RunConfig& config) {
  config.validate();
  EstimateResult result;
  result.config = config;
  result.num_samples = series.size();
  result.window_length = window_samples(config.window_seconds, series.sample_rate_hz());
  result.hop = hop_samples(result.window_length, config.overlap_fraction);

  const SegmentedSeries segmented =
      segment(series, result.window_length, result.hop, config.demean);
  const TaperBank bank = dpss(result.window_length, config.time_half_bandwidth(), config.tapers);
  const EigenCoefficients obs = eigen_coefficients(segmented, bank, config.backend);

  if (config.method == Method::mt) {
    result.spectrogram = mt_spectrogram(obs);
    return result;
  }

  std::size_t fit_windows = obs.num_windows();
  if (config.baseline_seconds > 0.0) {
    const auto baseline_samples = static_cast<std::size_t>(
        std::llround(config.baseline_seconds * series.sample_rate_hz()));
    if (baseline_samples < result.window_length) {
      throw DataError("insufficient data: baseline segment is shorter than one window");
    }
    fit_windows = std::min(fit_windows, (baseline_samples - result.window_length) / result.hop + 1);
  }
  if (fit_windows < 2) throw DataError("insufficient data: EM needs at least two windows");

  EmConfig em_config;
  em_config.tol = config.em_tol;
  em_config.max_iter = config.em_max_iter;
  em_config.backend = config.backend;
  result.em = em_fit(leading_windows(obs, fit_windows), em_config);

  if (config.method == Method::ssmt) {
    const FilterTrace trace = filter_all(obs, result.em->params, config.backend);
    result.spectrogram = ssmt_spectrogram(trace, obs);
    result.gains = trace.gains;
    Tensor3<double> state_var(obs.num_windows(), obs.num_freqs(), obs.num_tapers());
    for (std::size_t k = 0; k < obs.num_windows(); ++k) {
      std::copy(result.em->params.state_var.data().begin(),
                result.em->params.state_var.data().end(), state_var.window(k).begin());
    }
    result.state_var = std::move(state_var);
  } else {
    const AssmtTrace trace =
        assmt_filter(obs, AdaptiveParams(result.em->params), config.alpha, config.backend);
    result.spectrogram = assmt_spectrogram(trace, obs);
    result.gains = trace.filter.gains;
    result.state_var = trace.state_var;
  }
  return result;
}

TimeSeries read_input(const RunConfig& config) {
  if (config.input_format == "f64") return io::read_signal_f64(config.input, *config.sample_rate_hz);
  return io::read_signal_csv(config.input, config.sample_rate_hz);
}

void write_estimate(const EstimateResult& result) {
  const RunConfig& config = result.config;
  if (config.output_dir.empty()) throw ConfigError("no output directory given");
  fs::create_directories(config.output_dir);
  const fs::path& dir = config.output_dir;

  Spectrogram spec = config.full_grid ? result.spectrogram : one_sided(result.spectrogram);
  if (config.scale == Scale::dB) spec = to_db(spec);
  write_spectrogram_files(dir, "spectrogram", spec, config.binary);
  io::write_vector_csv(dir / "frequencies.csv", spec.frequencies_hz);
  io::write_vector_csv(dir / "times.csv", spec.window_times_s);

  json outputs = json::array({config.binary ? "spectrogram.f32" : "spectrogram.csv",
                              "frequencies.csv", "times.csv"});
  json manifest = {{"tool", "ssmt"},
                   {"command", "estimate"},
                   {"config", run_config_to_json(config)},
                   {"input", {{"num_samples", result.num_samples},
                              {"sample_rate_hz", result.spectrogram.sample_rate_hz}}},
                   {"grid", {{"window_length", result.window_length},
                             {"hop", result.hop},
                             {"num_windows", result.spectrogram.num_windows()},
                             {"num_freqs", spec.num_freqs()},
                             {"one_sided", !config.full_grid}}}};

  if (result.em) {
    const ModelParams& params = result.em->params;
    json state_var = json::array();
    for (std::size_t j = 0; j < params.num_freqs(); ++j) {
      const auto row = params.state_var.row(j);
      state_var.push_back(std::vector<double>(row.begin(), row.end()));
    }
    write_json(dir / "params.json", {{"obs_var", params.obs_var}, {"state_var", state_var}});
    const std::string trace_header = "freqs=" + std::to_string(spec.num_freqs()) +
                                     " tapers=" + std::to_string(params.num_tapers());
    io::write_matrix_csv(dir / "gains.csv", flatten_trace(*result.gains, spec.num_freqs()),
                         Scale::linear, trace_header);
    io::write_matrix_csv(dir / "state_var.csv",
                         flatten_trace(*result.state_var, spec.num_freqs()), Scale::linear,
                         trace_header);
    outputs.push_back("params.json");
    outputs.push_back("gains.csv");
    outputs.push_back("state_var.csv");
    manifest["em"] = {{"iterations", result.em->iterations},
                      {"converged", result.em->converged},
                      {"log_likelihood", result.em->log_likelihood}};
  }
  manifest["outputs"] = outputs;
  write_json(dir / kManifestName, manifest);
}

EstimateResult run_pipeline(const RunConfig& config) {
  config.validate();
  const TimeSeries series = read_input(config);
  EstimateResult result = estimate(series, config);
  write_estimate(result);
  return result;
}

RunConfig load_run_config(const fs::path& manifest_path) {
  const json manifest = read_json(manifest_path);
  if (manifest.value("command", "") != "estimate") {
    throw ConfigError("'" + manifest_path.string() + "' is not an estimate manifest");
  }
  try {
    return run_config_from_json(manifest.at("config"));
  } catch (const json::exception& e) {
    throw io::FormatError("malformed manifest: " + std::string(e.what()));
  }
}

RegimeSwitchConfig default_regime_switch_config() {
  RegimeSwitchConfig config;
  config.sample_rate_hz = 100.0;
  config.duration_s = 900.0;
  config.levels = {1.0, 100.0, 1.0};
  config.switch_times_s = {300.0, 600.0};
  // In the quiet segments the band sits a few dB under the noise floor, so a
  // fit on them yields a small state variance and a sluggish fixed filter.
  config.base.coeffs = ar_coeffs_from_roots({{10.0, 0.9}}, config.sample_rate_hz);
  config.base.innovation_std = 1.0;
  config.noise_std = 25.0;
  return config;
}

Spectrogram regime_switch_ground_truth(const RegimeSwitchConfig& config,
                                       std::size_t window_length, std::size_t hop) {
  const double fs = config.sample_rate_hz;
  const auto n = static_cast<std::size_t>(std::llround(config.duration_s * fs));
  if (window_length == 0 || hop == 0 || n < window_length) {
    throw DataError("insufficient data: record shorter than one window");
  }
  const std::size_t num_windows = (n - window_length) / hop + 1;
  const double jd = static_cast<double>(window_length);
  Spectrogram truth;
  truth.power = Matrix<double>(num_windows, window_length);
  truth.frequencies_hz = frequency_grid(window_length, fs);
  truth.window_times_s = window_centers(num_windows, window_length, hop, fs);
  truth.sample_rate_hz = fs;
  for (std::size_t k = 0; k < num_windows; ++k) {
    double level = 0.0;
    std::size_t segment = 0;
    for (std::size_t t = k * hop; t < k * hop + window_length; ++t) {
      const double time = static_cast<double>(t) / fs;
      while (segment < config.switch_times_s.size() && time >= config.switch_times_s[segment]) {
        ++segment;
      }
      level += config.levels[segment];
    }
    level /= jd;
    for (std::size_t j = 0; j < window_length; ++j) {
      const double omega = 2.0 * std::numbers::pi * static_cast<double>(j) / jd;
      truth.power(k, j) = level * base_ar_density(config.base, omega) / jd;
    }
  }
  return truth;
}

void run_simulate(const SimulateRequest& request) {
  if (request.output_dir.empty()) throw ConfigError("no output directory given");
  json manifest = {{"tool", "ssmt"}, {"command", "simulate"}, {"seed", request.seed}};
  TimeSeries signal({0.0}, 1.0);
  Spectrogram truth;
  std::size_t truth_window = 0;

  if (request.scenario == Scenario::paper) {
    SimulationConfig config = request.paper;
    config.rng_seed = request.seed;
    truth_window = window_samples(request.truth_window_seconds, config.sample_rate_hz);
    SimulatedData data = gen_paper_dataset(config, truth_window);
    signal = std::move(data.signal);
    truth = std::move(data.truth);
    manifest["scenario"] = "paper";
    manifest["simulation"] = simulation_to_json(config);
    manifest["noise_std"] = data.noise_std;
  } else {
    Rng rng(request.seed);
    signal = gen_regime_switch(request.regime, rng);
    truth_window = window_samples(request.truth_window_seconds, request.regime.sample_rate_hz);
    truth = regime_switch_ground_truth(request.regime, truth_window, truth_window);
    manifest["scenario"] = "regime-switch";
    manifest["simulation"] = regime_to_json(request.regime);
  }

  fs::create_directories(request.output_dir);
  const fs::path& dir = request.output_dir;
  io::write_signal_csv(dir / "signal.csv", signal);
  const Spectrogram truth_one_sided = one_sided(truth);
  io::write_matrix_csv(dir / "truth.csv", truth_one_sided.power, Scale::linear);
  io::write_vector_csv(dir / "truth_frequencies.csv", truth_one_sided.frequencies_hz);
  io::write_vector_csv(dir / "truth_times.csv", truth_one_sided.window_times_s);
  manifest["truth_window_length"] = truth_window;
  manifest["outputs"] = {"signal.csv", "truth.csv", "truth_frequencies.csv", "truth_times.csv"};
  write_json(dir / kManifestName, manifest);
}

DivergenceReport run_compare(const fs::path& estimate_dir, const fs::path& truth_path) {
  const json est_manifest = read_json(estimate_dir / kManifestName);
  if (est_manifest.value("command", "") != "estimate") {
    throw ConfigError("'" + estimate_dir.string() + "' does not hold an estimate run");
  }
  const RunConfig config = run_config_from_json(est_manifest.at("config"));
  const json& grid = est_manifest.at("grid");
  const auto window_length = grid.at("window_length").get<std::size_t>();
  const auto hop = grid.at("hop").get<std::size_t>();
  const bool is_one_sided = grid.at("one_sided").get<bool>();
  const double fs = est_manifest.at("input").at("sample_rate_hz").get<double>();

  Spectrogram estimate_spec;
  if (config.binary) {
    estimate_spec = from_stored(io::read_matrix_f32(estimate_dir / "spectrogram.f32"), config.scale);
  } else {
    auto file = io::read_matrix_csv(estimate_dir / "spectrogram.csv");
    estimate_spec = from_stored(std::move(file.values), file.scale);
  }
  estimate_spec.frequencies_hz = io::read_vector_csv(estimate_dir / "frequencies.csv");
  estimate_spec.window_times_s = io::read_vector_csv(estimate_dir / "times.csv");
  estimate_spec.sample_rate_hz = fs;

  Spectrogram truth;
  if (truth_path.extension() == ".json" || fs::is_directory(truth_path)) {
    const fs::path manifest_path =
        fs::is_directory(truth_path) ? truth_path / kManifestName : truth_path;
    const json sim = read_json(manifest_path);
    if (sim.value("command", "") != "simulate") {
      throw ConfigError("'" + manifest_path.string() + "' is not a simulation manifest");
    }
    if (sim.at("scenario") == "paper") {
      truth = paper_ground_truth(simulation_from_json(sim.at("simulation")), window_length, hop);
    } else {
      truth = regime_switch_ground_truth(regime_from_json(sim.at("simulation")), window_length, hop);
    }
    if (is_one_sided) truth = one_sided(truth);
  } else {
    auto file = io::read_matrix_csv(truth_path);
    truth = from_stored(std::move(file.values), file.scale);
    truth.frequencies_hz = estimate_spec.frequencies_hz;
    truth.window_times_s = estimate_spec.window_times_s;
    truth.sample_rate_hz = fs;
  }
  return itakura_saito(estimate_spec, truth);
}

}  // namespace ssmt
