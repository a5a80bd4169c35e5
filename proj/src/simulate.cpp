#include "ssmt/simulate.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ssmt {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Expands prod (1 - 2 r cos(w) z^{-1} + r^2 z^{-2}) into [1, c_1, ..., c_2n].
std::vector<double> root_polynomial(const std::vector<RootPair>& roots,
                                    double sample_rate_hz) {
  std::vector<double> poly{1.0};
  for (const auto& root : roots) {
    const double w = kTwoPi * root.freq_hz / sample_rate_hz;
    const double quad[3] = {1.0, -2.0 * root.radius * std::cos(w), root.radius * root.radius};
    std::vector<double> next(poly.size() + 2, 0.0);
    for (std::size_t i = 0; i < poly.size(); ++i) {
      for (std::size_t d = 0; d < 3; ++d) next[i + d] += poly[i] * quad[d];
    }
    poly = std::move(next);
  }
  return poly;
}

std::size_t sample_count(double duration_s, double sample_rate_hz) {
  if (!(duration_s > 0.0) || !(sample_rate_hz > 0.0)) {
    throw ConfigError("duration and sample rate must be positive");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate_hz));
  if (n == 0) throw ConfigError("duration shorter than one sample");
  return n;
}

// One step of x_t = sum a_i x_{t-1-i} + scale (e_t + sum b_i e_{t-1-i}) with
// history buffers holding the most recent values first.
double arma_step(const std::vector<double>& ar, const std::vector<double>& ma,
                 std::vector<double>& x_hist, std::vector<double>& e_hist, double scale,
                 double innovation) {
  double value = 0.0;
  for (std::size_t i = 0; i < ar.size(); ++i) value += ar[i] * x_hist[i];
  double drive = innovation;
  for (std::size_t i = 0; i < ma.size(); ++i) drive += ma[i] * e_hist[i];
  value += scale * drive;
  if (!x_hist.empty()) {
    std::rotate(x_hist.rbegin(), x_hist.rbegin() + 1, x_hist.rend());
    x_hist[0] = value;
  }
  if (!e_hist.empty()) {
    std::rotate(e_hist.rbegin(), e_hist.rbegin() + 1, e_hist.rend());
    e_hist[0] = innovation;
  }
  return value;
}

void check_roots(const std::vector<RootPair>& roots, bool poles) {
  for (const auto& root : roots) {
    if (!std::isfinite(root.radius) || !std::isfinite(root.freq_hz) || root.radius < 0.0 ||
        (poles && root.radius >= 1.0)) {
      throw ConfigError(poles ? "unstable pole: radius must lie in [0, 1)"
                              : "invalid zero: radius must be finite and >= 0");
    }
  }
}

}  // namespace

std::vector<double> ar_coeffs_from_roots(const std::vector<RootPair>& poles,
                                         double sample_rate_hz) {
  check_roots(poles, true);
  const auto poly = root_polynomial(poles, sample_rate_hz);
  std::vector<double> coeffs(poly.size() - 1);
  for (std::size_t i = 1; i < poly.size(); ++i) coeffs[i - 1] = -poly[i];
  return coeffs;
}

std::vector<double> ma_coeffs_from_roots(const std::vector<RootPair>& zeros,
                                         double sample_rate_hz) {
  check_roots(zeros, false);
  const auto poly = root_polynomial(zeros, sample_rate_hz);
  return {poly.begin() + 1, poly.end()};
}

double max_pole_radius(const std::vector<double>& ar_coeffs) {
  const auto order = static_cast<Eigen::Index>(ar_coeffs.size());
  if (order == 0) return 0.0;
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(order, order);
  for (Eigen::Index i = 0; i < order; ++i) companion(0, i) = ar_coeffs[static_cast<std::size_t>(i)];
  for (Eigen::Index i = 1; i < order; ++i) companion(i, i - 1) = 1.0;
  const Eigen::VectorXcd roots = companion.eigenvalues();
  return roots.cwiseAbs().maxCoeff();
}

std::size_t burn_in_samples(const std::vector<double>& ar_coeffs) {
  // Radii this close to 1 come from rounding a unit-circle pole; the burn-in
  // would be longer than any practical record.
  constexpr double kMaxRadius = 1.0 - 1e-6;
  const double radius = max_pole_radius(ar_coeffs);
  if (!(radius < kMaxRadius)) {
    throw ConfigError("unstable AR polynomial: pole radius " + std::to_string(radius));
  }
  if (radius < std::numeric_limits<double>::min()) return 0;
  return static_cast<std::size_t>(std::ceil(10.0 / -std::log(radius)));
}

TimeSeries gen_ar(const ArProcess& process, double duration_s, double sample_rate_hz,
                  Rng& rng) {
  const std::size_t n = sample_count(duration_s, sample_rate_hz);
  const std::size_t burn_in = burn_in_samples(process.coeffs);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x_hist(process.coeffs.size(), 0.0), e_hist;
  const std::vector<double> no_ma;
  std::vector<double> out(n);
  for (std::size_t t = 0; t < burn_in + n; ++t) {
    const double value =
        arma_step(process.coeffs, no_ma, x_hist, e_hist, process.innovation_std, normal(rng));
    if (t >= burn_in) out[t - burn_in] = value;
  }
  return TimeSeries(std::move(out), sample_rate_hz);
}

double arma_density(const std::vector<double>& ar_coeffs, const std::vector<double>& ma_coeffs,
                    double innovation_var, double omega) {
  Complex a(1.0, 0.0), b(1.0, 0.0);
  for (std::size_t i = 0; i < ar_coeffs.size(); ++i) {
    a -= ar_coeffs[i] * std::polar(1.0, -omega * static_cast<double>(i + 1));
  }
  for (std::size_t i = 0; i < ma_coeffs.size(); ++i) {
    b += ma_coeffs[i] * std::polar(1.0, -omega * static_cast<double>(i + 1));
  }
  return innovation_var * std::norm(b) / std::norm(a);
}

ArmaKnot ArmaSchedule::at(double time_s) const {
  if (knots.empty()) throw ConfigError("ARMA schedule has no knots");
  if (time_s <= knots.front().time_s) return knots.front();
  if (time_s >= knots.back().time_s) return knots.back();
  const auto upper = std::upper_bound(
      knots.begin(), knots.end(), time_s,
      [](double t, const ArmaKnot& knot) { return t < knot.time_s; });
  const ArmaKnot& hi = *upper;
  const ArmaKnot& lo = *(upper - 1);
  const double w = (time_s - lo.time_s) / (hi.time_s - lo.time_s);
  const auto blend = [w](const std::vector<RootPair>& a, const std::vector<RootPair>& b) {
    std::vector<RootPair> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      out[i].freq_hz = (1.0 - w) * a[i].freq_hz + w * b[i].freq_hz;
      out[i].radius = (1.0 - w) * a[i].radius + w * b[i].radius;
    }
    return out;
  };
  return ArmaKnot{time_s, blend(lo.poles, hi.poles), blend(lo.zeros, hi.zeros)};
}

void ArmaSchedule::validate() const {
  if (knots.empty()) throw ConfigError("ARMA schedule has no knots");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    check_roots(knots[i].poles, true);
    check_roots(knots[i].zeros, false);
    if (i > 0) {
      if (!(knots[i].time_s > knots[i - 1].time_s)) {
        throw ConfigError("ARMA schedule knots must be strictly increasing in time");
      }
      if (knots[i].poles.size() != knots[0].poles.size() ||
          knots[i].zeros.size() != knots[0].zeros.size()) {
        throw ConfigError("ARMA schedule knots must share the model order");
      }
    }
  }
  if (!(innovation_std >= 0.0)) throw ConfigError("innovation std must be >= 0");
}

TimeSeries gen_arma_tv(const ArmaSchedule& schedule, double duration_s,
                       double sample_rate_hz, Rng& rng) {
  schedule.validate();
  const std::size_t n = sample_count(duration_s, sample_rate_hz);
  const ArmaKnot start = schedule.at(0.0);
  std::vector<double> ar = ar_coeffs_from_roots(start.poles, sample_rate_hz);
  std::vector<double> ma = ma_coeffs_from_roots(start.zeros, sample_rate_hz);
  const std::size_t burn_in = burn_in_samples(ar);
  const bool time_varying = schedule.knots.size() > 1;

  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> x_hist(ar.size(), 0.0), e_hist(ma.size(), 0.0);
  std::vector<double> out(n);
  for (std::size_t t = 0; t < burn_in + n; ++t) {
    if (time_varying && t >= burn_in) {
      const ArmaKnot knot =
          schedule.at(static_cast<double>(t - burn_in) / sample_rate_hz);
      ar = ar_coeffs_from_roots(knot.poles, sample_rate_hz);
      ma = ma_coeffs_from_roots(knot.zeros, sample_rate_hz);
    }
    const double value = arma_step(ar, ma, x_hist, e_hist, schedule.innovation_std, normal(rng));
    if (t >= burn_in) out[t - burn_in] = value;
  }
  return TimeSeries(std::move(out), sample_rate_hz);
}

void SimulationConfig::validate() const {
  sample_count(duration_s, sample_rate_hz);
  if (max_pole_radius(ar1.coeffs) >= 1.0) throw ConfigError("AR(6) component is unstable");
  if (!(ar1.innovation_std >= 0.0)) throw ConfigError("innovation std must be >= 0");
  arma2.validate();
  if (!std::isfinite(carrier_freq_hz)) throw ConfigError("carrier frequency must be finite");
  if (std::isnan(snr_db)) throw ConfigError("SNR must not be NaN");
}

SimulationConfig paper_simulation_config(std::uint64_t seed) {
  SimulationConfig config;
  config.rng_seed = seed;
  config.duration_s = 600.0;
  config.sample_rate_hz = 25.0;
  config.carrier_freq_hz = 0.02;
  config.snr_db = 30.0;

  config.ar1.coeffs = ar_coeffs_from_roots(
      {{10.5, 0.98}, {11.0, 0.98}, {11.5, 0.98}}, config.sample_rate_hz);
  config.ar1.innovation_std = 1.0;

  // Pole radius, spread, zeros and gain were calibrated so the three
  // estimators land near the reference divergence values at 30 dB SNR.
  constexpr double kPoleRadius = 0.948;
  constexpr double kPoleSpread = 1.04;
  const auto sweep_poles = [&](double center_hz) {
    return std::vector<RootPair>{{center_hz - kPoleSpread, kPoleRadius},
                                 {center_hz, kPoleRadius},
                                 {center_hz + kPoleSpread, kPoleRadius}};
  };
  const std::vector<RootPair> zeros{{12.5, 0.452}, {11.023, 0.84}};
  config.arma2.knots = {
      ArmaKnot{0.0, sweep_poles(2.0), zeros},
      ArmaKnot{config.duration_s, sweep_poles(8.0), zeros},
  };
  config.arma2.innovation_std = 0.372;
  return config;
}

Spectrogram paper_ground_truth(const SimulationConfig& config, std::size_t window_length,
                               std::size_t hop) {
  config.validate();
  const std::size_t n = sample_count(config.duration_s, config.sample_rate_hz);
  if (window_length == 0 || hop == 0 || hop > window_length) {
    throw ConfigError("ground truth: invalid window length or hop");
  }
  if (n < window_length) throw DataError("insufficient data: record shorter than one window");
  const std::size_t num_windows = (n - window_length) / hop + 1;
  const double fs = config.sample_rate_hz;
  const double jd = static_cast<double>(window_length);

  Spectrogram truth;
  truth.power = Matrix<double>(num_windows, window_length);
  truth.frequencies_hz = frequency_grid(window_length, fs);
  truth.window_times_s = window_centers(num_windows, window_length, hop, fs);
  truth.sample_rate_hz = fs;
  truth.scale = Scale::linear;

  const double ar_var = config.ar1.innovation_std * config.ar1.innovation_std;
  const double arma_var = config.arma2.innovation_std * config.arma2.innovation_std;
  const std::vector<double> no_ma;
  std::vector<double> ar_density(window_length);
  for (std::size_t j = 0; j < window_length; ++j) {
    ar_density[j] = arma_density(config.ar1.coeffs, no_ma, ar_var, kTwoPi * j / jd);
  }

  for (std::size_t k = 0; k < num_windows; ++k) {
    const std::size_t start = k * hop;
    double carrier_power = 0.0;
    for (std::size_t t = start; t < start + window_length; ++t) {
      const double c = std::cos(kTwoPi * config.carrier_freq_hz * static_cast<double>(t) / fs);
      carrier_power += c * c;
    }
    carrier_power /= jd;
    const ArmaKnot knot = config.arma2.at(truth.window_times_s[k]);
    const auto ar = ar_coeffs_from_roots(knot.poles, fs);
    const auto ma = ma_coeffs_from_roots(knot.zeros, fs);
    for (std::size_t j = 0; j < window_length; ++j) {
      const double omega = kTwoPi * static_cast<double>(j) / jd;
      truth.power(k, j) =
          (carrier_power * ar_density[j] + arma_density(ar, ma, arma_var, omega)) / jd;
    }
  }
  return truth;
}

SimulatedData gen_paper_dataset(const SimulationConfig& config,
                                std::size_t truth_window_length) {
  config.validate();
  Rng rng(config.rng_seed);
  const TimeSeries y1 = gen_ar(config.ar1, config.duration_s, config.sample_rate_hz, rng);
  const TimeSeries y2 = gen_arma_tv(config.arma2, config.duration_s, config.sample_rate_hz, rng);
  const std::size_t n = y1.size();
  const double fs = config.sample_rate_hz;

  std::vector<double> samples(n);
  double signal_power = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double carrier =
        std::cos(kTwoPi * config.carrier_freq_hz * static_cast<double>(t) / fs);
    samples[t] = y1.samples()[t] * carrier + y2.samples()[t];
    signal_power += samples[t] * samples[t];
  }
  signal_power /= static_cast<double>(n);

  const double noise_std =
      std::isinf(config.snr_db) && config.snr_db > 0.0
          ? 0.0
          : std::sqrt(signal_power / std::pow(10.0, config.snr_db / 10.0));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& s : samples) s += noise_std * normal(rng);

  return SimulatedData{TimeSeries(std::move(samples), fs), noise_std,
                       paper_ground_truth(config, truth_window_length, truth_window_length)};
}

TimeSeries gen_regime_switch(const RegimeSwitchConfig& config, Rng& rng) {
  if (config.levels.empty()) throw ConfigError("regime switch: at least one level required");
  if (config.switch_times_s.size() + 1 != config.levels.size()) {
    throw ConfigError("regime switch: need exactly one switch time per level change");
  }
  for (double level : config.levels) {
    if (!(level > 0.0) || !std::isfinite(level)) {
      throw ConfigError("regime switch: levels must be positive and finite");
    }
  }
  for (std::size_t i = 0; i < config.switch_times_s.size(); ++i) {
    const double t = config.switch_times_s[i];
    if (!(t > 0.0) || !(t < config.duration_s) ||
        (i > 0 && !(t > config.switch_times_s[i - 1]))) {
      throw ConfigError("regime switch: switch times must increase within the record");
    }
  }
  if (!(config.noise_std >= 0.0)) throw ConfigError("regime switch: noise std must be >= 0");

  const TimeSeries base = gen_ar(config.base, config.duration_s, config.sample_rate_hz, rng);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out(base.size());
  std::size_t segment = 0;
  for (std::size_t t = 0; t < out.size(); ++t) {
    const double time = static_cast<double>(t) / config.sample_rate_hz;
    while (segment < config.switch_times_s.size() && time >= config.switch_times_s[segment]) {
      ++segment;
    }
    out[t] = std::sqrt(config.levels[segment]) * base.samples()[t] +
             config.noise_std * normal(rng);
  }
  return TimeSeries(std::move(out), config.sample_rate_hz);
}

}  // namespace ssmt
