#include "ssmt/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssmt {
namespace {

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in [0, 1]");
}

}  // namespace

AdaptiveParams::AdaptiveParams(ModelParams baseline) : baseline_(std::move(baseline)) {
  baseline_.validate();
}

NonstationarityTracker::NonstationarityTracker(Matrix<double> ema, Matrix<Complex> prev_obs,
                                               double alpha, std::size_t windows_seen)
    : ema_(std::move(ema)), prev_obs_(std::move(prev_obs)), alpha_(alpha),
      windows_seen_(windows_seen) {
  check_alpha(alpha_);
}

NonstationarityTracker NonstationarityTracker::cold(std::size_t num_freqs,
                                                    std::size_t num_tapers, double alpha) {
  return NonstationarityTracker(Matrix<double>(num_freqs, num_tapers),
                                Matrix<Complex>(num_freqs, num_tapers), alpha, 0);
}

NonstationarityTracker NonstationarityTracker::warm(Matrix<double> ema,
                                                    Matrix<Complex> prev_obs, double alpha) {
  if (ema.rows() != prev_obs.rows() || ema.cols() != prev_obs.cols()) {
    throw ConfigError("tracker: ema and previous observation shapes differ");
  }
  for (double e : ema.data()) {
    if (!(e >= 0.0) || !std::isfinite(e)) {
      throw ConfigError("tracker: ema must be finite and nonnegative");
    }
  }
  return NonstationarityTracker(std::move(ema), std::move(prev_obs), alpha, 2);
}

void NonstationarityTracker::update(std::span<const Complex> obs_k) {
  if (obs_k.size() != prev_obs_.size()) {
    throw ConfigError("tracker: window has " + std::to_string(obs_k.size()) +
                      " coefficients, expected " + std::to_string(prev_obs_.size()));
  }
  for (const Complex& y : obs_k) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
      throw DataError("tracker: non-finite observation");
    }
  }
  auto& ema = ema_.data();
  auto& prev = prev_obs_.data();
  if (windows_seen_ == 1) {
    for (std::size_t i = 0; i < ema.size(); ++i) ema[i] = std::norm(obs_k[i] - prev[i]);
  } else if (windows_seen_ >= 2) {
    for (std::size_t i = 0; i < ema.size(); ++i) {
      ema[i] = (1.0 - alpha_) * ema[i] + alpha_ * std::norm(obs_k[i] - prev[i]);
    }
  }
  std::copy(obs_k.begin(), obs_k.end(), prev.begin());
  if (windows_seen_ < 2) ++windows_seen_;
}

NonstationarityTracker ema_update(NonstationarityTracker tracker,
                                  std::span<const Complex> obs_k) {
  tracker.update(obs_k);
  return tracker;
}

double adaptive_state_variance(double ema_value, double baseline_state_var, double obs_var) {
  if (!(ema_value >= 0.0)) throw ConfigError("adaptive_state_variance: ema must be >= 0");
  return std::max(ema_value - 2.0 * obs_var, baseline_state_var);
}

double adaptive_state_variance(double ema_value, const AdaptiveParams& params,
                               std::size_t j, std::size_t m) {
  return adaptive_state_variance(ema_value, params.baseline_state_var()(j, m),
                                 params.obs_var()[m]);
}

AdaptiveFilter::AdaptiveFilter(AdaptiveParams params, double alpha, Backend backend)
    : params_(std::move(params)),
      tracker_(NonstationarityTracker::cold(params_.num_freqs(), params_.num_tapers(), alpha)),
      backend_(backend),
      states_(params_.num_freqs() * params_.num_tapers()),
      state_var_(params_.baseline_state_var().data()) {
  // Z_0 ~ CN(0, baseline state variance), matching FilterInit::from_params.
  for (std::size_t c = 0; c < states_.size(); ++c) {
    states_[c].variance = params_.baseline_state_var().data()[c];
  }
}

void AdaptiveFilter::step(std::span<const Complex> obs_k) {
  tracker_.update(obs_k);
  const std::size_t num_tapers = params_.num_tapers();
  const bool primed = tracker_.primed();
  const auto& ema = tracker_.ema().data();
  const auto& baseline = params_.baseline_state_var().data();
  const auto& obs_var = params_.obs_var();
  detail::for_each_index(states_.size(), backend_, [&](std::size_t c) {
    const double r = obs_var[c % num_tapers];
    const double q = primed ? std::max(ema[c] - 2.0 * r, baseline[c]) : baseline[c];
    state_var_[c] = q;
    // The tracker has already rejected non-finite input.
    states_[c] = detail::kalman_update(states_[c], obs_k[c], q, r);
  });
}

AssmtTrace assmt_filter(std::size_t num_windows, const WindowReader& read_window,
                        const AdaptiveParams& params, double alpha, Backend backend) {
  const std::size_t num_freqs = params.num_freqs();
  const std::size_t num_tapers = params.num_tapers();
  AssmtTrace trace{{Tensor3<Complex>(num_windows, num_freqs, num_tapers),
                    Tensor3<double>(num_windows, num_freqs, num_tapers),
                    Tensor3<double>(num_windows, num_freqs, num_tapers)},
                   Tensor3<double>(num_windows, num_freqs, num_tapers),
                   Tensor3<double>(num_windows, num_freqs, num_tapers)};
  AdaptiveFilter filter(params, alpha, backend);
  for (std::size_t k = 0; k < num_windows; ++k) {
    filter.step(read_window(k));
    const auto states = filter.states();
    const auto state_var = filter.state_var();
    const auto& ema = filter.tracker().ema().data();
    auto means = trace.filter.means.window(k);
    auto variances = trace.filter.variances.window(k);
    auto gains = trace.filter.gains.window(k);
    auto q_out = trace.state_var.window(k);
    auto ema_out = trace.ema.window(k);
    for (std::size_t c = 0; c < states.size(); ++c) {
      means[c] = states[c].mean;
      variances[c] = states[c].variance;
      gains[c] = states[c].gain;
      q_out[c] = state_var[c];
      ema_out[c] = ema[c];
    }
  }
  return trace;
}

AssmtTrace assmt_filter(const EigenCoefficients& obs, const AdaptiveParams& params,
                        double alpha, Backend backend) {
  if (params.num_freqs() != obs.num_freqs() || params.num_tapers() != obs.num_tapers()) {
    throw ConfigError("assmt_filter: parameter shape does not match observations");
  }
  return assmt_filter(
      obs.num_windows(), [&](std::size_t k) { return obs.coeffs.window(k); }, params, alpha,
      backend);
}

Spectrogram assmt_spectrogram(const AssmtTrace& trace, const EigenCoefficients& grid) {
  return ssmt_spectrogram(trace.filter, grid);
}

Spectrogram assmt_spectrogram(const EigenCoefficients& obs, const AdaptiveParams& params,
                              double alpha, Backend backend) {
  const std::size_t num_freqs = params.num_freqs();
  const std::size_t num_tapers = params.num_tapers();
  if (num_freqs != obs.num_freqs() || num_tapers != obs.num_tapers()) {
    throw ConfigError("assmt_spectrogram: parameter shape does not match observations");
  }
  if (obs.num_windows() == 0) throw ConfigError("spectrogram: empty input");
  Spectrogram spec;
  spec.power = Matrix<double>(obs.num_windows(), num_freqs);
  spec.frequencies_hz = obs.frequencies_hz;
  spec.window_times_s = obs.window_times_s;
  spec.sample_rate_hz = obs.sample_rate_hz;
  spec.scale = Scale::linear;
  AdaptiveFilter filter(params, alpha, backend);
  const double inv_tapers = 1.0 / static_cast<double>(num_tapers);
  for (std::size_t k = 0; k < obs.num_windows(); ++k) {
    filter.step(obs.coeffs.window(k));
    const auto states = filter.states();
    auto row = spec.power.row(k);
    for (std::size_t j = 0; j < num_freqs; ++j) {
      double total = 0.0;
      for (std::size_t m = 0; m < num_tapers; ++m) total += std::norm(states[j * num_tapers + m].mean);
      row[j] = total * inv_tapers;
    }
  }
  return spec;
}

}  // namespace ssmt
