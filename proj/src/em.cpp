#include "ssmt/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace ssmt {
namespace {

void require_shape(const EigenCoefficients& obs, const ModelParams& params) {
  params.validate();
  if (params.num_freqs() != obs.num_freqs() || params.num_tapers() != obs.num_tapers()) {
    throw ConfigError("parameter shape does not match observations");
  }
}

double complex_normal_logpdf(Complex residual, double variance) {
  return -std::log(std::numbers::pi * variance) - std::norm(residual) / variance;
}

double chain_log_likelihood(const EigenCoefficients& obs, std::size_t j, std::size_t m,
                            double q, double r) {
  Complex mean{};
  double variance = q;
  double ll = 0.0;
  for (std::size_t k = 0; k < obs.num_windows(); ++k) {
    const Complex y = obs.coeffs(k, j, m);
    const double prior = variance + q;
    ll += complex_normal_logpdf(y - mean, prior + r);
    const double gain = prior / (prior + r);
    mean += gain * (y - mean);
    variance = (1.0 - gain) * prior;
  }
  return ll;
}

struct ChainStats {
  double log_likelihood = 0.0;
  double state_sum = 0.0;  // E|Z_0|^2 + sum_k E|Z_k - Z_{k-1}|^2
  double obs_sum = 0.0;    // sum_k E|Y_k - Z_k|^2
};

// Forward filter, RTS smoother and lag-one covariances for one chain.
// Index 0 is the Z_0 prior, observations occupy 1..K.
ChainStats chain_e_step(const EigenCoefficients& obs, std::size_t j, std::size_t m,
                        double q, double r) {
  const std::size_t num_windows = obs.num_windows();
  std::vector<Complex> filt_mean(num_windows + 1), smooth_mean(num_windows + 1);
  std::vector<double> filt_var(num_windows + 1), prior_var(num_windows + 1),
      smooth_var(num_windows + 1), lag_cov(num_windows + 1);

  ChainStats stats;
  filt_mean[0] = Complex{};
  filt_var[0] = q;
  for (std::size_t k = 1; k <= num_windows; ++k) {
    const Complex y = obs.coeffs(k - 1, j, m);
    prior_var[k] = filt_var[k - 1] + q;
    stats.log_likelihood += complex_normal_logpdf(y - filt_mean[k - 1], prior_var[k] + r);
    const double gain = prior_var[k] / (prior_var[k] + r);
    filt_mean[k] = filt_mean[k - 1] + gain * (y - filt_mean[k - 1]);
    filt_var[k] = (1.0 - gain) * prior_var[k];
  }

  smooth_mean[num_windows] = filt_mean[num_windows];
  smooth_var[num_windows] = filt_var[num_windows];
  for (std::size_t k = num_windows; k-- > 0;) {
    const double smoother_gain = filt_var[k] / prior_var[k + 1];
    smooth_mean[k] = filt_mean[k] + smoother_gain * (smooth_mean[k + 1] - filt_mean[k]);
    smooth_var[k] =
        filt_var[k] + smoother_gain * smoother_gain * (smooth_var[k + 1] - prior_var[k + 1]);
    lag_cov[k + 1] = smoother_gain * smooth_var[k + 1];  // Cov(Z_{k+1}, Z_k | Y)
  }

  stats.state_sum = std::norm(smooth_mean[0]) + smooth_var[0];
  for (std::size_t k = 1; k <= num_windows; ++k) {
    stats.state_sum += std::norm(smooth_mean[k] - smooth_mean[k - 1]) + smooth_var[k] +
                       smooth_var[k - 1] - 2.0 * lag_cov[k];
    stats.obs_sum += std::norm(obs.coeffs(k - 1, j, m) - smooth_mean[k]) + smooth_var[k];
  }
  return stats;
}

double median(std::vector<double> values) {
  const auto mid = values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2);
  std::nth_element(values.begin(), mid, values.end());
  const double upper = *mid;
  if (values.size() % 2 == 1) return upper;
  return 0.5 * (upper + *std::max_element(values.begin(), mid));
}

}  // namespace

double log_likelihood(const EigenCoefficients& obs, const ModelParams& params,
                      Backend backend) {
  require_shape(obs, params);
  const std::size_t num_tapers = obs.num_tapers();
  const std::size_t chains = obs.num_freqs() * num_tapers;
  std::vector<double> per_chain(chains);
  detail::for_each_index(chains, backend, [&](std::size_t c) {
    const std::size_t j = c / num_tapers, m = c % num_tapers;
    per_chain[c] = chain_log_likelihood(obs, j, m, params.state_var(j, m), params.obs_var[m]);
  });
  double total = 0.0;
  for (double ll : per_chain) total += ll;
  return total;
}

ModelParams initial_params(const EigenCoefficients& obs) {
  const std::size_t num_windows = obs.num_windows();
  const std::size_t num_freqs = obs.num_freqs();
  const std::size_t num_tapers = obs.num_tapers();
  if (num_windows < 2) throw DataError("insufficient data: EM needs at least two windows");

  Matrix<double> diff_power(num_freqs, num_tapers);
  Matrix<double> noise(num_freqs, num_tapers);
  for (std::size_t j = 0; j < num_freqs; ++j) {
    for (std::size_t m = 0; m < num_tapers; ++m) {
      double power = 0.0, lag_one = 0.0;
      Complex previous_diff{};
      for (std::size_t k = 1; k < num_windows; ++k) {
        const Complex diff = obs.coeffs(k, j, m) - obs.coeffs(k - 1, j, m);
        power += std::norm(diff);
        if (k >= 2) lag_one += (diff * std::conj(previous_diff)).real();
        previous_diff = diff;
      }
      power /= static_cast<double>(num_windows - 1);
      diff_power(j, m) = power;
      // -E[dY_k conj(dY_{k-1})] = r; with a single difference fall back to a
      // quarter of the difference power (half of it attributed to noise).
      noise(j, m) = num_windows >= 3
                        ? std::max(-lag_one / static_cast<double>(num_windows - 2), 0.0)
                        : power / 4.0;
    }
  }

  ModelParams params{Matrix<double>(num_freqs, num_tapers),
                     std::vector<double>(num_tapers)};
  for (std::size_t m = 0; m < num_tapers; ++m) {
    std::vector<double> column(num_freqs), diffs(num_freqs);
    for (std::size_t j = 0; j < num_freqs; ++j) {
      column[j] = noise(j, m);
      diffs[j] = diff_power(j, m);
    }
    double r = median(column);
    if (!(r > 0.0)) r = median(diffs) / 4.0;
    if (!(r > 0.0)) {
      double mean = 0.0;
      for (double d : diffs) mean += d;
      r = mean / (4.0 * static_cast<double>(num_freqs));
    }
    if (!(r > 0.0) || !std::isfinite(r)) {
      throw DataError("degenerate data: observations do not vary across windows");
    }
    params.obs_var[m] = r;
    for (std::size_t j = 0; j < num_freqs; ++j) {
      params.state_var(j, m) = std::max(diff_power(j, m) - 2.0 * r, 1e-2 * r);
    }
  }
  return params;
}

EmResult em_fit(const EigenCoefficients& obs, const EmConfig& config) {
  const std::size_t num_windows = obs.num_windows();
  const std::size_t num_freqs = obs.num_freqs();
  const std::size_t num_tapers = obs.num_tapers();
  if (num_windows < 2) throw DataError("insufficient data: EM needs at least two windows");
  if (config.max_iter < 0) throw ConfigError("em_fit: max_iter must be >= 0");
  if (!(config.tol >= 0.0)) throw ConfigError("em_fit: tol must be >= 0");

  EmResult result;
  result.params = config.initial ? *config.initial : initial_params(obs);
  require_shape(obs, result.params);
  for (double q : result.params.state_var.data()) {
    if (!(q > 0.0)) throw ConfigError("em_fit: initial state variances must be > 0");
  }

  const std::size_t chains = num_freqs * num_tapers;
  std::vector<ChainStats> stats(chains);
  const auto e_step = [&](const ModelParams& params) {
    detail::for_each_index(chains, config.backend, [&](std::size_t c) {
      const std::size_t j = c / num_tapers, m = c % num_tapers;
      stats[c] = chain_e_step(obs, j, m, params.state_var(j, m), params.obs_var[m]);
    });
    double total = 0.0;
    for (const auto& s : stats) total += s.log_likelihood;
    return total;
  };

  for (int iter = 0; iter < config.max_iter; ++iter) {
    const double ll = e_step(result.params);
    result.log_likelihood.push_back(ll);
    if (iter > 0 && config.tol > 0.0) {
      const double previous = result.log_likelihood[result.log_likelihood.size() - 2];
      if (std::abs(ll - previous) <= config.tol * std::abs(previous)) {
        result.converged = true;
        return result;
      }
    }

    ModelParams next{Matrix<double>(num_freqs, num_tapers), std::vector<double>(num_tapers)};
    for (std::size_t m = 0; m < num_tapers; ++m) {
      double obs_total = 0.0;
      for (std::size_t j = 0; j < num_freqs; ++j) {
        const auto& s = stats[j * num_tapers + m];
        next.state_var(j, m) = std::max(s.state_sum / static_cast<double>(num_windows + 1),
                                        std::numeric_limits<double>::min());
        obs_total += s.obs_sum;
      }
      next.obs_var[m] = obs_total / static_cast<double>(num_windows * num_freqs);
      if (!(next.obs_var[m] > 0.0) || !std::isfinite(next.obs_var[m])) {
        throw DataError("em_fit: observation variance collapsed to zero");
      }
    }
    result.params = std::move(next);
    result.iterations = iter + 1;
  }

  result.log_likelihood.push_back(e_step(result.params));
  return result;
}

EigenCoefficients leading_windows(const EigenCoefficients& obs, std::size_t num_windows) {
  if (num_windows > obs.num_windows()) {
    throw ConfigError("leading_windows: requested more windows than available");
  }
  EigenCoefficients out;
  out.sample_rate_hz = obs.sample_rate_hz;
  out.frequencies_hz = obs.frequencies_hz;
  out.window_times_s.assign(obs.window_times_s.begin(),
                            obs.window_times_s.begin() + static_cast<std::ptrdiff_t>(num_windows));
  out.coeffs = Tensor3<Complex>(num_windows, obs.num_freqs(), obs.num_tapers());
  const auto& src = obs.coeffs.data();
  std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(out.coeffs.size()),
            out.coeffs.data().begin());
  return out;
}

}  // namespace ssmt
