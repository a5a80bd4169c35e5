#include "ssmt/kalman.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssmt {

void ModelParams::validate() const {
  if (obs_var.size() != state_var.cols()) {
    throw ConfigError("model params: obs_var has " + std::to_string(obs_var.size()) +
                      " tapers but state_var has " + std::to_string(state_var.cols()));
  }
  for (double q : state_var.data()) {
    if (!std::isfinite(q) || q < 0.0) {
      throw ConfigError("model params: state variances must be finite and >= 0");
    }
  }
  for (double r : obs_var) {
    if (!std::isfinite(r) || r <= 0.0) {
      throw ConfigError("model params: observation variances must be finite and > 0");
    }
  }
}

FilterInit FilterInit::from_params(const ModelParams& params) {
  FilterInit init;
  init.means = Matrix<Complex>(params.num_freqs(), params.num_tapers());
  init.variances = params.state_var;
  return init;
}

double kalman_gain(double prior_var, double state_var, double obs_var) {
  if (!(obs_var > 0.0)) throw ConfigError("kalman_gain: observation variance must be > 0");
  if (prior_var < 0.0 || state_var < 0.0) {
    throw ConfigError("kalman_gain: variances must be nonnegative");
  }
  const double predicted = prior_var + state_var;
  return predicted / (obs_var + predicted);
}

FilterState kalman_step(const FilterState& prev, Complex observation, double state_var,
                        double obs_var) {
  if (!std::isfinite(observation.real()) || !std::isfinite(observation.imag())) {
    throw DataError("kalman_step: non-finite observation");
  }
  kalman_gain(prev.variance, state_var, obs_var);  // argument checks
  return detail::kalman_update(prev, observation, state_var, obs_var);
}

FilterTrace filter_all(const EigenCoefficients& obs, const ModelParams& params,
                       const FilterInit& init, Backend backend) {
  params.validate();
  const std::size_t num_windows = obs.num_windows();
  const std::size_t num_freqs = obs.num_freqs();
  const std::size_t num_tapers = obs.num_tapers();
  if (params.num_freqs() != num_freqs || params.num_tapers() != num_tapers) {
    throw ConfigError("filter_all: parameter shape does not match observations");
  }
  if (init.means.rows() != num_freqs || init.means.cols() != num_tapers ||
      init.variances.rows() != num_freqs || init.variances.cols() != num_tapers) {
    throw ConfigError("filter_all: initial state shape does not match observations");
  }

  for (const Complex& y : obs.coeffs.data()) {
    if (!std::isfinite(y.real()) || !std::isfinite(y.imag())) {
      throw DataError("filter_all: non-finite observation");
    }
  }

  FilterTrace trace{Tensor3<Complex>(num_windows, num_freqs, num_tapers),
                    Tensor3<double>(num_windows, num_freqs, num_tapers),
                    Tensor3<double>(num_windows, num_freqs, num_tapers)};
  // Chains are filtered in contiguous blocks so each window touches one short
  // run of memory instead of striding across the whole tensor.
  constexpr std::size_t kBlock = 64;
  const std::size_t chains = num_freqs * num_tapers;
  const std::size_t blocks = (chains + kBlock - 1) / kBlock;
  detail::for_each_index(blocks, backend, [&](std::size_t block) {
    const std::size_t begin = block * kBlock;
    const std::size_t end = std::min(chains, begin + kBlock);
    FilterState states[kBlock];
    for (std::size_t c = begin; c < end; ++c) {
      states[c - begin] = {init.means.data()[c], init.variances.data()[c], 0.0};
    }
    for (std::size_t k = 0; k < num_windows; ++k) {
      const auto y = obs.coeffs.window(k);
      auto means = trace.means.window(k);
      auto variances = trace.variances.window(k);
      auto gains = trace.gains.window(k);
      for (std::size_t c = begin; c < end; ++c) {
        FilterState& state = states[c - begin];
        state = detail::kalman_update(state, y[c], params.state_var.data()[c],
                                      params.obs_var[c % num_tapers]);
        means[c] = state.mean;
        variances[c] = state.variance;
        gains[c] = state.gain;
      }
    }
  });
  return trace;
}

FilterTrace filter_all(const EigenCoefficients& obs, const ModelParams& params,
                       Backend backend) {
  return filter_all(obs, params, FilterInit::from_params(params), backend);
}

double steady_state_gain(double state_var, double obs_var) {
  if (!(obs_var > 0.0)) {
    throw ConfigError("steady_state_gain: observation variance must be > 0");
  }
  if (state_var < 0.0) throw ConfigError("steady_state_gain: state variance must be >= 0");
  if (state_var == 0.0) return 0.0;
  const double prior =
      0.5 * (state_var + std::sqrt(state_var * state_var + 4.0 * state_var * obs_var));
  return prior / (obs_var + prior);
}

}  // namespace ssmt
