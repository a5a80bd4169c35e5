#ifndef SSMT_KALMAN_HPP
#define SSMT_KALMAN_HPP

#include "ssmt/parallel.hpp"
#include "ssmt/segmentation.hpp"
#include "ssmt/types.hpp"

namespace ssmt {

/// Time-invariant parameters of the per-(frequency, taper) random-walk model
///   Y(k,j,m) = Z(k,j,m) + eps,   eps ~ CN(0, obs_var[m])
///   Z(k,j,m) = Z(k-1,j,m) + v,   v   ~ CN(0, state_var(j,m))
/// Complex variances are total (real + imaginary) variances.
struct ModelParams {
  Matrix<double> state_var;     // J x M, >= 0
  std::vector<double> obs_var;  // M, > 0

  std::size_t num_freqs() const noexcept { return state_var.rows(); }
  std::size_t num_tapers() const noexcept { return state_var.cols(); }

  /// Throws ConfigError on shape mismatch, non-finite or out-of-range entries.
  void validate() const;
};

/// Posterior of one chain after window k.
struct FilterState {
  Complex mean{};
  double variance = 0.0;
  double gain = 0.0;
};

struct FilterTrace {
  Tensor3<Complex> means;
  Tensor3<double> variances;
  Tensor3<double> gains;
};

/// Prior Z_0 ~ CN(mean, variance) for every chain.
struct FilterInit {
  Matrix<Complex> means;     // J x M
  Matrix<double> variances;  // J x M

  /// Z_0 = 0 with variance equal to the chain's state variance.
  static FilterInit from_params(const ModelParams& params);
};

/// (prior_var + state_var) / (obs_var + prior_var + state_var).
double kalman_gain(double prior_var, double state_var, double obs_var);

FilterState kalman_step(const FilterState& prev, Complex observation, double state_var,
                        double obs_var);

namespace detail {
/// kalman_step without argument checks, for loops that validated up front.
inline FilterState kalman_update(const FilterState& prev, Complex observation, double state_var,
                                 double obs_var) {
  const double predicted = prev.variance + state_var;
  const double gain = predicted / (obs_var + predicted);
  return {(1.0 - gain) * prev.mean + gain * observation, (1.0 - gain) * predicted, gain};
}
}  // namespace detail

/// Runs an independent Kalman filter along k for every (j, m) chain.
FilterTrace filter_all(const EigenCoefficients& obs, const ModelParams& params,
                       const FilterInit& init, Backend backend = Backend::openmp);

/// filter_all with FilterInit::from_params.
FilterTrace filter_all(const EigenCoefficients& obs, const ModelParams& params,
                       Backend backend = Backend::openmp);

/// Fixed point of the gain recursion under constant parameters. With
/// P the steady-state prior variance, P^2 - q P - q r = 0, so
///   P = (q + sqrt(q^2 + 4 q r)) / 2,   C = P / (r + P).
double steady_state_gain(double state_var, double obs_var);

}  // namespace ssmt

#endif  // SSMT_KALMAN_HPP
