#ifndef SSMT_EM_HPP
#define SSMT_EM_HPP

#include <optional>
#include <vector>

#include "ssmt/kalman.hpp"

namespace ssmt {

struct EmConfig {
  /// Stop when |LL_i - LL_{i-1}| <= tol * |LL_{i-1}|. Zero disables the test.
  double tol = 1e-6;
  int max_iter = 50;
  /// Starting point; method-of-moments estimate when absent.
  std::optional<ModelParams> initial;
  Backend backend = Backend::openmp;
};

struct EmResult {
  ModelParams params;
  /// LL of every parameter iterate visited, the last entry belongs to params.
  std::vector<double> log_likelihood;
  int iterations = 0;
  bool converged = false;
};

/// Exact complex-Gaussian log-likelihood of all chains under the model with
/// Z_0 ~ CN(0, state_var) (the FilterInit::from_params prior).
double log_likelihood(const EigenCoefficients& obs, const ModelParams& params,
                      Backend backend = Backend::openmp);

/// Moment estimates from the window-to-window differences dY of each chain:
/// E|dY|^2 = q + 2r and E[dY_k conj(dY_{k-1})] = -r. The per-taper noise is
/// the median of the per-chain estimates over frequency.
ModelParams initial_params(const EigenCoefficients& obs);

/// Maximum-likelihood fit of the time-invariant state variances (per j, m)
/// and observation variances (per m, shared across frequency).
///
/// E-step: Kalman filter, Rauch-Tung-Striebel smoother and lag-one covariance
/// per chain. M-step:
///   q(j,m) = (E|Z_0|^2 + sum_k E|Z_k - Z_{k-1}|^2) / (K + 1)
///   r(m)   = sum_{j,k} E|Y_k - Z_k|^2 / (K J)
/// The K + 1 denominator comes from the Z_0 ~ CN(0, q) prior term, which
/// keeps the update an exact maximizer and the likelihood monotone.
///
/// Requires at least two windows. If max_iter is reached before the
/// tolerance test passes the result is returned with converged = false.
EmResult em_fit(const EigenCoefficients& obs, const EmConfig& config = {});

/// The first `num_windows` windows of obs.
EigenCoefficients leading_windows(const EigenCoefficients& obs, std::size_t num_windows);

}  // namespace ssmt

#endif  // SSMT_EM_HPP
