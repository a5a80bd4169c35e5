#ifndef SSMT_ADAPTIVE_HPP
#define SSMT_ADAPTIVE_HPP

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "ssmt/kalman.hpp"
#include "ssmt/spectrogram.hpp"
#include "ssmt/types.hpp"

namespace ssmt {

/// Baseline parameters of the adaptive filter, taken from a time-invariant fit.
class AdaptiveParams {
 public:
  explicit AdaptiveParams(ModelParams baseline);

  const Matrix<double>& baseline_state_var() const noexcept { return baseline_.state_var; }
  const std::vector<double>& obs_var() const noexcept { return baseline_.obs_var; }
  const ModelParams& baseline() const noexcept { return baseline_; }
  std::size_t num_freqs() const noexcept { return baseline_.num_freqs(); }
  std::size_t num_tapers() const noexcept { return baseline_.num_tapers(); }

  /// beta(j, m) = 2 obs_var[m] + baseline_state_var(j, m).
  double threshold(std::size_t j, std::size_t m) const {
    return 2.0 * baseline_.obs_var[m] + baseline_.state_var(j, m);
  }

 private:
  ModelParams baseline_;
};

/// Exponential moving average of the squared window-to-window change of every
/// eigen-coefficient:  ema_k = (1 - alpha) ema_{k-1} + alpha |Y_k - Y_{k-1}|^2.
class NonstationarityTracker {
 public:
  /// Cold start. The first window only primes prev_obs; the second sets
  /// ema to the first available difference; later windows follow the EMA.
  static NonstationarityTracker cold(std::size_t num_freqs, std::size_t num_tapers,
                                     double alpha);

  /// Warm start from an explicit ema and previous window.
  static NonstationarityTracker warm(Matrix<double> ema, Matrix<Complex> prev_obs,
                                     double alpha);

  /// obs_k holds J x M coefficients, taper index fastest.
  void update(std::span<const Complex> obs_k);

  double alpha() const noexcept { return alpha_; }
  const Matrix<double>& ema() const noexcept { return ema_; }
  const Matrix<Complex>& prev_obs() const noexcept { return prev_obs_; }
  /// True once ema holds an estimate (at least one difference seen).
  bool primed() const noexcept { return windows_seen_ >= 2; }

 private:
  NonstationarityTracker(Matrix<double> ema, Matrix<Complex> prev_obs, double alpha,
                         std::size_t windows_seen);

  Matrix<double> ema_;
  Matrix<Complex> prev_obs_;
  double alpha_;
  std::size_t windows_seen_;
};

NonstationarityTracker ema_update(NonstationarityTracker tracker,
                                  std::span<const Complex> obs_k);

/// max(ema - 2 obs_var, baseline_state_var).
double adaptive_state_variance(double ema_value, double baseline_state_var, double obs_var);
double adaptive_state_variance(double ema_value, const AdaptiveParams& params,
                               std::size_t j, std::size_t m);

/// Streaming adaptive filter. Each call to step() consumes one window of
/// eigen-coefficients exactly once: the tracker is updated first, then every
/// chain takes one Kalman step with its adaptive state variance. Until the
/// tracker is primed the baseline state variance is used.
class AdaptiveFilter {
 public:
  AdaptiveFilter(AdaptiveParams params, double alpha, Backend backend = Backend::openmp);

  void step(std::span<const Complex> obs_k);

  /// Current-window outputs, J x M each, taper index fastest.
  std::span<const FilterState> states() const noexcept { return states_; }
  std::span<const double> state_var() const noexcept { return state_var_; }
  const NonstationarityTracker& tracker() const noexcept { return tracker_; }
  const AdaptiveParams& params() const noexcept { return params_; }

 private:
  AdaptiveParams params_;
  NonstationarityTracker tracker_;
  Backend backend_;
  std::vector<FilterState> states_;
  std::vector<double> state_var_;
};

struct AssmtTrace {
  FilterTrace filter;
  Tensor3<double> state_var;  // adaptive state variance used at each window
  Tensor3<double> ema;        // tracker value at each window (0 before primed)
};

/// Supplies window k's J x M coefficients. Called once per window, in order.
using WindowReader = std::function<std::span<const Complex>(std::size_t k)>;

AssmtTrace assmt_filter(std::size_t num_windows, const WindowReader& read_window,
                        const AdaptiveParams& params, double alpha,
                        Backend backend = Backend::openmp);

AssmtTrace assmt_filter(const EigenCoefficients& obs, const AdaptiveParams& params,
                        double alpha, Backend backend = Backend::openmp);

/// Same averaging as ssmt_spectrogram, applied to the adaptive trace.
Spectrogram assmt_spectrogram(const AssmtTrace& trace, const EigenCoefficients& grid);

/// Single pass that keeps only the taper-averaged power of each window, not
/// the per-chain trace. Same values as the trace-based overload.
Spectrogram assmt_spectrogram(const EigenCoefficients& obs, const AdaptiveParams& params,
                              double alpha, Backend backend = Backend::openmp);

}  // namespace ssmt

#endif  // SSMT_ADAPTIVE_HPP
