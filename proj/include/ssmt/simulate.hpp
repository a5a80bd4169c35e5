#ifndef SSMT_SIMULATE_HPP
#define SSMT_SIMULATE_HPP

#include <cstdint>
#include <random>
#include <vector>

#include "ssmt/segmentation.hpp"
#include "ssmt/spectrogram.hpp"

namespace ssmt {

using Rng = std::mt19937_64;

/// A conjugate pair of roots r exp(+-i 2 pi f / fs).
struct RootPair {
  double freq_hz = 0.0;
  double radius = 0.0;
};

/// x_t = sum_i coeffs[i] x_{t-1-i} + innovation_std e_t,  e_t ~ N(0, 1).
struct ArProcess {
  std::vector<double> coeffs;
  double innovation_std = 1.0;
};

/// Recursion coefficients whose characteristic polynomial has the given roots:
/// 1 - sum_i a_i z^{-i} = prod (1 - 2 r cos(w) z^{-1} + r^2 z^{-2}).
std::vector<double> ar_coeffs_from_roots(const std::vector<RootPair>& poles,
                                         double sample_rate_hz);

/// MA coefficients b_1..b_q of prod (1 - 2 r cos(w) z^{-1} + r^2 z^{-2}).
std::vector<double> ma_coeffs_from_roots(const std::vector<RootPair>& zeros,
                                         double sample_rate_hz);

/// Largest root modulus of 1 - sum a_i z^{-i} (0 for an empty recursion).
double max_pole_radius(const std::vector<double>& ar_coeffs);

/// Samples discarded before output: 10 time constants of the slowest pole.
std::size_t burn_in_samples(const std::vector<double>& ar_coeffs);

/// Stationary AR recursion driven by Gaussian innovations, burn-in discarded.
/// Throws ConfigError if any pole lies on or outside the unit circle.
TimeSeries gen_ar(const ArProcess& process, double duration_s, double sample_rate_hz,
                  Rng& rng);

/// Two-sided spectral density of an ARMA process at normalized angular
/// frequency w (rad/sample): innovation_var |B(e^{iw})|^2 / |A(e^{iw})|^2.
double arma_density(const std::vector<double>& ar_coeffs, const std::vector<double>& ma_coeffs,
                    double innovation_var, double omega);

/// Pole/zero loci at a point in time. Between knots the frequency and radius
/// of every root pair are interpolated linearly; outside the knot range the
/// nearest knot holds.
struct ArmaKnot {
  double time_s = 0.0;
  std::vector<RootPair> poles;
  std::vector<RootPair> zeros;
};

struct ArmaSchedule {
  std::vector<ArmaKnot> knots;
  double innovation_std = 1.0;

  ArmaKnot at(double time_s) const;
  /// Throws ConfigError for empty/unsorted knots, mismatched root counts or
  /// a pole radius outside [0, 1).
  void validate() const;
};

/// Time-varying ARMA recursion. The coefficients at sample t are rebuilt from
/// the interpolated roots, so stability at the knots implies stability
/// everywhere in between. The burn-in runs with the t = 0 coefficients.
TimeSeries gen_arma_tv(const ArmaSchedule& schedule, double duration_s,
                       double sample_rate_hz, Rng& rng);

/// Amplitude-modulated AR(6) plus frequency-modulated ARMA(6,4) in white noise:
///   y_t = y1_t cos(2 pi f0 t) + y2_t + sigma v_t.
struct SimulationConfig {
  double duration_s = 600.0;
  double sample_rate_hz = 100.0;
  ArProcess ar1;
  ArmaSchedule arma2;
  double carrier_freq_hz = 0.02;
  double snr_db = 30.0;  // +inf disables the noise term
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// The default two-component configuration at 25 Hz over 600 s: AR(6) poles
/// clustered at 11 Hz (radius 0.98), ARMA(6,4) poles centred on a frequency
/// sweeping from 2 Hz to 8 Hz over the record, with zeros near the AR band and
/// at Nyquist. Coefficients depend on the rate and the sweep on the duration,
/// so change either by editing the returned schedule, not the fields alone.
SimulationConfig paper_simulation_config(std::uint64_t seed = 1);

struct SimulatedData {
  TimeSeries signal;
  double noise_std = 0.0;
  Spectrogram truth;  // non-overlapping windows of truth_window_length samples
};

/// Generates the signal; noise_std is set from the realized signal power so
/// that 10 log10(P_signal / sigma^2) = snr_db.
SimulatedData gen_paper_dataset(const SimulationConfig& config,
                                std::size_t truth_window_length);

/// Noise-free spectrum on an arbitrary window grid, scaled like the
/// taper-averaged eigen-spectrum of the signal (density / J): the carrier's
/// mean cos^2 over each window times the AR(6) density plus the ARMA density
/// at the window center. Full J-point grid.
Spectrogram paper_ground_truth(const SimulationConfig& config, std::size_t window_length,
                               std::size_t hop);

/// Piecewise-stationary signal: one base AR realization whose amplitude is
/// scaled by sqrt(levels[i]) on segment i, plus white background noise.
struct RegimeSwitchConfig {
  std::vector<double> levels;          // power multipliers, one per segment
  std::vector<double> switch_times_s;  // levels.size() - 1 increasing instants
  ArProcess base;
  double duration_s = 0.0;
  double sample_rate_hz = 0.0;
  double noise_std = 0.0;
};

TimeSeries gen_regime_switch(const RegimeSwitchConfig& config, Rng& rng);

}  // namespace ssmt

#endif  // SSMT_SIMULATE_HPP
