#ifndef SSMT_SEGMENTATION_HPP
#define SSMT_SEGMENTATION_HPP

#include <cstddef>
#include <vector>

#include "ssmt/parallel.hpp"
#include "ssmt/tapers.hpp"
#include "ssmt/types.hpp"

namespace ssmt {

/// Uniformly sampled real signal. Construction validates that the samples
/// are nonempty and finite and that the sample rate is positive.
class TimeSeries {
 public:
  TimeSeries(std::vector<double> samples, double sample_rate_hz);

  const std::vector<double>& samples() const noexcept { return samples_; }
  double sample_rate_hz() const noexcept { return sample_rate_hz_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }

 private:
  std::vector<double> samples_;
  double sample_rate_hz_;
};

struct SegmentedSeries {
  Matrix<double> windows;  // K x J
  std::size_t window_length = 0;
  std::size_t hop = 0;
  double sample_rate_hz = 0.0;

  std::size_t num_windows() const noexcept { return windows.rows(); }
};

/// Complex tapered DFT coefficients, K windows x J bins x M tapers.
struct EigenCoefficients {
  Tensor3<Complex> coeffs;
  std::vector<double> frequencies_hz;  // length J, bin j at j/J * fs
  std::vector<double> window_times_s;  // length K, window centers
  double sample_rate_hz = 0.0;

  std::size_t num_windows() const noexcept { return coeffs.windows(); }
  std::size_t num_freqs() const noexcept { return coeffs.freqs(); }
  std::size_t num_tapers() const noexcept { return coeffs.tapers(); }
};

/// Cuts the series into K = floor((T - J) / hop) + 1 full windows. Trailing
/// samples that do not fill a window are dropped. With demean set, each
/// window has its own mean subtracted.
SegmentedSeries segment(const TimeSeries& series, std::size_t window_length,
                        std::size_t hop, bool demean = false);

/// coeffs(k, j, m) = J^{-1/2} sum_l window_k[l] taper_m[l] exp(-i 2 pi l j / J).
EigenCoefficients eigen_coefficients(const SegmentedSeries& segmented,
                                     const TaperBank& tapers,
                                     Backend backend = Backend::openmp);

/// Frequency grid of a J-point window: j / J * fs for j = 0..J-1.
std::vector<double> frequency_grid(std::size_t window_length, double sample_rate_hz);

/// Window center times for K windows of length J spaced hop samples apart.
std::vector<double> window_centers(std::size_t num_windows, std::size_t window_length,
                                   std::size_t hop, double sample_rate_hz);

}  // namespace ssmt

#endif  // SSMT_SEGMENTATION_HPP
