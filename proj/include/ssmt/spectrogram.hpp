#ifndef SSMT_SPECTROGRAM_HPP
#define SSMT_SPECTROGRAM_HPP

#include <string_view>
#include <vector>

#include "ssmt/kalman.hpp"
#include "ssmt/segmentation.hpp"
#include "ssmt/types.hpp"

namespace ssmt {

enum class Scale { linear, dB };

Scale parse_scale(std::string_view name);
std::string_view to_string(Scale scale);

/// Linear power below this is clamped before taking 10 log10.
inline constexpr double kDbFloor = 1e-15;

struct Spectrogram {
  Matrix<double> power;  // K x J' (windows x frequencies)
  std::vector<double> frequencies_hz;
  std::vector<double> window_times_s;
  double sample_rate_hz = 0.0;
  Scale scale = Scale::linear;

  std::size_t num_windows() const noexcept { return power.rows(); }
  std::size_t num_freqs() const noexcept { return power.cols(); }
};

/// power(k, j) = mean over tapers of |Z_{k|k}(j, m)|^2.
Spectrogram ssmt_spectrogram(const FilterTrace& trace, const EigenCoefficients& grid);

/// power(k, j) = mean over tapers of |Y(k, j, m)|^2, no smoothing across windows.
Spectrogram mt_spectrogram(const EigenCoefficients& obs);

/// 10 log10(max(power, kDbFloor)). A dB input is returned unchanged.
Spectrogram to_db(const Spectrogram& spec);

/// Keeps bins 0..floor(J/2) of a full-grid spectrogram.
Spectrogram one_sided(const Spectrogram& spec);

}  // namespace ssmt

#endif  // SSMT_SPECTROGRAM_HPP
