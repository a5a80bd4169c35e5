#include "ssmt/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fft.hpp"

namespace ssmt {

TimeSeries::TimeSeries(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_)) {
    throw ConfigError("sample rate must be positive and finite");
  }
  if (samples_.empty()) throw DataError("insufficient data: empty time series");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw DataError("non-finite sample at index " + std::to_string(i));
    }
  }
}

std::vector<double> frequency_grid(std::size_t window_length, double sample_rate_hz) {
  std::vector<double> grid(window_length);
  for (std::size_t j = 0; j < window_length; ++j) {
    grid[j] = static_cast<double>(j) / static_cast<double>(window_length) * sample_rate_hz;
  }
  return grid;
}

std::vector<double> window_centers(std::size_t num_windows, std::size_t window_length,
                                   std::size_t hop, double sample_rate_hz) {
  std::vector<double> times(num_windows);
  for (std::size_t k = 0; k < num_windows; ++k) {
    times[k] = (static_cast<double>(k * hop) + 0.5 * static_cast<double>(window_length)) /
               sample_rate_hz;
  }
  return times;
}

SegmentedSeries segment(const TimeSeries& series, std::size_t window_length,
                        std::size_t hop, bool demean) {
  if (window_length == 0) throw ConfigError("window length must be positive");
  if (hop == 0) throw ConfigError("hop must be at least one sample");
  if (hop > window_length) throw ConfigError("hop must not exceed the window length");
  const std::size_t total = series.size();
  if (total < window_length) {
    throw DataError("insufficient data: " + std::to_string(total) +
                    " samples is shorter than one window of " +
                    std::to_string(window_length));
  }
  const std::size_t num_windows = (total - window_length) / hop + 1;

  SegmentedSeries out;
  out.window_length = window_length;
  out.hop = hop;
  out.sample_rate_hz = series.sample_rate_hz();
  out.windows = Matrix<double>(num_windows, window_length);
  const auto& samples = series.samples();
  for (std::size_t k = 0; k < num_windows; ++k) {
    auto row = out.windows.row(k);
    const auto begin = samples.begin() + static_cast<std::ptrdiff_t>(k * hop);
    std::copy(begin, begin + static_cast<std::ptrdiff_t>(window_length), row.begin());
    if (demean) {
      const double mean =
          std::accumulate(row.begin(), row.end(), 0.0) / static_cast<double>(window_length);
      for (double& x : row) x -= mean;
    }
  }
  return out;
}

EigenCoefficients eigen_coefficients(const SegmentedSeries& segmented,
                                     const TaperBank& tapers, Backend backend) {
  const std::size_t length = segmented.window_length;
  if (tapers.length() != length) {
    throw ConfigError("taper length " + std::to_string(tapers.length()) +
                      " does not match window length " + std::to_string(length));
  }
  const std::size_t num_windows = segmented.num_windows();
  const std::size_t num_tapers = tapers.num_tapers();

  EigenCoefficients out;
  out.sample_rate_hz = segmented.sample_rate_hz;
  out.frequencies_hz = frequency_grid(length, segmented.sample_rate_hz);
  out.window_times_s =
      window_centers(num_windows, length, segmented.hop, segmented.sample_rate_hz);
  out.coeffs = Tensor3<Complex>(num_windows, length, num_tapers);

  const detail::UnitaryRealDft dft(length);
  // One work item per window; each writes a disjoint slab of the tensor.
  detail::for_each_index(num_windows, backend, [&](std::size_t k) {
    thread_local std::size_t cached_length = 0;
    thread_local std::unique_ptr<detail::UnitaryRealDft::Workspace> workspace;
    if (!workspace || cached_length != length) {
      workspace = std::make_unique<detail::UnitaryRealDft::Workspace>(length);
      cached_length = length;
    }
    std::vector<double> tapered(length);
    std::vector<Complex> spectrum(length);
    const auto window = segmented.windows.row(k);
    for (std::size_t m = 0; m < num_tapers; ++m) {
      const auto taper = tapers.tapers.row(m);
      for (std::size_t l = 0; l < length; ++l) tapered[l] = window[l] * taper[l];
      dft.transform(tapered, spectrum, *workspace);
      for (std::size_t j = 0; j < length; ++j) out.coeffs(k, j, m) = spectrum[j];
    }
  });
  return out;
}

}  // namespace ssmt
