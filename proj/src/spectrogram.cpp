#include "ssmt/spectrogram.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssmt {
namespace {

Spectrogram mean_power(const Tensor3<Complex>& values, const EigenCoefficients& grid) {
  const std::size_t num_windows = values.windows();
  const std::size_t num_freqs = values.freqs();
  const std::size_t num_tapers = values.tapers();
  if (num_windows == 0 || num_freqs == 0 || num_tapers == 0) {
    throw ConfigError("spectrogram: empty input");
  }
  if (grid.frequencies_hz.size() != num_freqs || grid.window_times_s.size() != num_windows) {
    throw ConfigError("spectrogram: axes do not match the coefficient tensor");
  }
  Spectrogram spec;
  spec.power = Matrix<double>(num_windows, num_freqs);
  spec.frequencies_hz = grid.frequencies_hz;
  spec.window_times_s = grid.window_times_s;
  spec.sample_rate_hz = grid.sample_rate_hz;
  spec.scale = Scale::linear;
  const double inv_tapers = 1.0 / static_cast<double>(num_tapers);
  for (std::size_t k = 0; k < num_windows; ++k) {
    for (std::size_t j = 0; j < num_freqs; ++j) {
      double total = 0.0;
      for (std::size_t m = 0; m < num_tapers; ++m) total += std::norm(values(k, j, m));
      spec.power(k, j) = total * inv_tapers;
    }
  }
  return spec;
}

}  // namespace

Scale parse_scale(std::string_view name) {
  if (name == "linear") return Scale::linear;
  if (name == "dB" || name == "db") return Scale::dB;
  throw ConfigError("unknown scale '" + std::string(name) + "' (expected linear or dB)");
}

std::string_view to_string(Scale scale) { return scale == Scale::dB ? "dB" : "linear"; }

Spectrogram ssmt_spectrogram(const FilterTrace& trace, const EigenCoefficients& grid) {
  return mean_power(trace.means, grid);
}

Spectrogram mt_spectrogram(const EigenCoefficients& obs) { return mean_power(obs.coeffs, obs); }

Spectrogram to_db(const Spectrogram& spec) {
  if (spec.scale == Scale::dB) return spec;
  Spectrogram out = spec;
  for (double& p : out.power.data()) p = 10.0 * std::log10(std::max(p, kDbFloor));
  out.scale = Scale::dB;
  return out;
}

Spectrogram one_sided(const Spectrogram& spec) {
  const std::size_t full = spec.num_freqs();
  const double nyquist = 0.5 * spec.sample_rate_hz;
  if (full == 0 || spec.frequencies_hz.back() <= nyquist * (1.0 + 1e-12)) return spec;
  const std::size_t kept = full / 2 + 1;
  Spectrogram out;
  out.power = Matrix<double>(spec.num_windows(), kept);
  for (std::size_t k = 0; k < spec.num_windows(); ++k) {
    const auto src = spec.power.row(k);
    std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(kept),
              out.power.row(k).begin());
  }
  out.frequencies_hz.assign(spec.frequencies_hz.begin(),
                            spec.frequencies_hz.begin() + static_cast<std::ptrdiff_t>(kept));
  out.window_times_s = spec.window_times_s;
  out.sample_rate_hz = spec.sample_rate_hz;
  out.scale = spec.scale;
  return out;
}

}  // namespace ssmt
