#include "ssmt/metrics.hpp"

#include <cmath>
#include <string>

namespace ssmt {

std::vector<bool> default_bin_mask(const Spectrogram& spec) {
  const double nyquist = 0.5 * spec.sample_rate_hz;
  std::vector<bool> mask(spec.num_freqs());
  for (std::size_t j = 0; j < mask.size(); ++j) {
    const double f = spec.frequencies_hz[j];
    mask[j] = f > 0.0 && f <= nyquist * (1.0 + 1e-12);
  }
  return mask;
}

DivergenceReport itakura_saito(const Spectrogram& estimate, const Spectrogram& truth,
                               const std::vector<bool>& bins_used) {
  if (estimate.scale != Scale::linear || truth.scale != Scale::linear) {
    throw ConfigError("itakura_saito: spectrograms must be on the linear scale");
  }
  if (estimate.num_windows() != truth.num_windows() ||
      estimate.num_freqs() != truth.num_freqs()) {
    throw ConfigError("itakura_saito: estimate is " + std::to_string(estimate.num_windows()) +
                      "x" + std::to_string(estimate.num_freqs()) + " but truth is " +
                      std::to_string(truth.num_windows()) + "x" +
                      std::to_string(truth.num_freqs()));
  }
  if (bins_used.size() != truth.num_freqs()) {
    throw ConfigError("itakura_saito: mask length does not match the frequency grid");
  }
  std::size_t used = 0;
  for (bool b : bins_used) used += b ? 1 : 0;
  if (used == 0 || truth.num_windows() == 0) {
    throw ConfigError("itakura_saito: no bins selected");
  }

  DivergenceReport report;
  report.bins_used = bins_used;
  report.per_window.resize(truth.num_windows());
  double total = 0.0;
  for (std::size_t k = 0; k < truth.num_windows(); ++k) {
    double window_sum = 0.0;
    for (std::size_t j = 0; j < truth.num_freqs(); ++j) {
      if (!bins_used[j]) continue;
      const double p = truth.power(k, j);
      const double p_hat = estimate.power(k, j);
      if (!(p > 0.0) || !(p_hat > 0.0) || !std::isfinite(p) || !std::isfinite(p_hat)) {
        throw DataError("itakura_saito: nonpositive power at window " + std::to_string(k) +
                        ", bin " + std::to_string(j));
      }
      const double ratio = p / p_hat;
      window_sum += ratio - std::log(ratio) - 1.0;
    }
    report.per_window[k] = window_sum / static_cast<double>(used);
    total += window_sum;
  }
  report.total = total / static_cast<double>(used * truth.num_windows());
  return report;
}

DivergenceReport itakura_saito(const Spectrogram& estimate, const Spectrogram& truth) {
  return itakura_saito(estimate, truth, default_bin_mask(truth));
}

}  // namespace ssmt
