#ifndef SSMT_METRICS_HPP
#define SSMT_METRICS_HPP

#include <vector>

#include "ssmt/spectrogram.hpp"

namespace ssmt {

struct DivergenceReport {
  double total = 0.0;               // mean over every used (k, j) bin
  std::vector<double> per_window;   // mean over used bins of each window
  std::vector<bool> bins_used;      // frequency mask, length J'
};

/// Bins with 0 < f <= fs/2: the one-sided grid without DC.
std::vector<bool> default_bin_mask(const Spectrogram& spec);

/// Itakura-Saito divergence of an estimate from the truth, per bin
///   d(P, P_hat) = P / P_hat - ln(P / P_hat) - 1,  P = truth, P_hat = estimate,
/// averaged over windows and masked bins. Both inputs must be linear power on
/// the same grid and strictly positive on the used bins.
DivergenceReport itakura_saito(const Spectrogram& estimate, const Spectrogram& truth,
                               const std::vector<bool>& bins_used);
DivergenceReport itakura_saito(const Spectrogram& estimate, const Spectrogram& truth);

}  // namespace ssmt

#endif  // SSMT_METRICS_HPP
