#ifndef SSMT_TAPERS_HPP
#define SSMT_TAPERS_HPP

#include <cstddef>
#include <vector>

#include "ssmt/types.hpp"

namespace ssmt {

/// M orthonormal Slepian tapers of length J, best-concentrated first.
struct TaperBank {
  Matrix<double> tapers;             // M x J
  std::vector<double> concentrations;  // fraction of energy in [-W, W]
  double time_half_bandwidth = 0.0;  // NW

  std::size_t num_tapers() const noexcept { return tapers.rows(); }
  std::size_t length() const noexcept { return tapers.cols(); }
};

/// Usable-taper rule M = 2 NW - 1 solved for NW.
double default_time_half_bandwidth(std::size_t num_tapers);

/// Discrete prolate spheroidal sequences.
///
/// The tapers are the leading eigenvectors of the commuting symmetric
/// tridiagonal matrix (diagonal ((J-1-2l)/2)^2 cos(2 pi W), off-diagonal
/// l (J-l) / 2, W = NW / J), found by Sturm-sequence bisection and inverse
/// iteration in O(J) memory. Each taper is normalized to unit energy with its
/// first nonzero sample positive. Concentrations are the Rayleigh quotients of
/// the tapers against the sinc (Toeplitz) concentration operator.
///
/// Requires 0 < NW < J/2 and 1 <= M < J. Asking for more than floor(2 NW) - 1
/// tapers is allowed but logs a warning, since the extra tapers leak badly.
TaperBank dpss(std::size_t window_length, double time_half_bandwidth,
               std::size_t num_tapers);

/// Single rectangular taper 1/sqrt(J), concentration undefined (reported as 1).
TaperBank rectangular_taper(std::size_t window_length);

}  // namespace ssmt

#endif  // SSMT_TAPERS_HPP
