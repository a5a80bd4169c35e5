#include "ssmt/tapers.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <numbers>

namespace ssmt {
namespace {

struct Tridiagonal {
  std::vector<double> diag;  // n
  std::vector<double> off;   // n - 1, off[i] couples i and i + 1
};

Tridiagonal dpss_tridiagonal(std::size_t n, double bandwidth) {
  Tridiagonal t;
  t.diag.resize(n);
  t.off.resize(n > 0 ? n - 1 : 0);
  const double cos_w = std::cos(2.0 * std::numbers::pi * bandwidth);
  const double nd = static_cast<double>(n);
  for (std::size_t l = 0; l < n; ++l) {
    const double centered = (nd - 1.0 - 2.0 * static_cast<double>(l)) / 2.0;
    t.diag[l] = centered * centered * cos_w;
  }
  for (std::size_t l = 1; l < n; ++l) {
    const double ld = static_cast<double>(l);
    t.off[l - 1] = ld * (nd - ld) / 2.0;
  }
  return t;
}

// Number of eigenvalues strictly below x (Sturm sequence count).
std::size_t count_below(const Tridiagonal& t, double x, double pivot_floor) {
  std::size_t count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < t.diag.size(); ++i) {
    const double coupling = i == 0 ? 0.0 : t.off[i - 1] * t.off[i - 1] / q;
    q = t.diag[i] - x - coupling;
    if (std::abs(q) < pivot_floor) q = -pivot_floor;
    if (q < 0.0) ++count;
  }
  return count;
}

// The eigenvalue with `index` smaller eigenvalues below it (0-based ascending).
double bisect_eigenvalue(const Tridiagonal& t, std::size_t index, double lower,
                         double upper, double pivot_floor) {
  for (int iter = 0; iter < 256; ++iter) {
    const double mid = 0.5 * (lower + upper);
    if (mid <= lower || mid >= upper) break;
    if (count_below(t, mid, pivot_floor) > index) {
      upper = mid;
    } else {
      lower = mid;
    }
  }
  return 0.5 * (lower + upper);
}

// Solves (T - shift I) x = rhs in place with partial pivoting.
void shifted_solve(const Tridiagonal& t, double shift, double pivot_floor,
                   std::vector<double>& rhs) {
  const std::size_t n = t.diag.size();
  std::vector<double> d(n), dl(t.off), du(t.off), du2(n, 0.0);
  std::vector<bool> swapped(n, false);
  for (std::size_t i = 0; i < n; ++i) d[i] = t.diag[i] - shift;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (std::abs(d[i]) >= std::abs(dl[i])) {
      if (d[i] == 0.0) d[i] = pivot_floor;
      const double fact = dl[i] / d[i];
      dl[i] = fact;
      d[i + 1] -= fact * du[i];
    } else {
      const double fact = d[i] / dl[i];
      d[i] = dl[i];
      dl[i] = fact;
      const double temp = du[i];
      du[i] = d[i + 1];
      d[i + 1] = temp - fact * d[i + 1];
      if (i + 2 < n) {
        du2[i] = du[i + 1];
        du[i + 1] = -fact * du[i + 1];
      }
      swapped[i] = true;
    }
  }
  if (d[n - 1] == 0.0) d[n - 1] = pivot_floor;

  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!swapped[i]) {
      rhs[i + 1] -= dl[i] * rhs[i];
    } else {
      const double temp = rhs[i];
      rhs[i] = rhs[i + 1];
      rhs[i + 1] = temp - dl[i] * rhs[i];
    }
  }
  rhs[n - 1] /= d[n - 1];
  if (n > 1) rhs[n - 2] = (rhs[n - 2] - du[n - 2] * rhs[n - 1]) / d[n - 2];
  for (std::size_t i = n; i-- > 2;) {
    const std::size_t r = i - 2;
    rhs[r] = (rhs[r] - du[r] * rhs[r + 1] - du2[r] * rhs[r + 2]) / d[r];
  }
}

void normalize(std::vector<double>& v) {
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
}

double concentration(std::span<const double> taper, double bandwidth) {
  const std::size_t n = taper.size();
  double total = 0.0;
  for (std::size_t lag = 0; lag < n; ++lag) {
    double autocorr = 0.0;
    for (std::size_t l = 0; l + lag < n; ++l) autocorr += taper[l] * taper[l + lag];
    if (lag == 0) {
      total += 2.0 * bandwidth * autocorr;
    } else {
      const double lagd = static_cast<double>(lag);
      total += 2.0 * std::sin(2.0 * std::numbers::pi * bandwidth * lagd) /
               (std::numbers::pi * lagd) * autocorr;
    }
  }
  return total;
}

}  // namespace

double default_time_half_bandwidth(std::size_t num_tapers) {
  return (static_cast<double>(num_tapers) + 1.0) / 2.0;
}

TaperBank dpss(std::size_t window_length, double time_half_bandwidth,
               std::size_t num_tapers) {
  const std::size_t n = window_length;
  if (n < 2) throw ConfigError("dpss: window length must be at least 2");
  if (!(time_half_bandwidth > 0.0) ||
      !(time_half_bandwidth < static_cast<double>(n) / 2.0)) {
    throw ConfigError("dpss: time-half-bandwidth NW must satisfy 0 < NW < J/2");
  }
  if (num_tapers < 1 || num_tapers >= n) {
    throw ConfigError("dpss: number of tapers must satisfy 1 <= M < J");
  }
  const auto recommended =
      static_cast<long>(std::floor(2.0 * time_half_bandwidth)) - 1;
  if (static_cast<long>(num_tapers) > recommended) {
    std::clog << "dpss (WARNING): " << num_tapers << " tapers requested with NW="
              << time_half_bandwidth << "; at most " << std::max(recommended, 0L)
              << " are well concentrated\n";
  }

  const double bandwidth = time_half_bandwidth / static_cast<double>(n);
  const Tridiagonal t = dpss_tridiagonal(n, bandwidth);

  double lower = std::numeric_limits<double>::max();
  double upper = std::numeric_limits<double>::lowest();
  for (std::size_t i = 0; i < n; ++i) {
    const double radius = (i > 0 ? std::abs(t.off[i - 1]) : 0.0) +
                          (i + 1 < n ? std::abs(t.off[i]) : 0.0);
    lower = std::min(lower, t.diag[i] - radius);
    upper = std::max(upper, t.diag[i] + radius);
  }
  const double scale = std::max(std::abs(lower), std::abs(upper));
  const double pivot_floor = std::numeric_limits<double>::epsilon() * scale;

  TaperBank bank;
  bank.time_half_bandwidth = time_half_bandwidth;
  bank.tapers = Matrix<double>(num_tapers, n);
  bank.concentrations.resize(num_tapers);

  for (std::size_t m = 0; m < num_tapers; ++m) {
    const double eigenvalue = bisect_eigenvalue(t, n - 1 - m, lower, upper, pivot_floor);

    // Deterministic start vector with both even and odd content.
    std::vector<double> v(n);
    for (std::size_t l = 0; l < n; ++l) {
      v[l] = 1.0 + 0.5 * std::sin(1.3 * static_cast<double>(l) + 0.7);
    }
    for (int iter = 0; iter < 4; ++iter) {
      shifted_solve(t, eigenvalue, pivot_floor, v);
      for (std::size_t prev = 0; prev < m; ++prev) {
        const auto other = bank.tapers.row(prev);
        double dot = 0.0;
        for (std::size_t l = 0; l < n; ++l) dot += v[l] * other[l];
        for (std::size_t l = 0; l < n; ++l) v[l] -= dot * other[l];
      }
      normalize(v);
    }

    const double peak = std::abs(*std::max_element(
        v.begin(), v.end(), [](double a, double b) { return std::abs(a) < std::abs(b); }));
    const auto first = std::find_if(v.begin(), v.end(), [&](double x) {
      return std::abs(x) > 1e-12 * peak;
    });
    if (first != v.end() && *first < 0.0) {
      for (double& x : v) x = -x;
    }
    std::copy(v.begin(), v.end(), bank.tapers.row(m).begin());
    bank.concentrations[m] = concentration(bank.tapers.row(m), bandwidth);
  }
  return bank;
}

TaperBank rectangular_taper(std::size_t window_length) {
  if (window_length < 1) throw ConfigError("rectangular_taper: empty window");
  TaperBank bank;
  bank.tapers = Matrix<double>(1, window_length,
                               1.0 / std::sqrt(static_cast<double>(window_length)));
  bank.concentrations = {1.0};
  bank.time_half_bandwidth = 0.0;
  return bank;
}

}  // namespace ssmt
