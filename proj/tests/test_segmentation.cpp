#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "ssmt/segmentation.hpp"
#include "ssmt/tapers.hpp"

using ssmt::Complex;
using ssmt::TimeSeries;

namespace {

std::vector<double> ramp(std::size_t n) {
  std::vector<double> v(n);
  std::iota(v.begin(), v.end(), 1.0);
  return v;
}

std::vector<double> gaussian(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<double> v(n);
  for (double& x : v) x = normal(rng);
  return v;
}

}  // namespace

TEST(TimeSeries, ValidatesInput) {
  EXPECT_THROW(TimeSeries({}, 10.0), ssmt::DataError);
  EXPECT_THROW(TimeSeries({1.0}, 0.0), ssmt::ConfigError);
  EXPECT_THROW(TimeSeries({1.0, std::nan("")}, 1.0), ssmt::DataError);
  EXPECT_THROW(TimeSeries({1.0, INFINITY}, 1.0), ssmt::DataError);
}

TEST(Segment, NonOverlappingWindows) {
  const auto seg = ssmt::segment(TimeSeries(ramp(12), 1.0), 4, 4);
  ASSERT_EQ(seg.num_windows(), 3u);
  // Window 2 (1-based) holds samples 5..8.
  EXPECT_EQ(std::vector<double>(seg.windows.row(1).begin(), seg.windows.row(1).end()),
            (std::vector<double>{5, 6, 7, 8}));
}

TEST(Segment, HalfOverlap) {
  const auto seg = ssmt::segment(TimeSeries(ramp(12), 1.0), 4, 2);
  EXPECT_EQ(seg.num_windows(), 5u);
  EXPECT_DOUBLE_EQ(seg.windows(4, 3), 12.0);
}

TEST(Segment, TrailingSamplesDropped) {
  const auto seg = ssmt::segment(TimeSeries(ramp(11), 1.0), 4, 4);
  EXPECT_EQ(seg.num_windows(), 2u);
}

TEST(Segment, EegWindowing) {
  const auto seg = ssmt::segment(TimeSeries(gaussian(250 * 40, 1), 250.0), 1000, 1000);
  EXPECT_EQ(seg.num_windows(), 10u);
  EXPECT_DOUBLE_EQ(seg.window_length / seg.sample_rate_hz, 4.0);
}

TEST(Segment, Errors) {
  const TimeSeries short_series(ramp(3), 1.0);
  try {
    ssmt::segment(short_series, 4, 4);
    FAIL() << "expected DataError";
  } catch (const ssmt::DataError& e) {
    EXPECT_NE(std::string(e.what()).find("insufficient data"), std::string::npos);
  }
  EXPECT_THROW(ssmt::segment(TimeSeries(ramp(8), 1.0), 4, 0), ssmt::ConfigError);
  EXPECT_THROW(ssmt::segment(TimeSeries(ramp(8), 1.0), 4, 5), ssmt::ConfigError);
}

TEST(Segment, Demean) {
  const auto seg = ssmt::segment(TimeSeries(ramp(8), 1.0), 4, 4, true);
  for (std::size_t k = 0; k < 2; ++k) {
    double s = 0.0;
    for (double v : seg.windows.row(k)) s += v;
    EXPECT_NEAR(s, 0.0, 1e-12);
  }
}

TEST(EigenCoefficients, MatchesDftByDefinition) {
  const std::size_t n = 8;
  const auto samples = gaussian(3 * n, 7);
  const auto seg = ssmt::segment(TimeSeries(samples, 1.0), n, n);
  const auto bank = ssmt::dpss(n, 2.0, 2);
  const auto obs = ssmt::eigen_coefficients(seg, bank, ssmt::Backend::serial);
  for (std::size_t k = 0; k < 3; ++k) {
    for (std::size_t m = 0; m < 2; ++m) {
      std::vector<double> tapered(n);
      for (std::size_t l = 0; l < n; ++l) tapered[l] = seg.windows(k, l) * bank.tapers(m, l);
      const auto expected = oracle::dft(tapered);
      for (std::size_t j = 0; j < n; ++j) {
        EXPECT_NEAR(std::abs(obs.coeffs(k, j, m) - expected[j]), 0.0, 1e-12);
      }
    }
  }
}

TEST(EigenCoefficients, DcBinOfConstantWindow) {
  const std::size_t n = 16;
  const auto bank = ssmt::dpss(n, 2.0, 1);
  const auto obs = ssmt::eigen_coefficients(
      ssmt::segment(TimeSeries(std::vector<double>(n, 1.0), 1.0), n, n), bank);
  double sum = 0.0;
  for (double v : bank.tapers.row(0)) sum += v;
  EXPECT_NEAR(obs.coeffs(0, 0, 0).real(), sum / 4.0, 1e-12);
  EXPECT_EQ(obs.coeffs(0, 0, 0).imag(), 0.0);
}

TEST(EigenCoefficients, RectangularTaperConcentratesBinCenteredCosine) {
  const std::size_t n = 32;
  const std::size_t j0 = 5;
  std::vector<double> x(n);
  for (std::size_t l = 0; l < n; ++l) {
    x[l] = std::cos(2.0 * std::numbers::pi * static_cast<double>(j0 * l) / static_cast<double>(n));
  }
  const auto obs = ssmt::eigen_coefficients(ssmt::segment(TimeSeries(x, 1.0), n, n),
                                            ssmt::rectangular_taper(n));
  for (std::size_t j = 0; j < n; ++j) {
    const double p = std::norm(obs.coeffs(0, j, 0));
    if (j == j0 || j == n - j0) {
      EXPECT_NEAR(p, 0.25, 1e-12);  // energy 1/4 per side after 1/sqrt(J) taper and DFT
    } else {
      EXPECT_NEAR(p, 0.0, 1e-20);
    }
  }
}

TEST(EigenCoefficients, ParsevalAndConjugateSymmetry) {
  for (std::size_t n : {7u, 64u, 600u}) {
    const auto seg = ssmt::segment(TimeSeries(gaussian(4 * n, n), 10.0), n, n);
    const auto bank = ssmt::dpss(n, 2.0, 3);
    const auto obs = ssmt::eigen_coefficients(seg, bank);
    for (std::size_t k = 0; k < seg.num_windows(); ++k) {
      for (std::size_t m = 0; m < 3; ++m) {
        double time_energy = 0.0;
        double freq_energy = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          time_energy += std::pow(seg.windows(k, l) * bank.tapers(m, l), 2);
          freq_energy += std::norm(obs.coeffs(k, l, m));
        }
        EXPECT_NEAR(freq_energy, time_energy, 1e-9 * time_energy);
        for (std::size_t j = 1; j < n; ++j) {
          EXPECT_NEAR(std::abs(obs.coeffs(k, j, m) - std::conj(obs.coeffs(k, n - j, m))), 0.0,
                      1e-12);
        }
      }
    }
  }
}

TEST(EigenCoefficients, Linearity) {
  const std::size_t n = 50;
  const auto x = gaussian(2 * n, 3);
  const auto y = gaussian(2 * n, 4);
  std::vector<double> z(2 * n);
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = 2.0 * x[i] - 0.5 * y[i];
  const auto bank = ssmt::dpss(n, 2.0, 3);
  auto coeffs = [&](const std::vector<double>& s) {
    return ssmt::eigen_coefficients(ssmt::segment(TimeSeries(s, 1.0), n, n), bank).coeffs;
  };
  const auto cx = coeffs(x), cy = coeffs(y), cz = coeffs(z);
  for (std::size_t i = 0; i < cz.size(); ++i) {
    EXPECT_NEAR(std::abs(cz.data()[i] - (2.0 * cx.data()[i] - 0.5 * cy.data()[i])), 0.0, 1e-12);
  }
}

TEST(EigenCoefficients, AxesAndShapeChecks) {
  const auto seg = ssmt::segment(TimeSeries(gaussian(100, 1), 20.0), 10, 5);
  const auto obs = ssmt::eigen_coefficients(seg, ssmt::dpss(10, 2.0, 2));
  EXPECT_DOUBLE_EQ(obs.frequencies_hz[1], 2.0);
  EXPECT_DOUBLE_EQ(obs.window_times_s[0], 0.25);
  EXPECT_DOUBLE_EQ(obs.window_times_s[1], 0.5);
  EXPECT_THROW(ssmt::eigen_coefficients(seg, ssmt::dpss(12, 2.0, 2)), ssmt::ConfigError);
}

TEST(EigenCoefficients, BackendsAgreeExactly) {
  const auto seg = ssmt::segment(TimeSeries(gaussian(6000, 9), 100.0), 600, 300);
  const auto bank = ssmt::dpss(600, 2.0, 3);
  EXPECT_EQ(ssmt::eigen_coefficients(seg, bank, ssmt::Backend::serial).coeffs,
            ssmt::eigen_coefficients(seg, bank, ssmt::Backend::openmp).coeffs);
}
