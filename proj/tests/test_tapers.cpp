#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "ssmt/tapers.hpp"

using ssmt::dpss;

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST(Dpss, MatchesDenseConcentrationEigenvectors) {
  for (std::size_t n : {8u, 16u, 32u}) {
    const double nw = n == 8 ? 2.0 : 2.5;
    const std::size_t m_count = n == 8 ? 3 : 4;
    const auto bank = dpss(n, nw, m_count);
    const auto dense = oracle::dense_slepians(n, nw);
    for (std::size_t m = 0; m < m_count; ++m) {
      const auto row = bank.tapers.row(m);
      const auto col = dense.vectors.col(static_cast<Eigen::Index>(m));
      double sign_dot = 0.0;
      for (std::size_t l = 0; l < n; ++l) sign_dot += row[l] * col(static_cast<Eigen::Index>(l));
      const double sign = sign_dot >= 0.0 ? 1.0 : -1.0;
      for (std::size_t l = 0; l < n; ++l) {
        EXPECT_NEAR(row[l], sign * col(static_cast<Eigen::Index>(l)), 1e-6)
            << "J=" << n << " m=" << m << " l=" << l;
      }
      EXPECT_NEAR(bank.concentrations[m], dense.eigenvalues(static_cast<Eigen::Index>(m)), 1e-9);
    }
  }
}

TEST(Dpss, SingleShortTaperIsSymmetricAndConcentrated) {
  const auto bank = dpss(8, 2.0, 1);
  const auto t = bank.tapers.row(0);
  EXPECT_NEAR(dot(t, t), 1.0, 1e-12);
  for (std::size_t l = 0; l < 8; ++l) EXPECT_NEAR(t[l], t[7 - l], 1e-12);
  EXPECT_GT(bank.concentrations[0], 0.99);
}

TEST(Dpss, AlternatingParity) {
  for (std::size_t n : {9u, 64u, 257u}) {
    const auto bank = dpss(n, 2.0, 2);
    for (std::size_t l = 0; l < n; ++l) {
      EXPECT_NEAR(bank.tapers(0, l), bank.tapers(0, n - 1 - l), 1e-10);
      EXPECT_NEAR(bank.tapers(1, l), -bank.tapers(1, n - 1 - l), 1e-10);
    }
  }
}

TEST(Dpss, LongWindowIsOrthonormal) {
  const auto bank = dpss(1000, 3.0, 5);
  ASSERT_EQ(bank.num_tapers(), 5u);
  for (std::size_t a = 0; a < 5; ++a) {
    for (std::size_t b = 0; b < 5; ++b) {
      EXPECT_NEAR(dot(bank.tapers.row(a), bank.tapers.row(b)), a == b ? 1.0 : 0.0, 1e-8);
    }
  }
}

TEST(Dpss, ConcentrationsDescendInUnitInterval) {
  const auto bank = dpss(600, 4.0, 7);
  for (std::size_t m = 0; m < bank.concentrations.size(); ++m) {
    EXPECT_GT(bank.concentrations[m], 0.0);
    EXPECT_LT(bank.concentrations[m], 1.0);
    if (m > 0) {
      EXPECT_LT(bank.concentrations[m], bank.concentrations[m - 1]);
    }
  }
}

TEST(Dpss, FirstNonzeroSampleIsPositive) {
  const auto bank = dpss(128, 3.0, 5);
  for (std::size_t m = 0; m < 5; ++m) {
    const auto row = bank.tapers.row(m);
    double peak = 0.0;
    for (double v : row) peak = std::max(peak, std::abs(v));
    for (double v : row) {
      if (std::abs(v) > 1e-12 * peak) {
        EXPECT_GT(v, 0.0) << "taper " << m;
        break;
      }
    }
  }
}

TEST(Dpss, DefaultBandwidthFollowsUsableTaperRule) {
  EXPECT_DOUBLE_EQ(ssmt::default_time_half_bandwidth(3), 2.0);
  EXPECT_DOUBLE_EQ(ssmt::default_time_half_bandwidth(5), 3.0);
}

TEST(Dpss, RejectsInvalidRanges) {
  EXPECT_THROW(dpss(16, 0.0, 1), ssmt::ConfigError);
  EXPECT_THROW(dpss(16, 8.0, 1), ssmt::ConfigError);
  EXPECT_THROW(dpss(16, 2.0, 0), ssmt::ConfigError);
  EXPECT_THROW(dpss(16, 2.0, 16), ssmt::ConfigError);
}

TEST(Dpss, ExtraTapersAreAllowed) {
  // Beyond 2NW - 1 tapers the bank is still orthonormal, only poorly concentrated.
  const auto bank = dpss(64, 2.0, 6);
  EXPECT_NEAR(dot(bank.tapers.row(5), bank.tapers.row(5)), 1.0, 1e-10);
  EXPECT_LT(bank.concentrations[5], 0.5);
}

TEST(RectangularTaper, IsFlatUnitNorm) {
  const auto bank = ssmt::rectangular_taper(25);
  for (double v : bank.tapers.row(0)) EXPECT_DOUBLE_EQ(v, 0.2);
}
