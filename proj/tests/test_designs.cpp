#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smoothqv/designs.hpp"

using namespace smoothqv;

namespace {

bool is_identity_or_reversal(const std::vector<std::size_t>& recovered, const std::vector<std::size_t>& truth) {
  return std::equal(recovered.begin(), recovered.end(), truth.begin()) ||
         std::equal(recovered.begin(), recovered.end(), truth.rbegin());
}

// Shuffles points; returns the shuffled points and, for each true position, its shuffled index.
std::pair<std::vector<Point>, std::vector<std::size_t>> shuffle_points(const std::vector<Point>& pts,
                                                                        std::mt19937_64& rng) {
  std::vector<std::size_t> perm(pts.size());
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<Point> shuffled(pts.size());
  std::vector<std::size_t> where(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    shuffled[k] = pts[perm[k]];
    where[perm[k]] = k;
  }
  return {shuffled, where};
}

}  // namespace

TEST(LineSites, Examples) {
  const auto id = line_sites([](double s) { return s; }, 5);
  EXPECT_EQ(id.sites(), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
  const auto exp1 = line_sites(experiment_designs::line_map, 3);
  ASSERT_EQ(exp1.size(), 3u);
  EXPECT_EQ(exp1[0], 0.0);
  EXPECT_DOUBLE_EQ(exp1[1], 0.375);
  EXPECT_EQ(exp1[2], 1.0);
  EXPECT_THROW(line_sites([](double s) { return s * s; }, 4), DesignError);
  EXPECT_THROW(line_sites([](double s) { return 1.0 - s; }, 4), DesignError);
  EXPECT_THROW(line_sites([](double s) { return 0.5 * s; }, 4), DesignError);
}

TEST(LineSites, GapRatioBoundedBySlopeRatio) {
  for (std::size_t n : {10u, 50u, 200u, 1000u}) {
    const auto d = experiment_designs::line(n);
    double lo = 1e300, hi = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const double g = d[i + 1] - d[i];
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    // phi'(s) = s + 1/2 ranges over [0.5, 1.5]
    EXPECT_LE(hi / lo, 3.0 * 1.1) << n;
  }
}

TEST(LineTransect, RejectsUnorderedSites) {
  EXPECT_THROW(LineTransect(std::vector<double>{0.0, 0.5, 0.5, 1.0}), DesignError);
  EXPECT_THROW(LineTransect(std::vector<double>{0.0}), DesignError);
}

TEST(CurveSites, StraightLineReducesToTransect) {
  const auto d = curve_sites([](double t) { return Point{t, 0.0}; }, [](double s) { return s; }, 1.0, 3);
  EXPECT_EQ(d[0], (Point{0.0, 0.0}));
  EXPECT_EQ(d[1], (Point{0.5, 0.0}));
  EXPECT_EQ(d[2], (Point{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(d.chord(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(d.chord(1, 0), 0.5);
}

TEST(CurveSites, StraightLineChordsEqualParameterGaps) {
  const auto phi = [](double s) { return s * (s + 1.0) / 2.0; };
  const auto d = curve_sites([](double t) { return Point{0.6 * t, 0.8 * t}; }, phi, 1.0, 50);
  for (std::size_t i = 0; i < 50; ++i) {
    for (std::size_t k = 1; k <= 4 && i + k < 50; ++k) {
      const double ti = phi(static_cast<double>(i) / 49.0);
      const double tj = phi(static_cast<double>(i + k) / 49.0);
      EXPECT_NEAR(d.chord(i, i + k), tj - ti, 1e-12);
    }
  }
}

TEST(CurveSites, ArcChordIdentity) {
  const std::size_t n = 200;
  const auto d = experiment_designs::arc(n);
  const double L = experiment_designs::kArcLength;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 1; k <= 4 && i + k < n; ++k) {
      const double a = experiment_designs::arc_map(L * static_cast<double>(i) / (n - 1.0));
      const double b = experiment_designs::arc_map(L * static_cast<double>(i + k) / (n - 1.0));
      EXPECT_NEAR(d.chord(i, i + k), 2.0 * std::sin(std::abs(b - a) / 2.0), 1e-14);
    }
  }
  EXPECT_THROW(d.chord(0, 5), DomainError);
}

TEST(CurveSites, ChordAdditivityOnArc) {
  const std::size_t n = 200;
  const auto d = experiment_designs::arc(n);
  for (std::size_t i = 0; i + 4 < n; ++i) {
    for (std::size_t k1 = 0; k1 <= 4; ++k1) {
      for (std::size_t k2 = k1 + 1; k2 <= 4; ++k2) {
        const double lhs = d.chord(i + k1, i + k2);
        const double rhs = d.chord(i, i + k2) - d.chord(i, i + k1);
        EXPECT_LE(std::abs(lhs - rhs), 1e-4);
      }
    }
  }
}

TEST(CurveSites, RejectsCoincidentPoints) {
  EXPECT_THROW(CurveDesign(std::vector<Point>{{0, 0}, {1, 0}, {1, 0}}), DesignError);
  EXPECT_THROW(curve_sites([](double) { return Point{0.0, 0.0}; }, [](double s) { return s; }, 1.0, 4), DesignError);
}

TEST(LatticeSites, Examples) {
  const auto id = lattice_sites([](double u, double v) { return Point{u, v}; }, 2);
  EXPECT_EQ(id.at(0, 0), (Point{0.5, 0.5}));
  EXPECT_EQ(id.at(0, 1), (Point{0.5, 1.0}));
  EXPECT_EQ(id.at(1, 0), (Point{1.0, 0.5}));
  EXPECT_EQ(id.at(1, 1), (Point{1.0, 1.0}));
  const auto exp3 = experiment_designs::lattice(40);
  EXPECT_EQ(exp3.size(), 1600u);
  const auto w = std::complex<double>(0.025, 0.05) * (std::complex<double>(0.025, 0.05) + 1.0) / 3.0;
  EXPECT_NEAR(exp3.at(0, 1).x, w.real(), 1e-15);
  EXPECT_NEAR(exp3.at(0, 1).y, w.imag(), 1e-15);
}

TEST(LatticeSites, IdentitySpacing) {
  const std::size_t n = 25;
  const auto id = lattice_sites([](double u, double v) { return Point{u, v}; }, n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      EXPECT_NEAR(distance(id.at(i + 1, j), id.at(i, j)), 1.0 / n, 1e-15);
    }
  }
}

TEST(LatticeSites, BiLipschitzOnExperimentMap) {
  const std::size_t n = 40;
  const auto d = experiment_designs::lattice(n);
  double lo = 1e300, hi = 0.0;
  for (std::size_t a = 0; a < d.size(); a += 7) {
    for (std::size_t b = a + 1; b < d.size(); b += 5) {
      const double di = std::hypot(double(a / n) - double(b / n), double(a % n) - double(b % n)) / n;
      const double r = distance(d.points()[a], d.points()[b]) / di;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  // |phi~'(z)| = |2z + 1| / 3 lies in [1/3, sqrt(13)/3] on the unit square
  EXPECT_GE(lo, 1.0 / 3.0 - 1e-9);
  EXPECT_LE(hi, std::sqrt(13.0) / 3.0 + 1e-9);
}

TEST(LatticeSites, RejectsDuplicates) {
  EXPECT_THROW(lattice_sites([](double, double v) { return Point{0.0, v}; }, 3), DesignError);
  EXPECT_THROW(LatticeDesign(2, std::vector<Point>{{0, 0}, {0, 1}, {1, 0}}), DesignError);
}

TEST(RecoverOrder, ShuffledStraightLine) {
  std::mt19937_64 rng(7);
  const std::vector<Point> pts{{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0}, {0.3, 0.0}};
  for (int trial = 0; trial < 20; ++trial) {
    const auto [shuffled, where] = shuffle_points(pts, rng);
    EXPECT_TRUE(is_identity_or_reversal(recover_order(shuffled), where));
  }
}

TEST(RecoverOrder, ShuffledExperimentArc) {
  std::mt19937_64 rng(11);
  const auto d = experiment_designs::arc(50);
  const auto [shuffled, where] = shuffle_points(d.points(), rng);
  EXPECT_TRUE(is_identity_or_reversal(recover_order(shuffled), where));
}

TEST(RecoverOrder, IdentityOrReversalOnGeneratedCurves) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {10u, 25u, 60u, 200u}) {
    for (int trial = 0; trial < 5; ++trial) {
      const auto pts = oracle::random_curve_points(rng, n);
      const auto [shuffled, where] = shuffle_points(pts, rng);
      EXPECT_TRUE(is_identity_or_reversal(recover_order(shuffled), where)) << n;
    }
  }
}

TEST(RecoverOrder, OutlierIsAmbiguous) {
  const std::vector<Point> pts{{0.0, 0.0}, {0.1, 0.0}, {0.2, 0.0}, {0.3, 0.0}, {0.35, 5.0}};
  EXPECT_THROW(recover_order(pts), OrderingAmbiguousError);
}

TEST(RecoverOrder, RejectsDuplicates) {
  const std::vector<Point> pts{{0.0, 0.0}, {0.1, 0.0}, {0.1, 0.0}};
  EXPECT_THROW(recover_order(pts), DesignError);
}

TEST(LatticeSubsetCurve, Examples) {
  const auto id = lattice_sites([](double u, double v) { return Point{u, v}; }, 5);
  const auto c = lattice_subset_curve(id);
  ASSERT_EQ(c.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_DOUBLE_EQ(c[i].x, (i + 1) / 5.0);
    EXPECT_DOUBLE_EQ(c[i].y, 3.0 / 5.0);
  }
  EXPECT_THROW(lattice_subset_curve(lattice_sites([](double u, double v) { return Point{u, v}; }, 4)), DesignError);
}

TEST(LatticeSubsetCurve, ExperimentMapChordsScaleLikeOneOverN) {
  const std::size_t n = 40;
  const auto c = lattice_subset_curve(experiment_designs::lattice(n));
  ASSERT_EQ(c.size(), n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double d = c.chord(i, i + 1) * n;
    EXPECT_GE(d, 1.0 / 3.0 - 1e-9);
    EXPECT_LE(d, std::sqrt(13.0) / 3.0 + 1e-9);
  }
}
