#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smoothqv/covariance.hpp"
#include "smoothqv/designs.hpp"
#include "smoothqv/special.hpp"

using namespace smoothqv;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// mpmath besselk at 30 digits
struct BesselCase {
  double nu, x, value;
};
const BesselCase kBesselTable[] = {
    {0.0, 1.0, 0.42102443824070833},       {0.5, 1.0, 0.46106850444789456},
    {1.5, 2.0, 0.17990665795209217},       {2.3, 0.7, 5.975961761210581},
    {7.25, 13.5, 2.930124464339492e-6},    {0.1, 1e-6, 19.043892581433072},
    {14.6, 45.0, 5.447880441802528e-20},
};

}  // namespace

TEST(BesselK, MatchesHighPrecisionTable) {
  for (const auto& c : kBesselTable) {
    EXPECT_LT(rel(bessel_k(c.nu, c.x), c.value), 1e-12) << "nu=" << c.nu << " x=" << c.x;
  }
}

TEST(BesselK, HalfIntegerClosedForms) {
  EXPECT_NEAR(bessel_k(0.5, 1.0), std::sqrt(std::numbers::pi / 2.0) * std::exp(-1.0), 1e-15);
  const double k32 = std::sqrt(std::numbers::pi / 4.0) * std::exp(-2.0) * 1.5;
  EXPECT_LT(rel(bessel_k(1.5, 2.0), k32), 1e-13);
  EXPECT_NEAR(bessel_k(1.5, 2.0), 0.1799066580, 1e-10);
  EXPECT_NEAR(bessel_k(0.0, 1.0), 0.42102444, 1e-8);
}

TEST(BesselK, AgreesWithQuadratureOracleAcrossRange) {
  const double orders[] = {0.0, 0.1, 0.25, 0.5, 0.9, 1.0, 1.5, 2.0, 2.3, 2.5, 3.7, 5.0, 7.25, 10.0, 14.6, 15.0};
  const double args[] = {1e-8, 1e-4, 0.01, 0.1, 0.5, 1.0, 1.9, 2.0, 2.1, 5.0, 10.0, 25.0, 50.0};
  for (double nu : orders) {
    for (double x : args) {
      const double ref = oracle::bessel_k_quadrature(nu, x);
      EXPECT_LT(rel(bessel_k(nu, x), ref), 1e-10) << "nu=" << nu << " x=" << x;
    }
  }
}

TEST(BesselK, AgreesWithStandardLibrary) {
  for (double nu : {0.0, 0.3, 1.0, 2.5, 4.2}) {
    for (double x : {0.05, 0.7, 1.99, 2.01, 8.0, 30.0}) {
      EXPECT_LT(rel(bessel_k(nu, x), std::cyl_bessel_k(nu, x)), 1e-9) << nu << " " << x;
    }
  }
}

TEST(BesselK, ExtendedPrecisionAgreesWithDouble) {
  for (double nu : {0.2, 1.5, 2.5, 9.9}) {
    for (double x : {0.01, 1.0, 3.0, 20.0}) {
      const long double wide = bessel_k<long double>(nu, x);
      EXPECT_LT(rel(bessel_k(nu, x), static_cast<double>(wide)), 1e-14);
    }
  }
}

TEST(BesselK, DecreasingInArgument) {
  for (double nu : {0.0, 0.5, 2.5, 15.0}) {
    double prev = bessel_k(nu, 1e-6);
    for (double x = 1e-3; x <= 50.0; x *= 1.05) {
      const double v = bessel_k(nu, x);
      EXPECT_LT(v, prev) << nu << " " << x;
      prev = v;
    }
  }
}

TEST(BesselK, RejectsNonPositiveArgument) {
  EXPECT_THROW(bessel_k(1.0, 0.0), DomainError);
  EXPECT_THROW(bessel_k(1.0, -1.0), DomainError);
  EXPECT_THROW(bessel_k(-1.0, 1.0), DomainError);
}

TEST(GNu, Examples) {
  EXPECT_DOUBLE_EQ(g_nu(1.0, 0.75), 1.0);
  EXPECT_DOUBLE_EQ(g_nu(1.0, 1.0), 0.0);
  EXPECT_NEAR(g_nu(0.5, 2.0), -0.04332169878499658, 1e-16);
  EXPECT_EQ(g_nu(0.0, 1.3), 0.0);
  EXPECT_THROW(g_nu(-0.1, 1.0), DomainError);
}

TEST(GNu, SignProperties) {
  for (double s = 0.01; s <= 2.0; s += 0.01) {
    for (double nu : {0.1, 0.5, 1.5, 2.7, 9.5}) {
      EXPECT_GT(g_nu(s, nu), 0.0);
    }
    if (s < 1.0) {
      for (double nu : {1.0, 2.0, 3.0}) {
        EXPECT_LT(g_nu(s, nu), 0.0);
      }
    }
  }
  for (double nu : {1.0, 2.0, 5.0}) {
    EXPECT_EQ(g_nu(1.0, nu), 0.0);
  }
}

TEST(GNu, NearIntegerUsesLogBranch) {
  EXPECT_DOUBLE_EQ(g_nu(0.5, 2.0 + 1e-13), g_nu(0.5, 2.0));
  EXPECT_GT(g_nu(0.5, 2.0 + 1e-9), 0.0);
}

TEST(Matern, Examples) {
  EXPECT_NEAR(matern(MaternModel(0.5, 1, 1), 1.0), std::exp(-1.0), 1e-14);
  EXPECT_NEAR(matern(MaternModel(1.5, 1, 1), 1.0), 2.0 * std::exp(-1.0), 1e-14);
  const MaternModel m(2.3, 1.7, 1.9);
  EXPECT_EQ(m(0.0), 1.9 * 1.9);
  EXPECT_THROW(MaternModel(0.0, 1, 1), DomainError);
  EXPECT_THROW(MaternModel(1.0, -1, 1), DomainError);
  EXPECT_THROW(MaternModel(1.0, 1, 0), DomainError);
}

TEST(Matern, ClosedFormsAcrossRange) {
  for (double r = 1e-3; r <= 10.0; r += 0.01) {
    const double e = std::exp(-2.0 * r);
    EXPECT_LT(rel(MaternModel(0.5, 2.0, 1.5)(r), 2.25 * e), 1e-10) << r;
    EXPECT_LT(rel(MaternModel(1.5, 2.0, 1.5)(r), 2.25 * (1.0 + 2.0 * r) * e), 1e-10) << r;
  }
}

TEST(Matern, NonincreasingInDistance) {
  for (double nu : {0.1, 0.5, 1.0, 1.5, 2.0, 2.5}) {
    const MaternModel m(nu, 1.0, 1.0);
    double prev = m(0.0);
    for (int k = 1; k <= 1000; ++k) {
      const double v = m(10.0 * k / 1000.0);
      EXPECT_LE(v, prev) << nu << " " << k;
      EXPECT_GT(v, 0.0);
      prev = v;
    }
  }
}

TEST(Matern, ContinuousAtZero) {
  for (double nu : {0.3, 1.0, 2.5}) {
    const MaternModel m(nu, 1.0, 1.0);
    const double r = 1e-9;
    EXPECT_NEAR(m(r), 1.0, 10.0 * std::pow(r, std::min(2.0 * nu, 2.0)) + 1e-14) << nu;
  }
}

TEST(Matern, BetaStarMatchesExpansion) {
  EXPECT_NEAR(matern_beta_star(MaternModel(0.5, 1, 1)), -1.0, 1e-14);
  EXPECT_NEAR(matern_beta_star(MaternModel(1.5, 1, 1)), 1.0 / 3.0, 1e-14);
  EXPECT_NEAR(matern_beta_star(MaternModel(1.0, 1, 1)), 0.5, 1e-14);
  // (K(r) - even polynomial part) / G(r) -> beta* as r -> 0, checked for nu < 1 where
  // the only polynomial term below r^{2 nu} is the constant.
  for (double nu : {0.3, 0.5, 0.6}) {
    const MaternModel m(nu, 1.3, 0.7);
    const double r = 1e-5;
    EXPECT_NEAR((m(r) - m.variance()) / g_nu(r, nu), matern_beta_star(m), 1e-3) << nu;
  }
}

TEST(PoweredExponential, IsARadialKernel) {
  const PoweredExponentialModel k{0.5, 2.0, 1.0};
  EXPECT_EQ(k(0.0), 1.0);
  EXPECT_NEAR(k(1.0), std::exp(-2.0), 1e-15);
  const SiteSet s = SiteSet::line(std::vector<double>{0.0, 0.5});
  const auto m = covariance_matrix(k, s);
  EXPECT_NEAR(m(0, 1), std::exp(-2.0 * 0.5), 1e-15);
}

TEST(CovarianceMatrix, Examples) {
  const MaternModel exp_model(0.5, 1, 1);
  const auto one = covariance_matrix(MaternModel(1.2, 1, 3.0), SiteSet::line(std::vector<double>{0.4}));
  ASSERT_EQ(one.rows(), 1);
  EXPECT_EQ(one(0, 0), 9.0);
  const auto two = covariance_matrix(exp_model, SiteSet::line(std::vector<double>{0.0, 1.0}));
  EXPECT_EQ(two(0, 0), 1.0);
  EXPECT_EQ(two(1, 1), 1.0);
  EXPECT_NEAR(two(0, 1), std::exp(-1.0), 1e-15);
  EXPECT_THROW(SiteSet::line(std::vector<double>{0.1, 0.1}), DesignError);
}

TEST(CovarianceMatrix, ExactlySymmetric) {
  const auto d = experiment_designs::arc(60);
  const auto k = covariance_matrix(MaternModel(1.3, 1, 1), d.site_set());
  for (Eigen::Index i = 0; i < k.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.cols(); ++j) {
      ASSERT_EQ(k(i, j), k(j, i));
    }
  }
}

TEST(CovarianceMatrix, NumericallyPositiveSemidefiniteOnExperimentDesigns) {
  const std::vector<SiteSet> designs = {experiment_designs::line(200).site_set(),
                                        experiment_designs::arc(200).site_set(),
                                        experiment_designs::lattice(17).site_set()};
  for (const auto& sites : designs) {
    for (double nu : {0.5, 1.5, 2.5}) {
      const auto k = covariance_matrix(MaternModel(nu, 1, 1), sites);
      Eigen::SelfAdjointEigenSolver<DenseMatrix<double>> es(k, Eigen::EigenvaluesOnly);
      EXPECT_GT(es.eigenvalues().minCoeff(), -1e-8) << "nu=" << nu << " n=" << sites.size();
    }
  }
}
