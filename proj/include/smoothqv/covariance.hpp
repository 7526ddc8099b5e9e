#pragma once

// Isotropic covariance models and the principal irregular term G_nu.
//
// A covariance of the class handled here expands near zero lag as
//   K(x, y) = sum_{j <= floor(nu)} beta_j |x-y|^{2j} + beta*_nu G_nu(|x-y|) + r(x, y),
// with r = O(|x-y|^{2 nu + tau}). Only G_nu enters the estimators; the
// polynomial part is annihilated by the increments and beta*_nu cancels
// in every ratio, so neither the beta_j nor tau are stored.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "smoothqv/errors.hpp"
#include "smoothqv/special.hpp"

namespace smoothqv {

inline constexpr double kIntegerOrderTolerance = 1e-12;

/// True when nu is within 1e-12 of an integer; such orders use the log branch of G_nu.
inline bool is_integer_order(double nu) {
  return std::abs(nu - std::round(nu)) <= kIntegerOrderTolerance;
}

/// Principal irregular term: s^{2 nu} for non-integer nu, s^{2 nu} log s for integer nu, 0 at s = 0.
inline double g_nu(double s, double nu) {
  if (s == 0.0) {
    return 0.0;
  }
  if (!(s > 0.0)) {
    throw DomainError("g_nu: distance must be nonnegative, got " + std::to_string(s));
  }
  if (!(nu > 0.0)) {
    throw DomainError("g_nu: nu must be positive, got " + std::to_string(nu));
  }
  if (is_integer_order(nu)) {
    const double p = std::round(nu);
    return std::pow(s, 2.0 * p) * std::log(s);
  }
  return std::pow(s, 2.0 * nu);
}

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
  friend auto operator<=>(const Point&, const Point&) = default;
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Ordered set of distinct sites in R^1 (y == 0) or R^2.
class SiteSet {
public:
  SiteSet(int dimension, std::vector<Point> points) : dimension_(dimension), points_(std::move(points)) {
    if (dimension_ != 1 && dimension_ != 2) {
      throw DesignError("SiteSet: dimension must be 1 or 2");
    }
    if (dimension_ == 1 && std::any_of(points_.begin(), points_.end(), [](const Point& p) { return p.y != 0.0; })) {
      throw DesignError("SiteSet: one-dimensional sites must have a zero second coordinate");
    }
    std::vector<Point> sorted = points_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DesignError("SiteSet: duplicate sites");
    }
  }

  static SiteSet line(std::span<const double> t) {
    std::vector<Point> pts;
    pts.reserve(t.size());
    for (double v : t) {
      pts.push_back({v, 0.0});
    }
    return SiteSet(1, std::move(pts));
  }

  int dimension() const { return dimension_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }

private:
  int dimension_;
  std::vector<Point> points_;
};

/// Radial kernel: variance() is the value at zero lag, operator()(r) the covariance at distance r.
template <typename K>
concept RadialKernel = requires(const K& k, double r) {
  { k(r) } -> std::convertible_to<double>;
  { k.variance() } -> std::convertible_to<double>;
};

/// Matern covariance sigma^2 (alpha r)^nu K_nu(alpha r) / (2^{nu-1} Gamma(nu)).
struct MaternModel {
  double nu = 0.5;
  double alpha = 1.0;
  double sigma = 1.0;

  MaternModel() = default;
  MaternModel(double nu_, double alpha_, double sigma_) : nu(nu_), alpha(alpha_), sigma(sigma_) {
    if (!(nu > 0.0) || !(alpha > 0.0) || !(sigma > 0.0)) {
      throw DomainError("MaternModel: nu, alpha and sigma must be positive");
    }
  }

  double variance() const { return sigma * sigma; }

  template <typename Real = double>
  Real evaluate(Real r) const {
    if (r < 0) {
      throw DomainError("matern: distance must be nonnegative");
    }
    const Real s2 = Real(sigma) * Real(sigma);
    if (r == 0) {
      return s2;
    }
    const Real n = nu;
    const Real x = Real(alpha) * r;
    // log-space keeps (alpha r)^nu and K_nu from overflowing separately at small r
    const Real log_value = n * std::log(x) + std::log(bessel_k_scaled<Real>(n, x)) - x -
                           (n - 1) * std::numbers::ln2_v<Real> - std::lgamma(n);
    return s2 * std::exp(log_value);
  }

  double operator()(double r) const { return evaluate<double>(r); }
};

inline double matern(const MaternModel& model, double r) { return model(r); }

/// Coefficient beta*_nu of G_nu in the Matern expansion at zero lag:
///   non-integer nu: -pi sigma^2 alpha^{2nu} / (Gamma(nu) sin(nu pi) 2^{2nu} Gamma(1+nu))
///   integer nu:     (-1)^{nu+1} 2 sigma^2 alpha^{2nu} / (2^{2nu} (nu-1)! nu!)
inline double matern_beta_star(const MaternModel& m) {
  const double s2 = m.sigma * m.sigma;
  const double a2nu = std::pow(m.alpha, 2.0 * m.nu);
  if (is_integer_order(m.nu)) {
    const double p = std::round(m.nu);
    const double sign = static_cast<long long>(p) % 2 == 1 ? 1.0 : -1.0;
    return sign * 2.0 * s2 * a2nu / (std::pow(2.0, 2.0 * p) * std::tgamma(p) * std::tgamma(p + 1.0));
  }
  return -std::numbers::pi * s2 * a2nu /
         (std::tgamma(m.nu) * std::sin(m.nu * std::numbers::pi) * std::pow(2.0, 2.0 * m.nu) * std::tgamma(1.0 + m.nu));
}

/// exp(-c r^{2 nu}), nu in (0, 1]; its principal irregular term is -c G_nu.
struct PoweredExponentialModel {
  double nu = 0.5;
  double c = 1.0;
  double sigma = 1.0;

  double variance() const { return sigma * sigma; }
  double operator()(double r) const {
    if (r < 0.0) {
      throw DomainError("powered exponential: distance must be nonnegative");
    }
    return sigma * sigma * std::exp(-c * std::pow(r, 2.0 * nu));
  }
};

static_assert(RadialKernel<MaternModel>);
static_assert(RadialKernel<PoweredExponentialModel>);

template <typename Real>
using DenseMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

/// Symmetric covariance matrix over a site set; the diagonal is exactly the kernel variance.
template <typename Real = double, RadialKernel Kernel>
DenseMatrix<Real> covariance_matrix(const Kernel& kernel, const SiteSet& sites) {
  const auto n = static_cast<Eigen::Index>(sites.size());
  if (n == 0) {
    throw DesignError("covariance_matrix: empty site set");
  }
  DenseMatrix<Real> k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = static_cast<Real>(kernel.variance());
    for (Eigen::Index j = 0; j < i; ++j) {
      const auto& p = sites[static_cast<std::size_t>(i)];
      const auto& q = sites[static_cast<std::size_t>(j)];
      Real value;
      if constexpr (std::same_as<Kernel, MaternModel>) {
        const Real dx = Real(p.x) - Real(q.x);
        const Real dy = Real(p.y) - Real(q.y);
        value = kernel.template evaluate<Real>(std::sqrt(dx * dx + dy * dy));
      } else {
        value = static_cast<Real>(kernel(distance(p, q)));
      }
      k(i, j) = value;
      k(j, i) = value;
    }
  }
  return k;
}

}  // namespace smoothqv
