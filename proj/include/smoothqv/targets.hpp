#pragma once

// Deterministic targets for the quadratic variations.
//
// Each target is f_theta(nu) = 2 sum_j w_j G_nu(s_j), a sum over the pairs of
// a stencil's sites: w_j is the product of the two weights and s_j the
// distance between the sites. beta*_nu is fixed to 1 because the estimators
// consume only the ratio F = f_2 / f_1, where it cancels.
//
// F is extended to the closed domain [0, top] (top = l for line and curve,
// 2 for the lattice):
//   nu* = 0          G replaced by its pointwise limit 1;
//   0 < nu* = p < top  G_p(s) = s^{2p} log s, the two-sided limit;
//   nu* = top        s^{2 top}, the one-sided limit from below.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "smoothqv/covariance.hpp"
#include "smoothqv/designs.hpp"
#include "smoothqv/errors.hpp"
#include "smoothqv/qvar.hpp"

namespace smoothqv {

enum class DesignFamily { line, curve, lattice };

inline const char* to_string(DesignFamily f) {
  switch (f) {
    case DesignFamily::line:
      return "line";
    case DesignFamily::curve:
      return "curve";
    case DesignFamily::lattice:
      return "lattice";
  }
  return "?";
}

/// How G is evaluated for a given nu.
enum class GBranch {
  constant,  // G == 1 for s > 0
  power,     // s^{2 nu}
  log,       // s^{2 nu} log s (nu integer)
};

/// The pair terms of one target f_theta.
class TargetTerms {
public:
  void add(double weight, double dist) {
    if (!(dist > 0.0)) {
      throw DesignError("target: coincident stencil sites");
    }
    weight_.push_back(weight);
    log_dist_.push_back(std::log(dist));
  }

  std::size_t size() const { return weight_.size(); }

  /// 2 sum_j w_j G(s_j) under the given branch.
  double evaluate(double nu, GBranch branch) const {
    double sum = 0.0;
    const std::size_t m = weight_.size();
    switch (branch) {
      case GBranch::constant:
        for (std::size_t j = 0; j < m; ++j) {
          sum += weight_[j];
        }
        break;
      case GBranch::power:
        for (std::size_t j = 0; j < m; ++j) {
          sum += weight_[j] * std::exp(2.0 * nu * log_dist_[j]);
        }
        break;
      case GBranch::log:
        for (std::size_t j = 0; j < m; ++j) {
          sum += weight_[j] * std::exp(2.0 * nu * log_dist_[j]) * log_dist_[j];
        }
        break;
    }
    return 2.0 * sum;
  }

private:
  std::vector<double> weight_;
  std::vector<double> log_dist_;
};

namespace detail {

inline TargetTerms line_terms(const LineTransect& design, int theta, int ell) {
  detail::check_row_range(design.size(), theta, ell, 0, kMaxOrder);
  TargetTerms terms;
  const std::size_t rows = design.size() - static_cast<std::size_t>(theta * ell);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = a_coefficients(design, theta, ell, i);
    for (int k1 = 0; k1 <= ell; ++k1) {
      for (int k2 = k1 + 1; k2 <= ell; ++k2) {
        const double gap = design[i + static_cast<std::size_t>(theta * k2)] - design[i + static_cast<std::size_t>(theta * k1)];
        terms.add(row.weights[static_cast<std::size_t>(k1)] * row.weights[static_cast<std::size_t>(k2)], gap);
      }
    }
  }
  return terms;
}

inline TargetTerms curve_terms(const CurveDesign& design, int theta, int ell) {
  detail::check_row_range(design.size(), theta, ell, 0, 2);
  TargetTerms terms;
  const std::size_t rows = design.size() - static_cast<std::size_t>(theta * ell);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = b_coefficients(design, theta, ell, i);
    for (int k1 = 0; k1 <= ell; ++k1) {
      for (int k2 = k1 + 1; k2 <= ell; ++k2) {
        const double d = design.chord(i + static_cast<std::size_t>(theta * k1), i + static_cast<std::size_t>(theta * k2));
        terms.add(row.weights[static_cast<std::size_t>(k1)] * row.weights[static_cast<std::size_t>(k2)], d);
      }
    }
  }
  return terms;
}

// The lattice target sums over ordered pairs (k1,k2) != (l1,l2) with a single
// beta* prefactor, which is twice the sum over unordered pairs.
inline TargetTerms lattice_terms(const LatticeDesign& design, int theta, int ell) {
  detail::check_theta(theta);
  const std::size_t n = design.side();
  const auto th = static_cast<std::size_t>(theta);
  if (th >= n) {
    throw DomainError("lattice target: theta too large for the lattice");
  }
  TargetTerms terms;
  const std::size_t cells = n - th;
  for (std::size_t i1 = 0; i1 < cells; ++i1) {
    for (std::size_t i2 = 0; i2 < cells; ++i2) {
      const auto row = c_coefficients(design, theta, ell, i1, i2);
      const Point corner[4] = {design.at(i1, i2), design.at(i1, i2 + th), design.at(i1 + th, i2),
                               design.at(i1 + th, i2 + th)};
      for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
          terms.add(row.weights[a] * row.weights[b], distance(corner[a], corner[b]));
        }
      }
    }
  }
  return terms;
}

inline void check_open_domain(double nu, double hi, const char* who) {
  if (!(nu > 0.0) || !(nu < hi)) {
    throw DomainError(std::string(who) + ": nu = " + std::to_string(nu) + " outside (0, " + std::to_string(hi) +
                      "); use the ratio endpoint extension");
  }
}

inline GBranch interior_branch(double nu) { return is_integer_order(nu) ? GBranch::log : GBranch::power; }

}  // namespace detail

/// f_{theta,l}(nu) on a line transect, nu in (0, l).
inline double f_line(const LineTransect& design, int theta, int ell, double nu) {
  detail::check_open_domain(nu, ell, "f_line");
  const double p = is_integer_order(nu) ? std::round(nu) : nu;
  return detail::line_terms(design, theta, ell).evaluate(p, detail::interior_branch(nu));
}

/// Curve target with chord distances, nu in (0, l), l in {1, 2}.
inline double f_curve(const CurveDesign& design, int theta, int ell, double nu) {
  detail::check_open_domain(nu, ell, "f_curve");
  const double p = is_integer_order(nu) ? std::round(nu) : nu;
  return detail::curve_terms(design, theta, ell).evaluate(p, detail::interior_branch(nu));
}

/// Lattice target, nu in (0, 2).
inline double f_lattice(const LatticeDesign& design, int theta, int ell, double nu) {
  detail::check_open_domain(nu, 2.0, "f_lattice");
  const double p = is_integer_order(nu) ? std::round(nu) : nu;
  return detail::lattice_terms(design, theta, ell).evaluate(p, detail::interior_branch(nu));
}

/// F(nu*) = f_2(nu*) / f_1(nu*) for one design and order, continuous on [0, top].
/// Holds the precomputed pair terms; evaluation is O(number of stencil pairs).
class RatioFunction {
public:
  static RatioFunction line(const LineTransect& design, int ell) {
    return {DesignFamily::line, ell, static_cast<double>(ell), detail::line_terms(design, 1, ell),
            detail::line_terms(design, 2, ell)};
  }
  static RatioFunction curve(const CurveDesign& design, int ell) {
    return {DesignFamily::curve, ell, static_cast<double>(ell), detail::curve_terms(design, 1, ell),
            detail::curve_terms(design, 2, ell)};
  }
  static RatioFunction lattice(const LatticeDesign& design, int ell) {
    if (ell != 1 && ell != 2) {
      throw DomainError("lattice ratio: ell must be 1 or 2");
    }
    return {DesignFamily::lattice, ell, 2.0, detail::lattice_terms(design, 1, ell),
            detail::lattice_terms(design, 2, ell)};
  }

  DesignFamily family() const { return family_; }
  int ell() const { return ell_; }
  double upper_limit() const { return top_; }

  /// The branch used at nu*; see the header comment.
  GBranch branch_at(double nu_star) const {
    if (std::abs(nu_star) <= kIntegerOrderTolerance) {
      return GBranch::constant;
    }
    if (is_integer_order(nu_star)) {
      return std::round(nu_star) >= top_ ? GBranch::power : GBranch::log;
    }
    return GBranch::power;
  }

  /// The target f_theta at nu* under the same endpoint conventions as the ratio.
  double target(int theta, double nu_star) const {
    check_domain(nu_star);
    detail::check_theta(theta);
    const GBranch b = branch_at(nu_star);
    const double nu = is_integer_order(nu_star) ? std::round(nu_star) : nu_star;
    return (theta == 1 ? f1_ : f2_).evaluate(nu, b);
  }

  double operator()(double nu_star) const {
    check_domain(nu_star);
    const GBranch b = branch_at(nu_star);
    const double nu = is_integer_order(nu_star) ? std::round(nu_star) : nu_star;
    return f2_.evaluate(nu, b) / f1_.evaluate(nu, b);
  }

private:
  RatioFunction(DesignFamily family, int ell, double top, TargetTerms f1, TargetTerms f2)
      : family_(family), ell_(ell), top_(top), f1_(std::move(f1)), f2_(std::move(f2)) {}

  void check_domain(double nu_star) const {
    if (!(nu_star >= 0.0) || !(nu_star <= top_)) {
      throw DomainError("ratio F: nu* = " + std::to_string(nu_star) + " outside [0, " + std::to_string(top_) + "]");
    }
  }

  DesignFamily family_;
  int ell_;
  double top_;
  TargetTerms f1_;
  TargetTerms f2_;
};

using AnyDesign = std::variant<LineTransect, CurveDesign, LatticeDesign>;

/// F_{l,n}(nu*) for whichever design is supplied.
inline double ratio_F(const AnyDesign& design, int ell, double nu_star) {
  return std::visit(
      [&](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, LineTransect>) {
          return RatioFunction::line(d, ell)(nu_star);
        } else if constexpr (std::is_same_v<D, CurveDesign>) {
          return RatioFunction::curve(d, ell)(nu_star);
        } else {
          return RatioFunction::lattice(d, ell)(nu_star);
        }
      },
      design);
}

inline double binomial(int n, int k) {
  return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
}

/// H_l(nu) = sum_{k1<k2} (-1)^{k1+k2} C(l,k1) C(l,k2) G_nu(k2 - k1).
inline double h_ell(int ell, double nu) {
  if (ell < 1 || ell > kMaxOrder) {
    throw DomainError("h_ell: ell must be in 1..10");
  }
  if (!(nu > 0.0)) {
    throw DomainError("h_ell: nu must be positive");
  }
  double sum = 0.0;
  for (int k1 = 0; k1 <= ell; ++k1) {
    for (int k2 = k1 + 1; k2 <= ell; ++k2) {
      const double sign = ((k1 + k2) % 2 == 0) ? 1.0 : -1.0;
      sum += sign * std::round(binomial(ell, k1)) * std::round(binomial(ell, k2)) * g_nu(k2 - k1, nu);
    }
  }
  return sum;
}

struct HScanReport {
  int ell = 1;
  double upper = 0.0;
  double step = 1e-3;
  std::size_t points = 0;
  double min_abs = 0.0;
  double argmin = 0.0;
};

/// Scans H_l on {k * 1e-3} within [1e-3, M]. H_l moves through zero at
/// integers under the power branch while the integer points themselves use
/// the log branch, so sign changes are only a zero when they occur between
/// two grid points with no integer between them.
inline HScanReport h_ell_nonzero_scan(int ell, double upper, double step = 1e-3) {
  if (ell < 1 || ell > kMaxOrder) {
    throw ConfigurationError("h_ell_nonzero_scan: ell must be in 1..10");
  }
  if (!(upper < ell) || !(upper >= step)) {
    throw ConfigurationError("h_ell_nonzero_scan: need step <= M < ell");
  }
  HScanReport rep{ell, upper, step, 0, std::numeric_limits<double>::infinity(), 0.0};
  const auto count = static_cast<std::size_t>(std::floor(upper / step + 1e-9));
  double prev_value = 0.0;
  double prev_nu = 0.0;
  bool have_prev = false;
  for (std::size_t k = 1; k <= count; ++k) {
    const double nu = static_cast<double>(k) * step;
    const double h = h_ell(ell, nu);
    ++rep.points;
    if (h == 0.0 || !std::isfinite(h)) {
      throw ConfigurationError("H_" + std::to_string(ell) + " vanishes at nu = " + std::to_string(nu));
    }
    if (std::abs(h) < rep.min_abs) {
      rep.min_abs = std::abs(h);
      rep.argmin = nu;
    }
    if (is_integer_order(nu)) {
      have_prev = false;
      continue;
    }
    if (have_prev && std::floor(prev_nu) == std::floor(nu) && (prev_value < 0.0) != (h < 0.0)) {
      throw ConfigurationError("H_" + std::to_string(ell) + " changes sign in (" + std::to_string(prev_nu) + ", " +
                               std::to_string(nu) + ")");
    }
    prev_value = h;
    prev_nu = nu;
    have_prev = true;
  }
  return rep;
}

/// First partial derivatives of a planar map phi~ = (phi_1, phi_2) at (u, v).
struct MapPartials {
  double d1_du = 1.0;  // phi_1^{(1,0)}
  double d1_dv = 0.0;  // phi_1^{(0,1)}
  double d2_du = 0.0;  // phi_2^{(1,0)}
  double d2_dv = 1.0;  // phi_2^{(0,1)}
};

/// Integrand of the lattice target's leading constant at one point of the unit square.
inline double j_integrand(const MapPartials& p, int ell, double nu) {
  if (ell != 1 && ell != 2) {
    throw DomainError("j_integrand: ell must be 1 or 2");
  }
  if (!(nu > 0.0) || !(nu < 2.0)) {
    throw DomainError("j_integrand: nu must lie in (0, 2)");
  }
  const double jac = p.d1_du * p.d2_dv - p.d1_dv * p.d2_du;
  if (jac == 0.0) {
    throw DomainError("j_integrand: singular map (zero Jacobian)");
  }
  // l^c = 3 - l
  const double num = ell == 1 ? (p.d2_dv - p.d2_du) : (p.d1_dv - p.d1_du);
  const double prefactor = num * num / (jac * jac);
  const double len_v = std::hypot(p.d1_dv, p.d2_dv);
  const double len_u = std::hypot(p.d1_du, p.d2_du);
  const double len_sum = std::hypot(p.d1_du + p.d1_dv, p.d2_du + p.d2_dv);
  const double len_diff = std::hypot(p.d1_dv - p.d1_du, p.d2_dv - p.d2_du);
  const double bracket = -2.0 * g_nu(len_v, nu) - 2.0 * g_nu(len_u, nu) + g_nu(len_sum, nu) + g_nu(len_diff, nu);
  return prefactor * bracket;
}

namespace experiment_designs {

/// Partials of z(z+1)/3: f'(z) = (2z+1)/3 = p + i q, so phi_1 has gradient (p, -q) and phi_2 has (q, p).
inline MapPartials lattice_map_partials(double u, double v) {
  const double p = (2.0 * u + 1.0) / 3.0;
  const double q = 2.0 * v / 3.0;
  return {p, -q, q, p};
}

}  // namespace experiment_designs

}  // namespace smoothqv
