#pragma once

// Divided-difference weights and quadratic variations.
//
// Line transect:  a_{theta,l;i,k} = l! / prod_{j != k} (t_{i+theta k} - t_{i+theta j})
// Curve:          b_{theta,l;i,k} = l  / prod_{j != k} (d_{i,i+theta k} - d_{i,i+theta j})
// Lattice:        four weights c^{k1,k2} from the inverses of the cell
//                 matrices A (anchored at x^{i1,i2}) and B (anchored at
//                 x^{i1+theta,i2+theta}).
//
// Indices are zero-based throughout: a row with base index i covers sites
// i, i + theta, ..., i + theta*l and exists for 0 <= i < n - theta*l.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "smoothqv/designs.hpp"
#include "smoothqv/errors.hpp"

namespace smoothqv {

inline constexpr int kMaxOrder = 10;

struct CoefficientRow {
  int theta = 1;
  int ell = 1;
  std::size_t base_index = 0;
  // l+1 weights for line/curve rows; for lattice rows the four weights
  // c^{k1,k2} at position 2*k1 + k2.
  std::vector<double> weights;
};

struct VariationStatistic {
  int theta = 1;
  int ell = 1;
  double value = 0.0;
  std::size_t term_count = 0;
  // Size of value that floating-point rounding alone can produce; data whose
  // variation does not exceed it (e.g. constants) is numerically annihilated.
  double rounding_floor = 0.0;
};

/// Tree reduction; the summation order depends only on the length.
inline double pairwise_sum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) {
      s += x;
    }
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

namespace detail {

inline void check_theta(int theta) {
  if (theta != 1 && theta != 2) {
    throw DomainError("theta must be 1 or 2, got " + std::to_string(theta));
  }
}

inline void check_row_range(std::size_t n, int theta, int ell, std::size_t i, int max_ell) {
  check_theta(theta);
  if (ell < 1 || ell > max_ell) {
    throw DomainError("order ell = " + std::to_string(ell) + " outside 1.." + std::to_string(max_ell));
  }
  const std::size_t span = static_cast<std::size_t>(theta) * static_cast<std::size_t>(ell);
  if (span >= n) {
    throw DomainError("order ell = " + std::to_string(ell) + " too large for " + std::to_string(n) + " sites");
  }
  if (i >= n - span) {
    throw DomainError("row index " + std::to_string(i) + " out of range [0, " + std::to_string(n - span) + ")");
  }
}

// numerator / prod_{j != k} (x_k - x_j), assembled in log-magnitude and sign
// so that products of up to ten gaps of size ~1/n neither overflow nor underflow.
inline std::vector<double> lagrange_weights(std::span<const double> nodes, double log_numerator) {
  const std::size_t m = nodes.size();
  std::vector<double> w(m);
  for (std::size_t k = 0; k < m; ++k) {
    double log_mag = log_numerator;
    bool negative = false;
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k) {
        continue;
      }
      const double diff = nodes[k] - nodes[j];
      if (diff == 0.0) {
        throw DomainError("coincident nodes in divided-difference weights");
      }
      log_mag -= std::log(std::abs(diff));
      negative ^= (diff < 0.0);
    }
    const double mag = std::exp(log_mag);
    w[k] = negative ? -mag : mag;
  }
  return w;
}

}  // namespace detail

inline CoefficientRow a_coefficients(const LineTransect& design, int theta, int ell, std::size_t i) {
  detail::check_row_range(design.size(), theta, ell, i, kMaxOrder);
  std::vector<double> nodes(static_cast<std::size_t>(ell) + 1);
  for (int k = 0; k <= ell; ++k) {
    nodes[static_cast<std::size_t>(k)] = design[i + static_cast<std::size_t>(theta * k)];
  }
  return {theta, ell, i, detail::lagrange_weights(nodes, std::lgamma(ell + 1.0))};
}

inline CoefficientRow b_coefficients(const CurveDesign& design, int theta, int ell, std::size_t i) {
  detail::check_row_range(design.size(), theta, ell, i, 2);
  std::vector<double> nodes(static_cast<std::size_t>(ell) + 1);
  for (int k = 0; k <= ell; ++k) {
    nodes[static_cast<std::size_t>(k)] = design.chord(i, i + static_cast<std::size_t>(theta * k));
  }
  try {
    return {theta, ell, i, detail::lagrange_weights(nodes, std::log(static_cast<double>(ell)))};
  } catch (const DomainError&) {
    throw DomainError("b_coefficients: coincident chord distances at row " + std::to_string(i));
  }
}

/// Relative determinant threshold below which a lattice cell is degenerate.
inline constexpr double kCellDeterminantTolerance = 1e-14;

inline CoefficientRow c_coefficients(const LatticeDesign& design, int theta, int ell, std::size_t i1,
                                     std::size_t i2) {
  detail::check_theta(theta);
  if (ell != 1 && ell != 2) {
    throw DomainError("c_coefficients: ell must be 1 or 2");
  }
  const std::size_t n = design.side();
  const auto th = static_cast<std::size_t>(theta);
  if (th >= n || i1 >= n - th || i2 >= n - th) {
    throw DomainError("c_coefficients: cell index out of range");
  }
  const Point& p00 = design.at(i1, i2);
  const Point& p10 = design.at(i1 + th, i2);
  const Point& p01 = design.at(i1, i2 + th);
  const Point& p11 = design.at(i1 + th, i2 + th);

  // Row l of the inverse of [[a, b], [c, d]].
  auto inverse_row = [&](double a, double b, double c, double d, const char* name) {
    const double det = a * d - b * c;
    const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
    if (!(std::abs(det) > kCellDeterminantTolerance * scale * scale)) {
      throw DegenerateCellError(std::string("c_coefficients: singular ") + name + " matrix at cell (" +
                                std::to_string(i1) + ", " + std::to_string(i2) + ")");
    }
    return ell == 1 ? std::array<double, 2>{d / det, -b / det} : std::array<double, 2>{-c / det, a / det};
  };
  const auto alpha = inverse_row(p10.x - p00.x, p10.y - p00.y, p01.x - p00.x, p01.y - p00.y, "A");
  const auto beta = inverse_row(p10.x - p11.x, p10.y - p11.y, p01.x - p11.x, p01.y - p11.y, "B");

  CoefficientRow row{theta, ell, i1 * n + i2, std::vector<double>(4)};
  row.weights[0] = alpha[0] + alpha[1];  // (0,0)
  row.weights[1] = beta[1] - alpha[1];   // (0,1)
  row.weights[2] = beta[0] - alpha[0];   // (1,0)
  row.weights[3] = -beta[0] - beta[1];   // (1,1)
  return row;
}

namespace detail {

inline void check_variation_inputs(std::size_t obs, std::size_t n, const char* who) {
  if (obs != n) {
    throw DomainError(std::string(who) + ": expected " + std::to_string(n) + " observations, got " +
                      std::to_string(obs));
  }
}

// magnitudes[i] = sum_k |w_k x_k| bounds the rounding error of increment i by about (terms) eps magnitudes[i].
inline VariationStatistic finish_variation(int theta, int ell, std::vector<double>& squares,
                                           std::vector<double>& magnitudes, int terms) {
  const double unit = 4.0 * terms * std::numeric_limits<double>::epsilon();
  for (auto& m : magnitudes) {
    m = (unit * m) * (unit * m);
  }
  return {theta, ell, pairwise_sum(squares), squares.size(), pairwise_sum(magnitudes)};
}

}  // namespace detail

inline VariationStatistic variation_line(std::span<const double> obs, const LineTransect& design, int theta,
                                         int ell) {
  detail::check_variation_inputs(obs.size(), design.size(), "variation_line");
  detail::check_row_range(design.size(), theta, ell, 0, kMaxOrder);
  const std::size_t rows = design.size() - static_cast<std::size_t>(theta * ell);
  std::vector<double> squares(rows);
  std::vector<double> magnitudes(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = a_coefficients(design, theta, ell, i);
    double inc = 0.0;
    double mag = 0.0;
    for (int k = 0; k <= ell; ++k) {
      const double term = row.weights[static_cast<std::size_t>(k)] * obs[i + static_cast<std::size_t>(theta * k)];
      inc += term;
      mag += std::abs(term);
    }
    squares[i] = inc * inc;
    magnitudes[i] = mag;
  }
  return detail::finish_variation(theta, ell, squares, magnitudes, ell + 1);
}

inline VariationStatistic variation_curve(std::span<const double> obs, const CurveDesign& design, int theta,
                                          int ell) {
  detail::check_variation_inputs(obs.size(), design.size(), "variation_curve");
  detail::check_row_range(design.size(), theta, ell, 0, 2);
  const std::size_t rows = design.size() - static_cast<std::size_t>(theta * ell);
  std::vector<double> squares(rows);
  std::vector<double> magnitudes(rows);
  for (std::size_t i = 0; i < rows; ++i) {
    const auto row = b_coefficients(design, theta, ell, i);
    double inc = 0.0;
    double mag = 0.0;
    for (int k = 0; k <= ell; ++k) {
      const double term = row.weights[static_cast<std::size_t>(k)] * obs[i + static_cast<std::size_t>(theta * k)];
      inc += term;
      mag += std::abs(term);
    }
    squares[i] = inc * inc;
    magnitudes[i] = mag;
  }
  return detail::finish_variation(theta, ell, squares, magnitudes, ell + 1);
}

/// Observations are indexed like the design points: obs[i1 * n + i2] = X(x^{i1+1, i2+1}).
inline VariationStatistic variation_lattice(std::span<const double> obs, const LatticeDesign& design, int theta,
                                            int ell) {
  detail::check_variation_inputs(obs.size(), design.size(), "variation_lattice");
  detail::check_theta(theta);
  const std::size_t n = design.side();
  const auto th = static_cast<std::size_t>(theta);
  if (th >= n) {
    throw DomainError("variation_lattice: theta too large for the lattice");
  }
  const std::size_t cells = n - th;
  std::vector<double> squares(cells * cells);
  std::vector<double> magnitudes(cells * cells);
  for (std::size_t i1 = 0; i1 < cells; ++i1) {
    for (std::size_t i2 = 0; i2 < cells; ++i2) {
      const auto row = c_coefficients(design, theta, ell, i1, i2);
      const double t[4] = {row.weights[0] * obs[i1 * n + i2], row.weights[1] * obs[i1 * n + i2 + th],
                           row.weights[2] * obs[(i1 + th) * n + i2], row.weights[3] * obs[(i1 + th) * n + i2 + th]};
      const double inc = t[0] + t[1] + t[2] + t[3];
      squares[i1 * cells + i2] = inc * inc;
      magnitudes[i1 * cells + i2] = std::abs(t[0]) + std::abs(t[1]) + std::abs(t[2]) + std::abs(t[3]);
    }
  }
  return detail::finish_variation(theta, ell, squares, magnitudes, 4);
}

}  // namespace smoothqv
