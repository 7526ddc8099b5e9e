#pragma once

// Sampling designs: line transects generated by a monotone map, sites along
// a planar curve, and deformed n x n lattices. Also the nearest-neighbour
// reconstruction of the site order along a curve when the map is unknown.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <concepts>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "smoothqv/covariance.hpp"
#include "smoothqv/errors.hpp"

namespace smoothqv {

/// Largest index offset |i - j| for which chord distances are stored.
inline constexpr std::size_t kMaxChordOffset = 4;

/// Ordered sites 0 = t_1 < ... < t_n = 1 on the unit interval.
class LineTransect {
public:
  explicit LineTransect(std::vector<double> sites) : sites_(std::move(sites)) {
    if (sites_.size() < 2) {
      throw DesignError("LineTransect: need at least 2 sites");
    }
    for (std::size_t i = 1; i < sites_.size(); ++i) {
      if (!(sites_[i] > sites_[i - 1])) {
        throw DesignError("LineTransect: sites must be strictly increasing (violated at index " +
                          std::to_string(i) + ")");
      }
    }
  }

  std::size_t size() const { return sites_.size(); }
  double operator[](std::size_t i) const { return sites_[i]; }
  const std::vector<double>& sites() const { return sites_; }
  SiteSet site_set() const { return SiteSet::line(sites_); }

private:
  std::vector<double> sites_;
};

/// Ordered points along a planar curve with the chord distances d(i, j), |i - j| <= 4.
class CurveDesign {
public:
  explicit CurveDesign(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.size() < 2) {
      throw DesignError("CurveDesign: need at least 2 points");
    }
    chords_.resize(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) {
      chords_[i].fill(0.0);
      for (std::size_t k = 1; k <= kMaxChordOffset && i + k < points_.size(); ++k) {
        const double d = distance(points_[i], points_[i + k]);
        if (!(d > 0.0)) {
          throw DesignError("CurveDesign: coincident points at indices " + std::to_string(i) + " and " +
                            std::to_string(i + k));
        }
        chords_[i][k] = d;
      }
    }
  }

  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  SiteSet site_set() const { return SiteSet(2, points_); }

  /// d(i, j) = |gamma(t_i) - gamma(t_j)|, zero-based, |i - j| <= 4.
  double chord(std::size_t i, std::size_t j) const {
    if (i == j) {
      return 0.0;
    }
    const std::size_t lo = std::min(i, j);
    const std::size_t off = std::max(i, j) - lo;
    if (off > kMaxChordOffset || std::max(i, j) >= points_.size()) {
      throw DomainError("CurveDesign::chord: offset " + std::to_string(off) + " not stored");
    }
    return chords_[lo][off];
  }

private:
  std::vector<Point> points_;
  std::vector<std::array<double, kMaxChordOffset + 1>> chords_;
};

/// n x n sites x^{i1,i2} = phi~(i1/n, i2/n), 1 <= i1, i2 <= n, stored with i1 major.
class LatticeDesign {
public:
  LatticeDesign(std::size_t n, std::vector<Point> points) : n_(n), points_(std::move(points)) {
    if (n_ < 2) {
      throw DesignError("LatticeDesign: side count must be at least 2");
    }
    if (points_.size() != n_ * n_) {
      throw DesignError("LatticeDesign: expected " + std::to_string(n_ * n_) + " points, got " +
                        std::to_string(points_.size()));
    }
    std::vector<Point> sorted = points_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw DesignError("LatticeDesign: duplicate points");
    }
  }

  std::size_t side() const { return n_; }
  std::size_t size() const { return points_.size(); }
  const std::vector<Point>& points() const { return points_; }
  SiteSet site_set() const { return SiteSet(2, points_); }

  /// Zero-based grid access: at(i1, i2) is x^{i1+1, i2+1}.
  const Point& at(std::size_t i1, std::size_t i2) const { return points_[i1 * n_ + i2]; }
  static std::size_t flat_index(std::size_t n, std::size_t i1, std::size_t i2) { return i1 * n + i2; }

private:
  std::size_t n_;
  std::vector<Point> points_;
};

namespace detail {

// A strictly increasing map from [lo, hi] onto itself whose smallest slope
// on a 10n grid is below this fraction of the mean slope is rejected: the
// design would not satisfy min phi' > 0 in any useful sense.
inline constexpr double kMinSlopeFraction = 0.05;
inline constexpr double kEndpointTolerance = 1e-12;

template <typename Phi>
void validate_monotone_map(const Phi& phi, double lo, double hi, std::size_t n, const char* who) {
  if (std::abs(phi(lo) - lo) > kEndpointTolerance * std::max(1.0, std::abs(hi)) ||
      std::abs(phi(hi) - hi) > kEndpointTolerance * std::max(1.0, std::abs(hi))) {
    throw DesignError(std::string(who) + ": map must fix both endpoints of the parameter interval");
  }
  const std::size_t cells = 10 * std::max<std::size_t>(n, 2);
  const double h = (hi - lo) / static_cast<double>(cells);
  double prev = phi(lo);
  for (std::size_t k = 1; k <= cells; ++k) {
    const double s = (k == cells) ? hi : lo + h * static_cast<double>(k);
    const double cur = phi(s);
    const double slope = (cur - prev) / h;
    if (!(slope > 0.0)) {
      throw DesignError(std::string(who) + ": map is not strictly increasing near s = " + std::to_string(s));
    }
    if (slope < kMinSlopeFraction) {
      throw DesignError(std::string(who) + ": map slope " + std::to_string(slope) + " near s = " +
                        std::to_string(s) + " is below the minimum slope margin");
    }
    prev = cur;
  }
}

inline void ensure_distinct(std::vector<Point> pts, const char* who) {
  std::sort(pts.begin(), pts.end());
  if (std::adjacent_find(pts.begin(), pts.end()) != pts.end()) {
    throw DesignError(std::string(who) + ": coincident sites");
  }
}

}  // namespace detail

/// t_i = phi((i-1)/(n-1)), i = 1..n; phi must fix 0 and 1 and be strictly increasing.
template <std::invocable<double> Phi>
LineTransect line_sites(const Phi& phi, std::size_t n) {
  if (n < 2) {
    throw DesignError("line_sites: need n >= 2");
  }
  detail::validate_monotone_map(phi, 0.0, 1.0, n, "line_sites");
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) {
    t[i] = (i + 1 == n) ? 1.0 : static_cast<double>(phi(static_cast<double>(i) / static_cast<double>(n - 1)));
  }
  t.front() = 0.0;
  return LineTransect(std::move(t));
}

/// Points gamma(phi(L (i-1)/(n-1))); phi must fix 0 and L and be strictly increasing.
template <std::invocable<double> Gamma, std::invocable<double> Phi>
CurveDesign curve_sites(const Gamma& gamma, const Phi& phi, double length, std::size_t n) {
  if (!(length > 0.0)) {
    throw DesignError("curve_sites: curve length must be positive");
  }
  if (n < 2) {
    throw DesignError("curve_sites: need n >= 2");
  }
  detail::validate_monotone_map(phi, 0.0, length, n, "curve_sites");
  std::vector<Point> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = length * static_cast<double>(i) / static_cast<double>(n - 1);
    pts[i] = gamma(phi(s));
  }
  detail::ensure_distinct(pts, "curve_sites");
  return CurveDesign(std::move(pts));
}

/// x^{i1,i2} = phi~(i1/n, i2/n) for 1 <= i1, i2 <= n.
template <typename Map>
  requires std::invocable<Map, double, double>
LatticeDesign lattice_sites(const Map& map, std::size_t n) {
  if (n < 2) {
    throw DesignError("lattice_sites: need n >= 2");
  }
  std::vector<Point> pts(n * n);
  const double dn = static_cast<double>(n);
  for (std::size_t i1 = 1; i1 <= n; ++i1) {
    for (std::size_t i2 = 1; i2 <= n; ++i2) {
      pts[LatticeDesign::flat_index(n, i1 - 1, i2 - 1)] = map(static_cast<double>(i1) / dn, static_cast<double>(i2) / dn);
    }
  }
  return LatticeDesign(n, std::move(pts));
}

/// Rejects an adjacent gap larger than this multiple of the median adjacent gap.
inline constexpr double kAdjacencyGapFactor = 3.0;

/// Recovers the order of points sampled along a curve from nearest-neighbour
/// adjacency. Starts at the lexicographically smallest point and grows a
/// chain at whichever end has the nearer unused point (ties extend the
/// front). The result lists input indices; it equals the true order or its
/// reversal when adjacent sites are mutually closest.
inline std::vector<std::size_t> recover_order(std::span<const Point> points) {
  const std::size_t n = points.size();
  if (n == 0) {
    return {};
  }
  detail::ensure_distinct(std::vector<Point>(points.begin(), points.end()), "recover_order");
  if (n == 1) {
    return {0};
  }

  std::vector<bool> used(n, false);
  auto nearest_unused = [&](std::size_t from) {
    std::size_t best = n;
    double best_d = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j]) {
        continue;
      }
      const double d = distance(points[from], points[j]);
      if (best == n || d < best_d) {
        best = j;
        best_d = d;
      }
    }
    return std::pair{best, best_d};
  };
  auto median = [](std::vector<double> v) {
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    double m = *mid;
    if (v.size() % 2 == 0) {
      m = (m + *std::max_element(v.begin(), mid)) / 2.0;
    }
    return m;
  };
  auto ambiguous = [](double gap, double med) {
    return OrderingAmbiguousError("recover_order: nearest unused neighbour at distance " + std::to_string(gap) +
                                  " exceeds " + std::to_string(kAdjacencyGapFactor) +
                                  " x the median adjacent gap " + std::to_string(med));
  };

  const std::size_t start = static_cast<std::size_t>(
      std::min_element(points.begin(), points.end()) - points.begin());
  std::vector<std::size_t> front;  // y_{-1}, y_{-2}, ...
  std::vector<std::size_t> back{start};  // y_0, y_1, ...
  used[start] = true;
  std::vector<double> gaps;

  {
    const auto [first, d] = nearest_unused(start);
    back.push_back(first);
    used[first] = true;
    gaps.push_back(d);
  }
  while (front.size() + back.size() < n) {
    const std::size_t head = front.empty() ? back.front() : front.back();
    const std::size_t tail = back.back();
    const auto [cand_head, d_head] = nearest_unused(head);
    const auto [cand_tail, d_tail] = nearest_unused(tail);
    std::size_t chosen;
    double gap;
    if (d_head <= d_tail) {
      chosen = cand_head;
      gap = d_head;
      front.push_back(chosen);
    } else {
      chosen = cand_tail;
      gap = d_tail;
      back.push_back(chosen);
    }
    used[chosen] = true;
    if (gaps.size() >= 2) {
      const double med = median(gaps);
      if (gap > kAdjacencyGapFactor * med) {
        throw ambiguous(gap, med);
      }
    }
    gaps.push_back(gap);
  }

  std::vector<std::size_t> order(front.rbegin(), front.rend());
  order.insert(order.end(), back.begin(), back.end());

  // The running check cannot see a bad gap accepted before the median existed.
  std::vector<double> adjacent(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    adjacent[i] = distance(points[order[i]], points[order[i + 1]]);
  }
  const double med = median(adjacent);
  for (double g : adjacent) {
    if (g > kAdjacencyGapFactor * med) {
      throw ambiguous(g, med);
    }
  }
  return order;
}

/// The grid row with the median second index, x^{1,m}, ..., x^{n,m}, m = floor((n+1)/2),
/// as a curve design.
inline CurveDesign lattice_subset_curve(const LatticeDesign& design) {
  const std::size_t n = design.side();
  if (n < 5) {
    throw DesignError("lattice_subset_curve: need side count n >= 5, got " + std::to_string(n));
  }
  const std::size_t m = (n + 1) / 2;
  std::vector<Point> row(n);
  for (std::size_t i1 = 0; i1 < n; ++i1) {
    row[i1] = design.at(i1, m - 1);
  }
  return CurveDesign(std::move(row));
}

// The simulation designs used in the experiments.
namespace experiment_designs {

/// phi(s) = s(s+1)/2 on [0, 1].
inline double line_map(double s) { return s * (s + 1.0) / 2.0; }

inline constexpr double kArcLength = std::numbers::pi / 2.0;

/// phi(s) = s(s+1)/(L+1) on [0, L], L = pi/2.
inline double arc_map(double s) { return s * (s + 1.0) / (kArcLength + 1.0); }

inline Point unit_circle(double t) { return {std::cos(t), std::sin(t)}; }

/// phi~(z) = z(z+1)/3 with z = u + i v.
inline Point lattice_map(double u, double v) {
  const std::complex<double> z(u, v);
  const std::complex<double> w = z * (z + 1.0) / 3.0;
  return {w.real(), w.imag()};
}

inline LineTransect line(std::size_t n) { return line_sites(line_map, n); }
inline CurveDesign arc(std::size_t n) { return curve_sites(unit_circle, arc_map, kArcLength, n); }
inline LatticeDesign lattice(std::size_t n) { return lattice_sites(lattice_map, n); }

}  // namespace experiment_designs

}  // namespace smoothqv
