#pragma once

// Smoothness estimators. Every estimator minimises
//     { V_1 F(nu*) / V_2 - 1 }^2
// over a closed interval, where V_theta are the observed variations at step
// sizes theta = 1, 2 and F = f_2 / f_1 is the deterministic ratio target.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smoothqv/designs.hpp"
#include "smoothqv/errors.hpp"
#include "smoothqv/qvar.hpp"
#include "smoothqv/targets.hpp"

namespace smoothqv {

struct SearchConfig {
  double grid_step = 1e-3;
  double refine_tolerance = 1e-6;

  void validate() const {
    if (!(refine_tolerance > 0.0) || !(grid_step > refine_tolerance)) {
      throw ConfigurationError("SearchConfig: need grid_step > refine_tolerance > 0");
    }
  }
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

struct MinimizeResult {
  double nu_hat = 0.0;
  double objective = 0.0;
};

/// F tabulated on lo, lo + step, ..., hi (hi always included).
class RatioGrid {
public:
  template <typename F>
  RatioGrid(const F& ratio, Interval domain, const SearchConfig& config) : domain_(domain) {
    config.validate();
    if (!(domain.hi > domain.lo)) {
      throw ConfigurationError("RatioGrid: empty search domain");
    }
    const auto steps = static_cast<std::size_t>(std::floor((domain.hi - domain.lo) / config.grid_step + 1e-9));
    nodes_.reserve(steps + 2);
    for (std::size_t k = 0; k <= steps; ++k) {
      nodes_.push_back(domain.lo + static_cast<double>(k) * config.grid_step);
    }
    if (domain.hi - nodes_.back() > 1e-12) {
      nodes_.push_back(domain.hi);
    } else {
      nodes_.back() = domain.hi;
    }
    values_.reserve(nodes_.size());
    for (double nu : nodes_) {
      const double v = ratio(nu);
      if (!std::isfinite(v)) {
        throw DomainError("ratio F is not finite at nu* = " + std::to_string(nu));
      }
      values_.push_back(v);
    }
  }

  Interval domain() const { return domain_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }

private:
  Interval domain_;
  std::vector<double> nodes_;
  std::vector<double> values_;
};

namespace detail {

inline void check_variations(double v1, double v2) {
  if (!(v1 > 0.0) || !(v2 > 0.0) || !std::isfinite(v1) || !std::isfinite(v2)) {
    throw DegenerateDataError("estimator: variation statistics must be positive and finite (V1 = " +
                              std::to_string(v1) + ", V2 = " + std::to_string(v2) + ")");
  }
}

/// The statistic's value, or a degenerate-data error when rounding alone could explain it.
inline double usable_value(const VariationStatistic& v) {
  if (!(v.value > v.rounding_floor) || !std::isfinite(v.value)) {
    throw DegenerateDataError("estimator: V_{" + std::to_string(v.theta) + "," + std::to_string(v.ell) +
                              "} = " + std::to_string(v.value) +
                              " is zero up to rounding (the observations are annihilated by the increments)");
  }
  return v.value;
}

template <typename Objective>
double golden_section(const Objective& obj, double a, double b, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = obj(c);
  double fd = obj(d);
  while (b - a > tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = obj(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = obj(d);
    }
  }
  return (a + b) / 2.0;
}

}  // namespace detail

/// Grid scan of the tabulated F followed by golden-section refinement in the
/// bracket around the best node. Ties go to the smallest nu*.
template <typename F>
MinimizeResult minimize_ratio(double v1, double v2, const F& ratio, const RatioGrid& grid,
                              const SearchConfig& config = {}) {
  detail::check_variations(v1, v2);
  const double scale = v1 / v2;
  auto objective = [&](double nu) {
    const double value = ratio(nu);
    if (!std::isfinite(value)) {
      throw DomainError("ratio F is not finite at nu* = " + std::to_string(nu));
    }
    const double r = scale * value - 1.0;
    return r * r;
  };

  const auto& nodes = grid.nodes();
  const auto& values = grid.values();
  std::size_t best = 0;
  double best_obj = 0.0;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    const double r = scale * values[k] - 1.0;
    const double o = r * r;
    if (k == 0 || o < best_obj) {
      best = k;
      best_obj = o;
    }
  }
  MinimizeResult result{nodes[best], best_obj};
  if (nodes.size() < 2) {
    return result;
  }
  const double a = nodes[best == 0 ? 0 : best - 1];
  const double b = nodes[std::min(best + 1, nodes.size() - 1)];
  const double refined = detail::golden_section(objective, a, b, config.refine_tolerance);
  const double refined_obj = objective(refined);
  if (refined_obj < best_obj) {
    result = {refined, refined_obj};
  }
  return result;
}

/// Convenience form that tabulates F on the fly.
template <typename F>
MinimizeResult minimize_ratio(double v1, double v2, const F& ratio, Interval domain, const SearchConfig& config = {}) {
  detail::check_variations(v1, v2);
  const RatioGrid grid(ratio, domain, config);
  return minimize_ratio(v1, v2, ratio, grid, config);
}

enum class Variant { a, a0, a_final, b1, b2, b_final, c1, c2, naive };

inline const char* to_string(Variant v) {
  switch (v) {
    case Variant::a:
      return "a";
    case Variant::a0:
      return "a0";
    case Variant::a_final:
      return "aFinal";
    case Variant::b1:
      return "b1";
    case Variant::b2:
      return "b2";
    case Variant::b_final:
      return "bFinal";
    case Variant::c1:
      return "c1";
    case Variant::c2:
      return "c2";
    case Variant::naive:
      return "naive";
  }
  return "?";
}

/// One minimisation performed on the way to an estimate.
struct ComponentEstimate {
  Variant variant = Variant::a;
  int ell = 1;
  double nu_hat = 0.0;
  double objective = 0.0;
  Interval domain;
  double v1 = 0.0;
  double v2 = 0.0;
};

struct EstimateResult {
  Variant variant = Variant::a;
  double nu_hat = 0.0;
  double objective = 0.0;
  int ell_used = 1;
  std::optional<double> interval_estimate;  // the unit-interval locator of the adaptive line estimator
  std::vector<ComponentEstimate> components;
};

/// Ratio function and its tabulation over one search domain.
struct TabulatedRatio {
  RatioFunction ratio;
  RatioGrid grid;

  TabulatedRatio(RatioFunction r, Interval domain, const SearchConfig& config)
      : ratio(std::move(r)), grid(ratio, domain, config) {}

  ComponentEstimate estimate(Variant variant, double v1, double v2, const SearchConfig& config) const {
    const auto m = minimize_ratio(v1, v2, ratio, grid, config);
    return {variant, ratio.ell(), m.nu_hat, m.objective, grid.domain(), v1, v2};
  }
};

/// Line-transect estimators for 0 < nu <= M. Tabulates F_l on [0, min(M, l)]
/// for l = 1..floor(M)+2 once, so repeated estimates on the same design are cheap.
class LineEstimator {
public:
  LineEstimator(LineTransect design, double upper_bound, SearchConfig config = {})
      : design_(std::move(design)), upper_(upper_bound), config_(config) {
    config_.validate();
    if (!(upper_ > 0.0)) {
      throw ConfigurationError("line estimator: M must be positive");
    }
    max_l_ = static_cast<int>(std::floor(upper_)) + 2;
    if (max_l_ > kMaxOrder) {
      throw ConfigurationError("line estimator: M too large (need floor(M) + 2 <= 10)");
    }
    check_size(max_l_);
    for (int l = 1; l <= max_l_; ++l) {
      tables_.emplace_back(RatioFunction::line(design_, l), Interval{0.0, std::min(upper_, double(l))}, config_);
    }
  }

  const LineTransect& design() const { return design_; }
  double upper_bound() const { return upper_; }
  int max_order() const { return max_l_; }

  /// Minimiser over [0, M] of the order-l mismatch; requires M < l <= 10.
  EstimateResult fixed_ell(std::span<const double> obs, int ell) const {
    if (ell < 1 || ell > kMaxOrder) {
      throw ConfigurationError("line estimator: ell must be in 1..10");
    }
    if (!(upper_ < ell)) {
      throw ConfigurationError("line estimator: need M < ell (M = " + std::to_string(upper_) +
                               ", ell = " + std::to_string(ell) + ")");
    }
    const auto v1 = detail::usable_value(variation_line(obs, design_, 1, ell));
    const auto v2 = detail::usable_value(variation_line(obs, design_, 2, ell));
    ComponentEstimate c;
    if (ell <= max_l_) {
      c = tables_[static_cast<std::size_t>(ell - 1)].estimate(Variant::a, v1, v2, config_);
    } else {
      check_size(ell);
      const TabulatedRatio t(RatioFunction::line(design_, ell), Interval{0.0, upper_}, config_);
      c = t.estimate(Variant::a, v1, v2, config_);
    }
    return {Variant::a, c.nu_hat, c.objective, ell, std::nullopt, {c}};
  }

  /// Order-selection estimator: per-order minimisers, the unit-interval
  /// locator, then the minimiser of the smallest order l > locator + 1/4.
  EstimateResult adaptive(std::span<const double> obs) const {
    std::vector<ComponentEstimate> per_l;
    per_l.reserve(static_cast<std::size_t>(max_l_));
    for (int l = 1; l <= max_l_; ++l) {
      const auto v1 = detail::usable_value(variation_line(obs, design_, 1, l));
      const auto v2 = detail::usable_value(variation_line(obs, design_, 2, l));
      per_l.push_back(tables_[static_cast<std::size_t>(l - 1)].estimate(Variant::a, v1, v2, config_));
    }
    return combine_adaptive(std::move(per_l));
  }

  /// The selection steps applied to already computed per-order minimisers
  /// (per_l[l-1] for l = 1..floor(M)+2).
  static EstimateResult combine_adaptive(std::vector<ComponentEstimate> per_l) {
    if (per_l.size() < 2) {
      throw ConfigurationError("line estimator: need at least two orders");
    }
    std::size_t best = 0;
    double best_gap = 0.0;
    for (std::size_t l = 0; l + 1 < per_l.size(); ++l) {
      const double g = per_l[l].nu_hat - per_l[l + 1].nu_hat;
      const double sq = g * g;
      if (l == 0 || sq < best_gap) {
        best = l;
        best_gap = sq;
      }
    }
    const double locator = per_l[best].nu_hat;
    const int l_star = selected_order(locator);
    if (l_star > static_cast<int>(per_l.size())) {
      throw ConfigurationError("line estimator: selected order exceeds the computed orders");
    }
    const auto& chosen = per_l[static_cast<std::size_t>(l_star - 1)];
    EstimateResult r{Variant::a_final, chosen.nu_hat, chosen.objective, l_star, locator, std::move(per_l)};
    r.components.push_back({Variant::a0, r.components[best].ell, locator, r.components[best].objective,
                            r.components[best].domain, r.components[best].v1, r.components[best].v2});
    return r;
  }

  /// Smallest integer l with l > locator + 1/4.
  static int selected_order(double locator) { return static_cast<int>(std::floor(locator + 0.25)) + 1; }

private:
  void check_size(int ell) const {
    const std::size_t need = static_cast<std::size_t>(4 * ell + 2);
    if (design_.size() < need) {
      throw ConfigurationError("line estimator: order " + std::to_string(ell) + " needs n >= " +
                               std::to_string(need) + ", got " + std::to_string(design_.size()));
    }
  }

  LineTransect design_;
  double upper_;
  SearchConfig config_;
  int max_l_ = 0;
  std::vector<TabulatedRatio> tables_;
};

/// Threshold of the curve rule: the second-order estimate is kept when it exceeds 3/4.
inline constexpr double kCurveSwitchThreshold = 0.75;

/// Curve estimators for nu in (0, 2): second order on [0, 2], first order on [0, 1].
class CurveEstimator {
public:
  explicit CurveEstimator(CurveDesign design, SearchConfig config = {})
      : design_(std::move(design)),
        config_(config),
        first_(check(design_, config_), Interval{0.0, 1.0}, config_),
        second_(RatioFunction::curve(design_, 2), Interval{0.0, 2.0}, config_) {}

  const CurveDesign& design() const { return design_; }

  ComponentEstimate order(std::span<const double> obs, int ell) const {
    if (ell != 1 && ell != 2) {
      throw ConfigurationError("curve estimator: ell must be 1 or 2");
    }
    const auto v1 = detail::usable_value(variation_curve(obs, design_, 1, ell));
    const auto v2 = detail::usable_value(variation_curve(obs, design_, 2, ell));
    return ell == 1 ? first_.estimate(Variant::b1, v1, v2, config_) : second_.estimate(Variant::b2, v1, v2, config_);
  }

  EstimateResult estimate(std::span<const double> obs) const {
    const auto second = order(obs, 2);
    if (second.nu_hat > kCurveSwitchThreshold) {
      return {Variant::b_final, second.nu_hat, second.objective, 2, std::nullopt, {second}};
    }
    const auto first = order(obs, 1);
    return {Variant::b_final, first.nu_hat, first.objective, 1, std::nullopt, {second, first}};
  }

private:
  static RatioFunction check(const CurveDesign& d, const SearchConfig& config) {
    config.validate();
    if (d.size() < 9) {
      throw ConfigurationError("curve estimator: need n >= 9, got " + std::to_string(d.size()));
    }
    return RatioFunction::curve(d, 1);
  }

  CurveDesign design_;
  SearchConfig config_;
  TabulatedRatio first_;
  TabulatedRatio second_;
};

/// Deformed-lattice estimators for nu in (0, 2), l in {1, 2}.
class LatticeEstimator {
public:
  explicit LatticeEstimator(LatticeDesign design, SearchConfig config = {})
      : design_(std::move(design)),
        config_(config),
        first_(check(design_, config_), Interval{0.0, 2.0}, config_),
        second_(RatioFunction::lattice(design_, 2), Interval{0.0, 2.0}, config_) {}

  const LatticeDesign& design() const { return design_; }

  EstimateResult estimate(std::span<const double> obs, int ell) const {
    if (ell != 1 && ell != 2) {
      throw ConfigurationError("lattice estimator: ell must be 1 or 2");
    }
    const auto v1 = detail::usable_value(variation_lattice(obs, design_, 1, ell));
    const auto v2 = detail::usable_value(variation_lattice(obs, design_, 2, ell));
    const auto c = (ell == 1 ? first_ : second_).estimate(ell == 1 ? Variant::c1 : Variant::c2, v1, v2, config_);
    return {c.variant, c.nu_hat, c.objective, ell, std::nullopt, {c}};
  }

private:
  static RatioFunction check(const LatticeDesign& d, const SearchConfig& config) {
    config.validate();
    if (d.side() < 5) {
      throw ConfigurationError("lattice estimator: need n >= 5");
    }
    return RatioFunction::lattice(d, 1);
  }

  LatticeDesign design_;
  SearchConfig config_;
  TabulatedRatio first_;
  TabulatedRatio second_;
};

inline EstimateResult estimate_line_fixed_ell(std::span<const double> obs, const LineTransect& design, int ell,
                                              double upper_bound, const SearchConfig& config = {}) {
  if (!(upper_bound < ell)) {
    throw ConfigurationError("estimate_line_fixed_ell: need M < ell");
  }
  if (design.size() < static_cast<std::size_t>(4 * ell + 2)) {
    throw ConfigurationError("estimate_line_fixed_ell: need n >= 4 ell + 2");
  }
  const auto v1 = detail::usable_value(variation_line(obs, design, 1, ell));
  const auto v2 = detail::usable_value(variation_line(obs, design, 2, ell));
  const TabulatedRatio t(RatioFunction::line(design, ell), Interval{0.0, upper_bound}, config);
  const auto c = t.estimate(Variant::a, v1, v2, config);
  return {Variant::a, c.nu_hat, c.objective, ell, std::nullopt, {c}};
}

inline EstimateResult estimate_line_adaptive(std::span<const double> obs, const LineTransect& design,
                                             double upper_bound, const SearchConfig& config = {}) {
  return LineEstimator(design, upper_bound, config).adaptive(obs);
}

inline EstimateResult estimate_curve(std::span<const double> obs, const CurveDesign& design,
                                     const SearchConfig& config = {}) {
  return CurveEstimator(design, config).estimate(obs);
}

inline EstimateResult estimate_lattice(std::span<const double> obs, const LatticeDesign& design, int ell,
                                       const SearchConfig& config = {}) {
  return LatticeEstimator(design, config).estimate(obs, ell);
}

/// {4 - log(V) / log(n)} / 2 for a lattice variation. Its bias decays only like 1/log(n).
inline double naive_log_estimate(const VariationStatistic& v, std::size_t n) {
  if (!(v.value > 0.0)) {
    throw DegenerateDataError("naive_log_estimate: variation must be positive");
  }
  if (n < 2) {
    throw DomainError("naive_log_estimate: need n >= 2");
  }
  return (4.0 - std::log(v.value) / std::log(static_cast<double>(n))) / 2.0;
}

}  // namespace smoothqv
