#pragma once

// Exact simulation of zero-mean stationary Gaussian fields by dense Cholesky.
//
// Standard normals come from a counter-based stream so every replication is
// addressable on its own:
//   Philox4x32-10, key = (seed_lo, seed_hi),
//   counter = (block_lo, block_hi, rep_lo, rep_hi) for draw block = draw / 2;
//   each block yields two 64-bit words w = (x[2k+1] << 32) | x[2k],
//   u = ((w >> 11) + 0.5) * 2^-53 in (0, 1),
//   z = Phi^{-1}(u) by Wichura's AS 241 (PPND16).

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "smoothqv/covariance.hpp"
#include "smoothqv/errors.hpp"

namespace smoothqv {

class Philox4x32 {
public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static constexpr Counter generate(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
      const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }

private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Maps 64 random bits to the open unit interval on a 2^-53 lattice offset by half a step.
constexpr double uniform_from_bits(std::uint64_t w) {
  return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

/// Standard normal quantile, AS 241 (PPND16); about 1e-16 relative accuracy.
inline double normal_quantile(double p) {
  if (!(p > 0.0) || !(p < 1.0)) {
    throw DomainError("normal_quantile: p must lie in (0, 1)");
  }
  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r + 6.7265770927008700853e+4) * r +
             4.5921953931549871457e+4) * r + 1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
          1.3314166789178437745e+2) * r + 3.3871328727963666080e+0);
    const double den =
        (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r + 3.9307895800092710610e+4) * r +
             2.1213794301586595867e+4) * r + 5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
          4.2313330701600911252e+1) * r + 1.0);
    return q * num / den;
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r + 2.41780725177450611770e-1) * r +
             1.27045825245236838258e+0) * r + 3.64784832476320460504e+0) * r + 5.76949722146069140550e+0) * r +
          4.63033784615654529590e+0) * r + 1.42343711074968357734e+0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r + 1.51986665636164571966e-2) * r +
             1.48103976427480074590e-1) * r + 6.89767334985100004550e-1) * r + 1.67638483018380384940e+0) * r +
          2.05319162663775882187e+0) * r + 1.0);
    value = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 1.24266094738807843860e-3) * r +
             2.65321895265761230930e-2) * r + 2.96560571828504891230e-1) * r + 1.78482653991729133580e+0) * r +
          5.46378491116411436990e+0) * r + 6.65790464350110377720e+0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r + 1.84631831751005468180e-5) * r +
             7.86869131145613259100e-4) * r + 1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    value = num / den;
  }
  return q < 0.0 ? -value : value;
}

/// Standard normal draws addressed by (seed, replication, draw index).
class NormalStream {
public:
  NormalStream(std::uint64_t seed, std::uint64_t replication)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        rep_lo_(static_cast<std::uint32_t>(replication)),
        rep_hi_(static_cast<std::uint32_t>(replication >> 32)) {}

  std::uint64_t bits(std::uint64_t draw) const {
    const std::uint64_t block = draw / 2;
    const auto x = Philox4x32::generate(
        {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), rep_lo_, rep_hi_}, key_);
    const std::size_t k = static_cast<std::size_t>(draw % 2);
    return (std::uint64_t{x[2 * k + 1]} << 32) | x[2 * k];
  }

  double uniform(std::uint64_t draw) const { return uniform_from_bits(bits(draw)); }
  double normal(std::uint64_t draw) const { return normal_quantile(uniform(draw)); }

  std::vector<double> normals(std::size_t count) const {
    std::vector<double> z(count);
    for (std::size_t j = 0; j < count; j += 2) {
      const std::uint64_t block = j / 2;
      const auto x = Philox4x32::generate(
          {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32), rep_lo_, rep_hi_}, key_);
      z[j] = normal_quantile(uniform_from_bits((std::uint64_t{x[1]} << 32) | x[0]));
      if (j + 1 < count) {
        z[j + 1] = normal_quantile(uniform_from_bits((std::uint64_t{x[3]} << 32) | x[2]));
      }
    }
    return z;
  }

private:
  Philox4x32::Key key_;
  std::uint32_t rep_lo_;
  std::uint32_t rep_hi_;
};

inline constexpr std::array<double, 5> kJitterLadder = {0.0, 1e-12, 1e-10, 1e-8, 1e-6};
inline constexpr double kReconstructionTolerance = 1e-8;
inline constexpr std::size_t kMaxSimulationSites = 10000;

/// Immutable after factor(); safe to share between threads.
struct SamplerState {
  std::uint64_t master_seed = 0;
  DenseMatrix<double> cholesky_factor;  // lower triangular
  double jitter_used = 0.0;             // absolute, already multiplied by sigma^2
  double variance = 1.0;
  double reconstruction_error = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(cholesky_factor.rows()); }
};

/// Pivot-free Cholesky of K + jitter I over the ladder. Real selects the
/// precision of assembly and factorisation; long double is the default
/// because smooth Matern fields at a few hundred sites have eigenvalues
/// below double rounding of the diagonal.
template <typename Real = long double, RadialKernel Kernel>
SamplerState factor(const Kernel& kernel, const SiteSet& sites, std::uint64_t master_seed) {
  if (sites.size() > kMaxSimulationSites) {
    throw ConfigurationError("factor: at most " + std::to_string(kMaxSimulationSites) + " sites");
  }
  const DenseMatrix<Real> k = covariance_matrix<Real>(kernel, sites);
  const double s2 = kernel.variance();
  double last_error = 0.0;
  for (double rung : kJitterLadder) {
    DenseMatrix<Real> kj = k;
    const Real jitter = static_cast<Real>(rung) * static_cast<Real>(s2);
    kj.diagonal().array() += jitter;
    Eigen::LLT<DenseMatrix<Real>, Eigen::Lower> llt(kj);
    if (llt.info() != Eigen::Success) {
      continue;
    }
    DenseMatrix<Real> l = llt.matrixL();
    const DenseMatrix<Real> rebuilt = l.template triangularView<Eigen::Lower>() * l.transpose();
    const Real err = (rebuilt - kj).cwiseAbs().maxCoeff();
    last_error = static_cast<double>(err);
    const bool finite = l.allFinite();
    if (!finite || !(static_cast<double>(err) <= kReconstructionTolerance * s2)) {
      continue;
    }
    SamplerState state;
    state.master_seed = master_seed;
    state.cholesky_factor = l.template cast<double>();
    state.jitter_used = static_cast<double>(jitter);
    state.variance = s2;
    state.reconstruction_error = static_cast<double>(err);
    return state;
  }
  throw IllConditionedError("factor: covariance over " + std::to_string(sites.size()) +
                            " sites is not factorisable with jitter up to 1e-6 sigma^2 (last reconstruction error " +
                            std::to_string(last_error) + ")");
}

/// L z with z the replication's normal stream; the same (seed, index) always gives the same vector.
inline std::vector<double> sample(const SamplerState& state, std::uint64_t replication_index) {
  const std::size_t n = state.size();
  const auto z = NormalStream(state.master_seed, replication_index).normals(n);
  std::vector<double> x(n, 0.0);
  const auto& l = state.cholesky_factor;
  for (std::size_t i = 0; i < n; ++i) {
    long double acc = 0.0L;
    for (std::size_t j = 0; j <= i; ++j) {
      acc += static_cast<long double>(l(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) * z[j];
    }
    x[i] = static_cast<double>(acc);
  }
  return x;
}

}  // namespace smoothqv
