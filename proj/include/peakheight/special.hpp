#pragma once

// Scalar special functions: standard normal density and distribution, the
// centered bivariate normal distribution with general covariance, the
// incomplete Gaussian integral G_gamma(x) = int_{-inf}^x exp(-gamma t^2) dt and
// the gamma function.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "peakheight/errors.hpp"
#include "peakheight/quadrature.hpp"

namespace peakheight {

inline double std_normal_pdf(double x) {
  if (!std::isfinite(x)) throw DomainError("std_normal_pdf: argument must be finite");
  return std::numbers::inv_sqrtpi / std::numbers::sqrt2 * std::exp(-0.5 * x * x);
}

/// Phi(x) = P(X <= x). Accepts +-inf.
inline double std_normal_cdf(double x) {
  if (std::isnan(x)) throw DomainError("std_normal_cdf: NaN argument");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

/// 2x2 symmetric positive-definite covariance matrix.
class Cov2 {
 public:
  /// Matrices with s11*s22 - s12^2 < kSingularTolerance * s11*s22 are rejected.
  static constexpr double kSingularTolerance = 1e-12;

  Cov2(double s11, double s12, double s22) : s11_(s11), s12_(s12), s22_(s22) {
    if (!std::isfinite(s11) || !std::isfinite(s12) || !std::isfinite(s22))
      throw DomainError("Cov2: entries must be finite");
    if (s11 <= 0.0 || s22 <= 0.0) throw DomainError("Cov2: variances must be positive");
    if (determinant() < kSingularTolerance * s11 * s22)
      throw DomainError("Cov2: matrix is not positive definite (determinant " +
                        std::to_string(determinant()) + ")");
  }

  static Cov2 identity() { return {1.0, 0.0, 1.0}; }

  double s11() const noexcept { return s11_; }
  double s12() const noexcept { return s12_; }
  double s22() const noexcept { return s22_; }
  double determinant() const noexcept { return s11_ * s22_ - s12_ * s12_; }
  double correlation() const noexcept { return s12_ / std::sqrt(s11_ * s22_); }

 private:
  double s11_;
  double s12_;
  double s22_;
};

namespace detail {

// P(X1 <= h, X2 <= k) for standard margins with correlation r, computed as
// int_{-inf}^h phi(t) Phi((k - r t) / sqrt(1 - r^2)) dt.
inline double std_bivariate_normal_cdf(double h, double k, double r) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (h == -inf || k == -inf) return 0.0;
  if (h == inf) return std_normal_cdf(k);
  if (k == inf) return std_normal_cdf(h);
  if (r == 0.0) return std_normal_cdf(h) * std_normal_cdf(k);
  // Integrate over the smaller of the two margins to keep the range short.
  if (k < h) std::swap(h, k);
  const double cond_sd = std::sqrt((1.0 - r) * (1.0 + r));
  auto integrand = [&](double t) {
    return std::exp(-0.5 * t * t) * std_normal_cdf((k - r * t) / cond_sd);
  };
  // phi below -12 carries less than 2e-33 of probability mass.
  const double lo = std::min(-12.0, h - 10.0);
  quadrature::Options opt;
  opt.rel_tol = 1e-13;
  opt.abs_tol = 1e-16;
  const double value =
      quadrature::integrate_checked(integrand, lo, h, opt, "bivariate_normal_cdf");
  return std::clamp(value * std::numbers::inv_sqrtpi / std::numbers::sqrt2, 0.0, 1.0);
}

}  // namespace detail

/// Centered bivariate normal orthant probability P(X1 <= x1, X2 <= x2).
inline double bivariate_normal_cdf(const Cov2& cov, double x1, double x2) {
  if (std::isnan(x1) || std::isnan(x2)) throw DomainError("bivariate_normal_cdf: NaN argument");
  return detail::std_bivariate_normal_cdf(x1 / std::sqrt(cov.s11()), x2 / std::sqrt(cov.s22()),
                                          cov.correlation());
}

/// G_gamma(x) = int_{-inf}^x exp(-gamma t^2) dt = sqrt(pi/gamma) Phi(sqrt(2 gamma) x).
inline double gaussian_incomplete_integral(double gamma, double x) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw DomainError("gaussian_incomplete_integral: gamma must be positive and finite");
  if (std::isnan(x)) throw DomainError("gaussian_incomplete_integral: NaN argument");
  return std::sqrt(std::numbers::pi / gamma) * std_normal_cdf(std::sqrt(2.0 * gamma) * x);
}

inline double gamma_function(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("gamma_function: argument must be positive");
  return std::tgamma(z);
}

}  // namespace peakheight
