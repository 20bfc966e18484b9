#pragma once

// Peak statistics of centered, unit-variance isotropic Gaussian fields on R^N,
// N = 1, 2, 3, with covariance E{f(t) f(s)} = rho(|t - s|^2). Everything
// depends on the field only through rho'(0) < 0 and rho''(0) > 0, and the
// height distribution only through kappa = -rho'(0) / sqrt(rho''(0)).

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "peakheight/errors.hpp"
#include "peakheight/exceedance.hpp"
#include "peakheight/regime.hpp"
#include "peakheight/special.hpp"

namespace peakheight {

class EuclideanModel {
 public:
  /// rho1 = rho'(0) <= 0, rho2 = rho''(0) > 0. rho1 = 0 is the kappa -> 0
  /// limit field; its height density is the standard normal density.
  EuclideanModel(int dim, double rho1, double rho2) : dim_(dim), rho1_(rho1), rho2_(rho2) {
    if (dim < 1 || dim > 3) throw DomainError("EuclideanModel: dim must be 1, 2 or 3");
    if (!std::isfinite(rho1) || !std::isfinite(rho2))
      throw DomainError("EuclideanModel: rho' and rho'' must be finite");
    if (rho1 > 0.0) throw DomainError("EuclideanModel: rho'(0) must be negative");
    if (!(rho2 > 0.0)) throw DomainError("EuclideanModel: rho''(0) must be positive");
  }

  /// Density-only parameterization with rho' = -kappa, rho'' = 1.
  static EuclideanModel from_kappa(int dim, double kappa) {
    if (!std::isfinite(kappa) || kappa < 0.0) throw DomainError("EuclideanModel: kappa must be >= 0");
    return {dim, -kappa, 1.0};
  }

  int dim() const noexcept { return dim_; }
  double rho1() const noexcept { return rho1_; }
  double rho2() const noexcept { return rho2_; }
  double kappa() const noexcept { return -rho1_ / std::sqrt(rho2_); }
  double kappa_squared() const noexcept { return rho1_ * rho1_ / rho2_; }

  Validity validity() const { return classify_regime(dim_, kappa_squared()); }

  /// Throws DomainError naming the violated bound when the model is invalid.
  void require_valid() const {
    if (validity() != Validity::invalid) return;
    std::ostringstream msg;
    msg << "kappa^2 = " << kappa_squared() << " violates kappa^2 < " << regime_bound_text(dim_)
        << " required for N=" << dim_;
    throw DomainError(msg.str());
  }

 private:
  int dim_;
  double rho1_;
  double rho2_;
};

/// Expected number of local maxima in the unit cube (0,1)^N.
inline double expected_maxima_euclidean(const EuclideanModel& m) {
  m.require_valid();
  if (m.rho1() == 0.0) throw DomainError("expected_maxima_euclidean: requires rho'(0) < 0");
  const double ratio = -m.rho2() / m.rho1();
  using std::numbers::pi;
  switch (m.dim()) {
    case 1: return std::sqrt(6.0) / (2.0 * pi) * std::sqrt(ratio);
    case 2: return ratio / (std::sqrt(3.0) * pi);
    default: return (29.0 * std::sqrt(6.0) - 36.0) / (36.0 * pi * pi) * std::pow(ratio, 1.5);
  }
}

namespace detail {

inline double euclid_density_n1(double kappa, double x) {
  using std::exp, std::sqrt;
  using std::numbers::pi;
  const double k2 = kappa * kappa;
  const double s = 3.0 - k2;
  return sqrt(s) / sqrt(6.0 * pi) * exp(-3.0 * x * x / (2.0 * s)) +
         2.0 * kappa * x * sqrt(pi) / sqrt(6.0) * std_normal_pdf(x) * std_normal_cdf(kappa * x / sqrt(s));
}

inline double euclid_density_n2(double kappa, double x) {
  using std::exp, std::sqrt;
  using std::numbers::pi;
  const double k2 = kappa * kappa;
  const double s2 = 2.0 - k2;
  const double s3 = 3.0 - k2;
  return sqrt(3.0) * k2 * (x * x - 1.0) * std_normal_pdf(x) * std_normal_cdf(kappa * x / sqrt(s2)) +
         kappa * x * sqrt(3.0 * s2) / (2.0 * pi) * exp(-x * x / s2) +
         sqrt(6.0) / sqrt(pi * s3) * exp(-3.0 * x * x / (2.0 * s3)) *
             std_normal_cdf(kappa * x / sqrt(s3 * s2));
}

inline double euclid_density_n3(double kappa, double x) {
  using std::exp, std::sqrt;
  using std::numbers::pi;
  const double k2 = kappa * kappa;
  const double e = 1.0 - k2;
  const double s2 = 2.0 - k2;
  const double s3 = 3.0 - k2;
  const double s5 = 5.0 - 3.0 * k2;
  const double x2 = x * x;

  const double c1 = k2 * (e * e * e + 6.0 * e * e + 12.0 * e + 24.0) / (4.0 * s3 * s3) * x2 +
                    (2.0 * e * e * e + 3.0 * e * e + 6.0 * e) / (4.0 * s3) + 1.5;
  const double t1 = c1 * exp(-k2 * x2 / (2.0 * s3)) / sqrt(2.0 * s3) *
                    std_normal_cdf(2.0 * kappa * x / sqrt(s3 * s5));

  const double c2 = k2 * s2 / 4.0 * x2 - k2 * e / 2.0 - 1.0;
  const double t2 = c2 * exp(-k2 * x2 / (2.0 * s2)) / sqrt(2.0 * s2) * std_normal_cdf(kappa * x / sqrt(s2 * s5));

  const double c3 = 7.0 - k2 + e * (3.0 * e * e + 12.0 * e + 28.0) / (2.0 * s3);
  const double t3 = c3 * kappa * x * exp(-3.0 * k2 * x2 / (2.0 * s5)) / (4.0 * sqrt(pi) * s3 * sqrt(s5));

  double t4 = 0.0;
  const double c4 = sqrt(pi) * kappa * k2 / 4.0 * x * (x2 - 3.0);
  if (c4 != 0.0) {
    const Cov2 sigma1(1.5, -1.0, s3 / 2.0);
    const Cov2 sigma2(1.5, -0.5, s2 / 2.0);
    const double b = kappa * x / std::numbers::sqrt2;
    t4 = c4 * (bivariate_normal_cdf(sigma1, 0.0, b) + bivariate_normal_cdf(sigma2, 0.0, b));
  }
  return 144.0 * std_normal_pdf(x) / (29.0 * sqrt(6.0) - 36.0) * (t1 + t2 + t3 + t4);
}

}  // namespace detail

/// Density h(x) of the height of a local maximum.
inline double height_density_euclidean(const EuclideanModel& m, double x) {
  m.require_valid();
  if (!std::isfinite(x)) throw DomainError("height_density_euclidean: x must be finite");
  const double kappa = m.kappa();
  switch (m.dim()) {
    case 1: return detail::euclid_density_n1(kappa, x);
    case 2: return detail::euclid_density_n2(kappa, x);
    default: return detail::euclid_density_n3(kappa, x);
  }
}

/// F(u) = P(height of a local maximum > u).
inline double height_exceedance_euclidean(const EuclideanModel& m, double u) {
  m.require_valid();
  return detail::exceedance_from_density([&m](double x) { return height_density_euclidean(m, x); },
                                         m.dim(), u);
}

/// F evaluated along strictly increasing points; nonincreasing by construction.
inline std::vector<double> height_exceedance_curve_euclidean(const EuclideanModel& m,
                                                             std::span<const double> xs) {
  m.require_valid();
  return detail::exceedance_curve_from_density(
      [&m](double x) { return height_density_euclidean(m, x); }, m.dim(), xs);
}

/// Expected number of local maxima above u in the unit cube.
inline double expected_maxima_above_euclidean(const EuclideanModel& m, double u) {
  const double total = expected_maxima_euclidean(m);
  return height_exceedance_euclidean(m, u) * total;
}

}  // namespace peakheight
