#pragma once

// Peak statistics of centered, unit-variance isotropic Gaussian fields on the
// unit sphere S^N, N = 1, 2, 3, with covariance C(<t, s>). The relevant
// parameters are C'(1) > 0 and C''(1) > 0 through kappa1 = C'/C'' and
// kappa2 = C'^2/C''. Counts refer to a geodesic ball of unit area.

#include <cmath>
#include <numbers>
#include <span>
#include <sstream>
#include <vector>

#include "peakheight/errors.hpp"
#include "peakheight/exceedance.hpp"
#include "peakheight/regime.hpp"
#include "peakheight/special.hpp"

namespace peakheight {

class SphereModel {
 public:
  SphereModel(int dim, double c1, double c2) : dim_(dim), c1_(c1), c2_(c2) {
    if (dim < 1 || dim > 3) throw DomainError("SphereModel: dim must be 1, 2 or 3");
    if (!std::isfinite(c1) || !std::isfinite(c2)) throw DomainError("SphereModel: C' and C'' must be finite");
    if (!(c1 > 0.0)) throw DomainError("SphereModel: C'(1) must be positive");
    if (!(c2 > 0.0)) throw DomainError("SphereModel: C''(1) must be positive");
  }

  /// Builds the model with C' = kappa2 / kappa1 and C'' = kappa2 / kappa1^2.
  static SphereModel from_kappas(int dim, double kappa1, double kappa2) {
    if (!(kappa1 > 0.0) || !std::isfinite(kappa1)) throw DomainError("SphereModel: kappa1 must be > 0");
    if (!(kappa2 > 0.0) || !std::isfinite(kappa2)) throw DomainError("SphereModel: kappa2 must be > 0");
    return {dim, kappa2 / kappa1, kappa2 / (kappa1 * kappa1)};
  }

  int dim() const noexcept { return dim_; }
  double c1() const noexcept { return c1_; }
  double c2() const noexcept { return c2_; }
  double kappa1() const noexcept { return c1_ / c2_; }
  double kappa2() const noexcept { return c1_ * c1_ / c2_; }

  Validity validity() const { return classify_regime(dim_, kappa2() - kappa1()); }

  void require_valid() const {
    if (validity() != Validity::invalid) return;
    std::ostringstream msg;
    msg << "kappa2 - kappa1 = " << kappa2() - kappa1() << " violates kappa2 - kappa1 < "
        << regime_bound_text(dim_) << " required for N=" << dim_;
    throw DomainError(msg.str());
  }

 private:
  int dim_;
  double c1_;
  double c2_;
};

/// Expected number of local maxima in a geodesic ball of unit area.
inline double expected_maxima_sphere(const SphereModel& m) {
  m.require_valid();
  using std::sqrt;
  using std::numbers::pi;
  const double k1 = m.kappa1();
  switch (m.dim()) {
    case 1: return sqrt(3.0 + k1) / (2.0 * pi * sqrt(k1));
    case 2: return 1.0 / (4.0 * pi) + 1.0 / (2.0 * pi * k1 * sqrt(3.0 + k1));
    default: {
      const double brace = 1.0 / (2.0 * sqrt(3.0 + k1)) *
                               (1.5 + (1.0 + k1) * (2.0 * k1 * k1 + 7.0 * k1 + 11.0) / (4.0 * (3.0 + k1))) +
                           (k1 - 1.0) * (k1 + 2.0) / (4.0 * sqrt(2.0 + k1));
      return brace / (pi * pi * std::pow(k1, 1.5));
    }
  }
}

namespace detail {

inline double sphere_density_n1(double k1, double k2, double x) {
  using std::exp, std::sqrt;
  using std::numbers::pi;
  const double s3 = 3.0 + k1 - k2;
  return (sqrt(s3) / sqrt(2.0 * pi) * exp(-(3.0 + k1) * x * x / (2.0 * s3)) +
          sqrt(2.0 * pi * k2) * x * std_normal_pdf(x) * std_normal_cdf(sqrt(k2) * x / sqrt(s3))) /
         sqrt(3.0 + k1);
}

inline double sphere_density_n2(double k1, double k2, double x) {
  using std::exp, std::sqrt;
  using std::numbers::pi;
  const double s2 = 2.0 + k1 - k2;
  const double s3 = 3.0 + k1 - k2;
  const double rk2 = sqrt(k2);
  const double prefactor = 2.0 * sqrt(3.0 + k1) / (2.0 + k1 * sqrt(3.0 + k1));
  const double t1 = (k1 + k2 * (x * x - 1.0)) * std_normal_pdf(x) * std_normal_cdf(rk2 * x / sqrt(s2));
  const double t2 = sqrt(k2 * s2) / (2.0 * pi) * x * exp(-(2.0 + k1) * x * x / (2.0 * s2));
  const double t3 = std::numbers::sqrt2 / sqrt(pi * s3) * exp(-(3.0 + k1) * x * x / (2.0 * s3)) *
                    std_normal_cdf(rk2 * x / sqrt(s2 * s3));
  return prefactor * (t1 + t2 + t3);
}

inline double sphere_density_n3(double k1, double k2, double x) {
  using std::exp, std::sqrt;
  using std::numbers::pi;
  const double g = 1.0 + k1 - k2;
  const double s2 = 2.0 + k1 - k2;
  const double s3 = 3.0 + k1 - k2;
  const double s5 = 5.0 + 3.0 * k1 - 3.0 * k2;
  const double rk2 = sqrt(k2);
  const double x2 = x * x;

  const double norm = 1.0 / (2.0 * sqrt(2.0 * (3.0 + k1))) *
                          (1.5 + (1.0 + k1) * (2.0 * k1 * k1 + 7.0 * k1 + 11.0) / (4.0 * (3.0 + k1))) +
                      (k1 - 1.0) * (k1 + 2.0) / (4.0 * sqrt(2.0 * (2.0 + k1)));

  const double c1 = k2 * (g * g * g + 6.0 * g * g + 12.0 * g + 24.0) / (4.0 * s3 * s3) * x2 +
                    (2.0 * g * g * g + 3.0 * g * g + 6.0 * g) / (4.0 * s3) + 1.5;
  const double t1 = c1 / sqrt(2.0 * s3) * exp(-k2 * x2 / (2.0 * s3)) *
                    std_normal_cdf(2.0 * rk2 * x / sqrt(s3 * s5));

  const double c2 = k2 * s2 / 4.0 * x2 + (k1 - k2) * g / 2.0 - 1.0;
  const double t2 = c2 / sqrt(2.0 * s2) * exp(-k2 * x2 / (2.0 * s2)) * std_normal_cdf(rk2 * x / sqrt(s2 * s5));

  const double c3 = 7.0 + k1 - k2 + (3.0 * g * g * g + 12.0 * g * g + 28.0 * g) / (2.0 * s3);
  const double t3 = c3 * rk2 / (4.0 * sqrt(pi) * s3 * sqrt(s5)) * x * exp(-3.0 * k2 * x2 / (2.0 * s5));

  double t4 = 0.0;
  const double c4 = (k2 * x2 + 3.0 * (k1 - k2)) * sqrt(pi * k2) / 4.0 * x;
  if (c4 != 0.0) {
    const Cov2 sigma1(1.5, -1.0, s3 / 2.0);
    const Cov2 sigma2(1.5, -0.5, s2 / 2.0);
    const double b = rk2 * x / std::numbers::sqrt2;
    t4 = c4 * (bivariate_normal_cdf(sigma1, 0.0, b) + bivariate_normal_cdf(sigma2, 0.0, b));
  }
  return std_normal_pdf(x) / norm * (t1 + t2 + t3 + t4);
}

}  // namespace detail

inline double height_density_sphere(const SphereModel& m, double x) {
  m.require_valid();
  if (!std::isfinite(x)) throw DomainError("height_density_sphere: x must be finite");
  const double k1 = m.kappa1();
  const double k2 = m.kappa2();
  switch (m.dim()) {
    case 1: return detail::sphere_density_n1(k1, k2, x);
    case 2: return detail::sphere_density_n2(k1, k2, x);
    default: return detail::sphere_density_n3(k1, k2, x);
  }
}

inline double height_exceedance_sphere(const SphereModel& m, double u) {
  m.require_valid();
  return detail::exceedance_from_density([&m](double x) { return height_density_sphere(m, x); }, m.dim(),
                                         u);
}

inline std::vector<double> height_exceedance_curve_sphere(const SphereModel& m, std::span<const double> xs) {
  m.require_valid();
  return detail::exceedance_curve_from_density([&m](double x) { return height_density_sphere(m, x); },
                                               m.dim(), xs);
}

inline double expected_maxima_above_sphere(const SphereModel& m, double u) {
  const double total = expected_maxima_sphere(m);
  return height_exceedance_sphere(m, u) * total;
}

}  // namespace peakheight
