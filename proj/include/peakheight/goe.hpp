#pragma once

// Expectations over the Gaussian Orthogonal Ensemble of the form
//
//   E_GOE^{n+1} { exp[ lambda_top^2 / 2 - a (lambda_top - b)^2 ] },
//
// where lambda_top is the largest eigenvalue of an (n+1)x(n+1) GOE matrix.
// Closed forms exist for n = 1, 2, 3. A brute-force evaluator integrates the
// ordered-eigenvalue density directly and serves as an independent oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>

#include "peakheight/errors.hpp"
#include "peakheight/quadrature.hpp"
#include "peakheight/special.hpp"

namespace peakheight {

/// Parameters (n, a, b) of a GOE expectation; the ensemble has size n + 1.
struct GoeQuery {
  int n;
  double a;
  double b;

  GoeQuery(int n_, double a_, double b_) : n(n_), a(a_), b(b_) {
    if (n < 1 || n > 3) throw DomainError("GoeQuery: n must be 1, 2 or 3 (got " + std::to_string(n) + ")");
    if (!(a > 0.0) || !std::isfinite(a))
      throw DomainError("GoeQuery: a must be > 0 (got " + std::to_string(a) + ")");
    if (!std::isfinite(b)) throw DomainError("GoeQuery: b must be finite");
  }
};

/// c_n = (1/n!) (2 sqrt 2)^n prod_{i=1}^n Gamma(1 + i/2), for 1 <= n <= 8.
inline double selberg_constant(int n) {
  if (n < 1 || n > 8) throw DomainError("selberg_constant: n must lie in [1, 8]");
  double c = 1.0;
  for (int i = 1; i <= n; ++i) c *= 2.0 * std::numbers::sqrt2 * gamma_function(1.0 + 0.5 * i) / i;
  return c;
}

/// Joint density of the ordered eigenvalues of an n x n GOE matrix. Returns 0
/// outside the chamber lambda_1 <= ... <= lambda_n.
inline double goe_eigen_density(int n, std::span<const double> lambdas) {
  if (n < 1 || n > 4) throw DomainError("goe_eigen_density: n must lie in [1, 4]");
  if (lambdas.size() != static_cast<std::size_t>(n))
    throw DomainError("goe_eigen_density: expected " + std::to_string(n) + " eigenvalues, got " +
                      std::to_string(lambdas.size()));
  double sq = 0.0;
  double vandermonde = 1.0;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!std::isfinite(lambdas[i])) throw DomainError("goe_eigen_density: eigenvalues must be finite");
    if (i > 0 && lambdas[i] < lambdas[i - 1]) return 0.0;
    sq += lambdas[i] * lambdas[i];
    for (std::size_t j = 0; j < i; ++j) vandermonde *= lambdas[i] - lambdas[j];
  }
  return std::exp(-0.5 * sq) * vandermonde / selberg_constant(n);
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

namespace detail {

inline double goe_closed_n1(double a, double b) {
  using std::exp, std::sqrt;
  return sqrt(4.0 * a + 2.0) / (4.0 * a) * exp(-a * b * b / (2.0 * a + 1.0)) +
         b * sqrt(std::numbers::pi) / sqrt(2.0 * a) *
             std_normal_cdf(b * sqrt(2.0 * a) / sqrt(2.0 * a + 1.0));
}

inline double goe_closed_n2(double a, double b) {
  using std::exp, std::sqrt;
  const double b2 = b * b;
  const double t1 = (1.0 / a + 2.0 * b2 - 1.0) / sqrt(2.0 * a) *
                    std_normal_cdf(b * sqrt(2.0 * a) / sqrt(a + 1.0));
  const double t2 = b * sqrt(a + 1.0) / (sqrt(2.0 * std::numbers::pi) * a) * exp(-a * b2 / (a + 1.0));
  const double t3 = std::numbers::sqrt2 / sqrt(2.0 * a + 1.0) * exp(-a * b2 / (2.0 * a + 1.0)) *
                    std_normal_cdf(std::numbers::sqrt2 * a * b / sqrt((2.0 * a + 1.0) * (a + 1.0)));
  return t1 + t2 + t3;
}

inline double goe_closed_n3(double a, double b) {
  using std::exp, std::sqrt;
  const double b2 = b * b;
  const double a2 = a * a;
  const double p = 2.0 * a + 1.0;  // recurring factors
  const double q = a + 1.0;
  const double r = 2.0 * a + 3.0;

  const double c1 = (24.0 * a2 * a + 12.0 * a2 + 6.0 * a + 1.0) / (2.0 * a * p * p) * b2 +
                    (6.0 * a2 + 3.0 * a + 2.0) / (4.0 * a2 * p) + 1.5;
  const double t1 = c1 / sqrt(2.0 * p) * exp(-a * b2 / p) *
                    std_normal_cdf(2.0 * std::numbers::sqrt2 * a * b / sqrt(p * r));

  const double c2 = q / (2.0 * a) * b2 + (1.0 - a) / (2.0 * a2) - 1.0;
  const double t2 = c2 / sqrt(2.0 * q) * exp(-a * b2 / q) *
                    std_normal_cdf(std::numbers::sqrt2 * a * b / sqrt(q * r));

  const double c3 = 6.0 * a + 1.0 + (28.0 * a2 + 12.0 * a + 3.0) / (2.0 * a * p);
  const double t3 = c3 * b / (2.0 * sqrt(2.0 * std::numbers::pi) * p * sqrt(r)) * exp(-3.0 * a * b2 / r);

  double t4 = 0.0;
  const double c4 = (b2 + 3.0 * (1.0 - a) / (2.0 * a)) * sqrt(std::numbers::pi) * b / sqrt(2.0 * a);
  if (c4 != 0.0) {
    const Cov2 sigma1(1.5, -0.5, (1.0 + a) / (2.0 * a));
    const Cov2 sigma2(1.5, -1.0, (1.0 + 2.0 * a) / (2.0 * a));
    t4 = c4 * (bivariate_normal_cdf(sigma1, 0.0, b) + bivariate_normal_cdf(sigma2, 0.0, b));
  }
  return t1 + t2 + t3 + t4;
}

}  // namespace detail

/// Exact value of E_GOE^{n+1}{exp[lambda_top^2/2 - a (lambda_top - b)^2]}.
inline double goe_expectation_closed(const GoeQuery& q) {
  switch (q.n) {
    case 1: return detail::goe_closed_n1(q.a, q.b);
    case 2: return detail::goe_closed_n2(q.a, q.b);
    default: return detail::goe_closed_n3(q.a, q.b);
  }
}

// ---------------------------------------------------------------------------
// Quadrature oracle
// ---------------------------------------------------------------------------

struct GoeQuadratureOptions {
  /// Total budget of inner-integrand evaluations across all nesting levels.
  std::size_t max_evaluations = 400'000'000;
};

namespace detail {

// int_{-inf}^y t^k exp(-t^2/2) dt for k = 0..3, by the recurrence
// M_k = (k-1) M_{k-2} - y^{k-1} exp(-y^2/2).
inline std::array<double, 4> lower_gaussian_moments(double y) {
  const double e = std::exp(-0.5 * y * y);
  std::array<double, 4> m{};
  m[0] = std::sqrt(2.0 * std::numbers::pi) * std_normal_cdf(y);
  m[1] = -e;
  m[2] = m[0] - y * e;
  m[3] = 2.0 * m[1] - y * y * e;
  return m;
}

// int_{-inf}^y prod_k (r_k - t) exp(-t^2/2) dt, up to three roots.
inline double lower_gaussian_polynomial(std::span<const double> roots, double y) {
  std::array<double, 4> coef{1.0, 0.0, 0.0, 0.0};
  std::size_t degree = 0;
  for (double r : roots) {
    for (std::size_t i = degree + 2; i-- > 0;) coef[i] = r * coef[i] - (i > 0 ? coef[i - 1] : 0.0);
    ++degree;
  }
  const auto m = lower_gaussian_moments(y);
  double sum = 0.0;
  for (std::size_t i = 0; i <= degree; ++i) sum += coef[i] * m[i];
  return sum;
}

// Integral of the unnormalized GOE weight over the chamber
// lambda_1 <= ... <= lambda_m <= s, including the factors (s - lambda_i):
//
//   I_m(s) = int prod e^{-lambda_i^2/2} prod_{i<j} (lambda_j - lambda_i)
//                prod_i (s - lambda_i) dlambda.
//
// The innermost eigenvalue is integrated analytically through truncated
// Gaussian moments; the remaining ones by nested adaptive quadrature.
class LowerChamber {
 public:
  LowerChamber(int m, double rel_tol, const GoeQuadratureOptions& opt) : m_(m), tol_(rel_tol), opt_(opt) {}

  double operator()(double s) {
    // Below this the chamber mass is under e^{-330}.
    if (s < -26.0) return 0.0;
    switch (m_) {
      case 0: return 1.0;
      case 1: {
        const std::array<double, 1> roots{s};
        return lower_gaussian_polynomial(roots, s);
      }
      case 2: return level2(s);
      default: return level3(s);
    }
  }

  std::size_t evaluations() const noexcept { return evaluations_; }

 private:
  static double lower_limit(double s) { return std::min(-12.0, s - 8.0); }

  quadrature::Options options(double rel_tol) const {
    quadrature::Options o;
    o.rel_tol = rel_tol;
    // Outer weights are <= 1 and the expectations of interest exceed 1e-12,
    // so this floor is invisible in the final relative error.
    o.abs_tol = 1e-24 * rel_tol;
    o.max_evaluations = 200'000;
    return o;
  }

  void account(const quadrature::Result& r) {
    evaluations_ += r.evaluations;
    if (!r.converged) throw ConvergenceError("goe quadrature: inner integral did not converge", r.error);
    if (evaluations_ > opt_.max_evaluations)
      throw ConvergenceError("goe quadrature: evaluation budget exhausted", r.error);
  }

  double level2(double s) {
    auto f = [s](double l2) {
      const std::array<double, 2> roots{l2, s};
      return std::exp(-0.5 * l2 * l2) * (s - l2) * lower_gaussian_polynomial(roots, l2);
    };
    const auto r = quadrature::integrate(f, lower_limit(s), s, options(tol_));
    account(r);
    return r.value;
  }

  double level3(double s) {
    auto middle = [this, s](double l3) {
      auto inner = [s, l3](double l2) {
        const std::array<double, 3> roots{l2, l3, s};
        return std::exp(-0.5 * l2 * l2) * (s - l2) * (l3 - l2) * lower_gaussian_polynomial(roots, l2);
      };
      const auto r = quadrature::integrate(inner, lower_limit(s), l3, options(0.25 * tol_));
      account(r);
      return std::exp(-0.5 * l3 * l3) * (s - l3) * r.value;
    };
    const auto r = quadrature::integrate(middle, lower_limit(s), s, options(0.5 * tol_));
    account(r);
    return r.value;
  }

  int m_;
  double tol_;
  GoeQuadratureOptions opt_;
  std::size_t evaluations_ = 0;
};

inline void check_oracle_tolerance(double tol) {
  if (!(tol >= 1e-10 && tol <= 1e-2))
    throw DomainError("goe quadrature: tol must lie in [1e-10, 1e-2] (got " + std::to_string(tol) + ")");
}

}  // namespace detail

/// Width-normalized expectation
///
///   width^{-1} E_GOE^{n+1}{exp[lambda_top^2/2 - (lambda_top - center)^2 / width^2]},
///
/// with width^2 = width_sq >= 0, evaluated after the substitution
/// lambda_top = center + width * t, i.e. as
///
///   (1/c_{n+1}) int e^{-t^2} I_n(center + width t) dt.
///
/// The substituted form stays finite as width_sq -> 0, which is where the
/// height densities at kappa = 1 (or kappa2 - kappa1 = 1) live.
inline double goe_expectation_rescaled(int n, double width_sq, double center, double tol = 1e-9,
                                       const GoeQuadratureOptions& opt = {}) {
  if (n < 1 || n > 3) throw DomainError("goe_expectation_rescaled: n must be 1, 2 or 3");
  if (!(width_sq >= 0.0) || !std::isfinite(width_sq))
    throw DomainError("goe_expectation_rescaled: width_sq must be finite and >= 0");
  if (!std::isfinite(center)) throw DomainError("goe_expectation_rescaled: center must be finite");
  detail::check_oracle_tolerance(tol);

  const double width = std::sqrt(width_sq);
  const double inner_tol = n == 1 ? tol : 0.25 * tol;
  detail::LowerChamber chamber(n, inner_tol, opt);
  auto integrand = [&](double t) {
    if (t * t > 80.0) return 0.0;
    const double w = std::exp(-t * t);
    return w * chamber(center + width * t);
  };
  quadrature::Options o;
  o.rel_tol = 0.5 * tol;
  o.abs_tol = 1e-300;
  o.max_evaluations = 100'000;
  const auto r = quadrature::integrate(integrand, -std::numeric_limits<double>::infinity(),
                                       std::numeric_limits<double>::infinity(), o);
  if (!r.converged) throw ConvergenceError("goe quadrature: outer integral did not converge", r.error);
  return r.value / selberg_constant(n + 1);
}

/// Brute-force oracle for goe_expectation_closed: integrates the eigenvalue
/// density of the (n+1)-ensemble over the ordered chamber. Relative error <= tol.
inline double goe_expectation_quadrature(const GoeQuery& q, double tol,
                                         const GoeQuadratureOptions& opt = {}) {
  return goe_expectation_rescaled(q.n, 1.0 / q.a, q.b, tol, opt) / std::sqrt(q.a);
}

/// (1 - kappa^2)^{-1/2} E_GOE^{n+1}{exp[lambda_top^2/2 - (lambda_top - kappa x/sqrt 2)^2 / (1 - kappa^2)]},
/// continuous up to and including kappa = 1.
inline double goe_expectation_boundary(int n, double kappa_eff, double x, double tol = 1e-9,
                                       const GoeQuadratureOptions& opt = {}) {
  if (!(kappa_eff > 0.0 && kappa_eff <= 1.0))
    throw DomainError("goe_expectation_boundary: kappa_eff must lie in (0, 1]");
  if (!std::isfinite(x)) throw DomainError("goe_expectation_boundary: x must be finite");
  const double width_sq = kappa_eff == 1.0 ? 0.0 : (1.0 - kappa_eff) * (1.0 + kappa_eff);
  return goe_expectation_rescaled(n, width_sq, kappa_eff * x / std::numbers::sqrt2, tol, opt);
}

}  // namespace peakheight
