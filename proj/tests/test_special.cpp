#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "peakheight/special.hpp"

using namespace peakheight;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
const double kPi = std::numbers::pi;
}  // namespace

TEST(NormalPdf, Values) {
  EXPECT_DOUBLE_EQ(std_normal_pdf(0.0), 0.3989422804014327);
  EXPECT_NEAR(std_normal_pdf(1.0), 0.24197072451914337, 1e-16);
  for (double x : {0.3, 1.7, 5.2}) EXPECT_EQ(std_normal_pdf(x), std_normal_pdf(-x));
  EXPECT_THROW(std_normal_pdf(NAN), DomainError);
}

TEST(NormalCdf, Values) {
  EXPECT_EQ(std_normal_cdf(0.0), 0.5);
  EXPECT_EQ(std_normal_cdf(kInf), 1.0);
  EXPECT_EQ(std_normal_cdf(-kInf), 0.0);
  EXPECT_NEAR(std_normal_cdf(1.0), 0.8413447460685429, 1e-16);
  EXPECT_THROW(std_normal_cdf(NAN), DomainError);
}

TEST(NormalCdf, MatchesIntegratedDensity) {
  for (double x : {-8.0, -3.0, -1.0, -0.2, 0.4, 2.0, 6.0}) {
    const double ref = oracle::gk([](double t) { return std::exp(-0.5 * t * t); }, -kInf, x, 1e-15) /
                       std::sqrt(2.0 * kPi);
    EXPECT_NEAR(std_normal_cdf(x), ref, 1e-15 + 1e-13 * ref) << x;
  }
}

TEST(NormalCdf, TailSymmetryWithoutCancellation) {
  for (double x : {0.5, 2.0, 5.0, 10.0}) {
    EXPECT_NEAR(std_normal_cdf(-x) + std_normal_cdf(x), 1.0, 2e-16);
  }
  // Lower tail keeps relative accuracy where 1 - Phi(x) would underflow.
  EXPECT_NEAR(std_normal_cdf(-10.0) / 7.619853024160527e-24, 1.0, 1e-13);
}

TEST(Cov2, RejectsInvalidMatrices) {
  EXPECT_THROW(Cov2(0.0, 0.0, 1.0), DomainError);
  EXPECT_THROW(Cov2(1.0, 0.0, -1.0), DomainError);
  EXPECT_THROW(Cov2(1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(Cov2(1.0, 1.0 - 1e-14, 1.0), DomainError);
  EXPECT_THROW(Cov2(1.0, NAN, 1.0), DomainError);
  EXPECT_NO_THROW(Cov2(1.0, 0.999999, 1.0));
  const Cov2 c(2.0, -1.0, 3.0);
  EXPECT_DOUBLE_EQ(c.determinant(), 5.0);
  EXPECT_DOUBLE_EQ(c.correlation(), -1.0 / std::sqrt(6.0));
}

TEST(BivariateNormal, IdentityQuadrant) {
  EXPECT_NEAR(bivariate_normal_cdf(Cov2::identity(), 0.0, 0.0), 0.25, 1e-15);
}

TEST(BivariateNormal, OrthantIdentity) {
  for (double r : {-0.95, -0.5, -0.2, 0.0, 0.3, 0.8, 0.99}) {
    const double expected = 0.25 + std::asin(r) / (2.0 * kPi);
    EXPECT_NEAR(bivariate_normal_cdf(Cov2(1.0, r, 1.0), 0.0, 0.0), expected, 1e-13) << r;
    // Scaling the variances leaves orthant probabilities unchanged.
    EXPECT_NEAR(bivariate_normal_cdf(Cov2(4.0, 2.0 * 0.5 * r, 0.25), 0.0, 0.0), expected, 1e-13) << r;
  }
}

TEST(BivariateNormal, MarginalizedOrthant) {
  const Cov2 sigma(1.0, -0.5, 1.0);
  EXPECT_NEAR(bivariate_normal_cdf(sigma, 0.0, kInf), 0.5, 1e-15);
  EXPECT_NEAR(bivariate_normal_cdf(sigma, 0.0, 0.0), 1.0 / 6.0, 1e-13);
  EXPECT_NEAR(bivariate_normal_cdf(sigma, 0.0, 40.0), 0.5, 1e-15);
  EXPECT_EQ(bivariate_normal_cdf(sigma, -kInf, 1.0), 0.0);
}

TEST(BivariateNormal, MonteCarloOracle) {
  // 10^7 draws; binomial standard error is below 1.6e-4.
  const double s11 = 1.5, s12 = -1.0, s22 = 2.0;
  const Cov2 cov(s11, s12, s22);
  const double x1 = 0.3, x2 = -0.2;
  std::mt19937_64 rng(20240611);
  std::normal_distribution<double> n;
  const double a = std::sqrt(s11);
  const double b = s12 / a;
  const double c = std::sqrt(s22 - b * b);
  const int draws = 10'000'000;
  int hits = 0;
  for (int i = 0; i < draws; ++i) {
    const double z1 = n(rng);
    const double z2 = n(rng);
    if (a * z1 <= x1 && b * z1 + c * z2 <= x2) ++hits;
  }
  const double p = static_cast<double>(hits) / draws;
  const double se = std::sqrt(p * (1.0 - p) / draws);
  EXPECT_NEAR(bivariate_normal_cdf(cov, x1, x2), p, 4.0 * se);
}

TEST(BivariateNormal, MatchesTwoDimensionalQuadrature) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.5, 2.5);
  std::uniform_real_distribution<double> rr(-0.9, 0.9);
  for (int i = 0; i < 10; ++i) {
    const double s11 = 0.5 + std::abs(u(rng));
    const double s22 = 0.5 + std::abs(u(rng));
    const double r = rr(rng);
    const double s12 = r * std::sqrt(s11 * s22);
    const double x1 = u(rng), x2 = u(rng);
    const double det = s11 * s22 - s12 * s12;
    auto inner = [&](double y1) {
      // P(X2 <= x2 | X1 = y1) times the X1 density, both closed forms.
      const double m = s12 / s11 * y1;
      const double sd = std::sqrt(det / s11);
      return std::exp(-0.5 * y1 * y1 / s11) / std::sqrt(2.0 * kPi * s11) * 0.5 *
             std::erfc(-(x2 - m) / (sd * std::numbers::sqrt2));
    };
    // Independent of the conditional form: integrate the joint density directly.
    auto joint = [&](double y1) {
      return oracle::gk(
          [&](double y2) {
            const double q = (s22 * y1 * y1 - 2.0 * s12 * y1 * y2 + s11 * y2 * y2) / det;
            return std::exp(-0.5 * q) / (2.0 * kPi * std::sqrt(det));
          },
          -kInf, x2, 1e-14);
    };
    const double ref = oracle::gk(joint, -kInf, x1, 1e-13);
    const double ref2 = oracle::gk(inner, -kInf, x1, 1e-14);
    EXPECT_NEAR(ref, ref2, 1e-11);
    EXPECT_NEAR(bivariate_normal_cdf(Cov2(s11, s12, s22), x1, x2), ref, 1e-11) << i;
  }
}

TEST(BivariateNormal, MonotoneAndMarginalLimit) {
  const Cov2 cov(1.5, -1.0, 2.0);
  double prev = 0.0;
  for (double x = -6.0; x <= 6.0; x += 0.25) {
    const double v = bivariate_normal_cdf(cov, x, 0.7);
    EXPECT_GE(v, prev);
    prev = v;
  }
  EXPECT_NEAR(bivariate_normal_cdf(cov, 0.4, 60.0), std_normal_cdf(0.4 / std::sqrt(1.5)), 1e-15);
}

TEST(GaussianIncomplete, Values) {
  EXPECT_NEAR(gaussian_incomplete_integral(1.0, kInf), std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(gaussian_incomplete_integral(0.5, 0.0), std::sqrt(2.0 * kPi) / 2.0, 1e-15);
  const double ref = oracle::gk([](double t) { return std::exp(-2.0 * t * t); }, -kInf, 0.7, 1e-15);
  EXPECT_NEAR(gaussian_incomplete_integral(2.0, 0.7), ref, 1e-14);
  EXPECT_NEAR(gaussian_incomplete_integral(2.0, 0.7), std::sqrt(kPi / 2.0) * std_normal_cdf(1.4), 1e-15);
  EXPECT_THROW(gaussian_incomplete_integral(0.0, 1.0), DomainError);
}

TEST(GaussianIncomplete, PhiIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> g(0.05, 8.0), x(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double gamma = g(rng), xv = x(rng);
    const double scale = std::sqrt(kPi / gamma);
    EXPECT_LE(std::abs(gaussian_incomplete_integral(gamma, xv) - scale * std_normal_cdf(std::sqrt(2.0 * gamma) * xv)),
              1e-14 * scale);
  }
}

TEST(GammaFunction, Values) {
  EXPECT_DOUBLE_EQ(gamma_function(1.0), 1.0);
  EXPECT_NEAR(gamma_function(0.5), std::sqrt(kPi), 1e-15);
  EXPECT_NEAR(gamma_function(2.5), 3.0 * std::sqrt(kPi) / 4.0, 1e-15);
  EXPECT_THROW(gamma_function(0.0), DomainError);
}

namespace {

// Identity right-hand sides, written out independently of the library.
double identity1_rhs(double a, double g, double b) {
  return kPi / std::sqrt(a * g) * std_normal_cdf(b * std::sqrt(2.0 * a * g) / std::sqrt(a + g));
}

double identity2_rhs(double a, double s, double g, double b) {
  const Cov2 sigma((s + g) / (2.0 * s * g), -1.0 / (2.0 * s), (s + a) / (2.0 * s * a));
  return std::pow(kPi, 1.5) / std::sqrt(a * s * g) * bivariate_normal_cdf(sigma, 0.0, b);
}

}  // namespace

TEST(GaussianIdentities, RandomizedTuples) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> pos(0.1, 5.0), loc(-3.0, 3.0);
  for (int i = 0; i < 20; ++i) {
    const double a = pos(rng), s = pos(rng), g = pos(rng), b = loc(rng);
    auto G = [g](double x) {
      return oracle::gk([g](double t) { return std::exp(-g * t * t); }, -kInf, x, 1e-14);
    };
    const double lhs1 = oracle::gk([&](double x) { return std::exp(-a * (x - b) * (x - b)) * G(x); }, -kInf, kInf, 1e-12);
    EXPECT_NEAR(lhs1, identity1_rhs(a, g, b), 1e-8) << i;
    auto inner = [&](double y) {
      return oracle::gk([&](double x) { return std::exp(-s * x * x) * gaussian_incomplete_integral(g, x); }, -kInf, y,
                        1e-13);
    };
    const double lhs2 =
        oracle::gk([&](double y) { return std::exp(-a * (y - b) * (y - b)) * inner(y); }, -kInf, kInf, 1e-11);
    EXPECT_NEAR(lhs2, identity2_rhs(a, s, g, b), 1e-7) << i;
  }
}

TEST(BivariateNormal, ConvergesWhereRunningErrorSumDrifts) {
  // Once reported as non-converged: the running error total met the
  // tolerance while the re-summed panels did not.
  const Cov2 cov(1.5, -1.0, 1.0);
  const double b = 3.2239298491684329;
  const double r = -1.0 / std::sqrt(1.5);
  const double ref = oracle::gk(
      [&](double t) { return std::exp(-0.5 * t * t) / std::sqrt(2.0 * kPi) * std_normal_cdf((b - r * t) / std::sqrt(1 - r * r)); },
      -kInf, 0.0, 1e-15);
  EXPECT_NEAR(bivariate_normal_cdf(cov, 0.0, b), ref, 1e-14);
}
