#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "peakheight/euclid.hpp"
#include "peakheight/goe.hpp"
#include "peakheight/sphere.hpp"

using namespace peakheight;

namespace {

const double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Height density as the ratio of GOE expectations from the brute-force oracle.
double density_from_goe(int n, double k1, double k2, double x, double tol) {
  const double g = 1.0 + k1 - k2;
  const double center = std::sqrt(k2) * x / std::numbers::sqrt2;
  const double num = g > 0.0 ? std::sqrt((1.0 + k1) / g) * goe_expectation_quadrature({n, 1.0 / g, center}, tol)
                             : std::sqrt(1.0 + k1) * goe_expectation_rescaled(n, 0.0, center, tol);
  return std_normal_pdf(x) * num / goe_expectation_quadrature({n, 1.0 / (1.0 + k1), 0.0}, tol);
}

constexpr std::array<std::pair<double, double>, 3> kPresetSets{{{0.1, 0.1}, {1.0, 1.0}, {1.0, 2.0}}};

}  // namespace

TEST(SphereModel, ParameterCoupling) {
  const SphereModel m(2, 3.0, 4.5);
  EXPECT_DOUBLE_EQ(m.kappa1(), 3.0 / 4.5);
  EXPECT_DOUBLE_EQ(m.kappa2(), 2.0);
  EXPECT_DOUBLE_EQ(m.kappa2(), m.c1() * m.kappa1());
  const auto k = SphereModel::from_kappas(3, 0.4, 1.1);
  EXPECT_DOUBLE_EQ(k.c1(), 1.1 / 0.4);
  EXPECT_DOUBLE_EQ(k.c2(), 1.1 / 0.16);
  EXPECT_NEAR(k.kappa1(), 0.4, 1e-15);
  EXPECT_NEAR(k.kappa2(), 1.1, 1e-15);
}

TEST(SphereModel, Validation) {
  EXPECT_THROW(SphereModel(1, 0.0, 1.0), DomainError);
  EXPECT_THROW(SphereModel(1, 1.0, -1.0), DomainError);
  EXPECT_THROW(SphereModel(4, 1.0, 1.0), DomainError);
  EXPECT_THROW(SphereModel::from_kappas(1, 0.0, 1.0), DomainError);
  EXPECT_EQ(SphereModel::from_kappas(3, 1.0, 2.0).validity(), Validity::proved);
  EXPECT_EQ(SphereModel::from_kappas(1, 1.0, 3.5).validity(), Validity::conjectured);
  EXPECT_EQ(SphereModel::from_kappas(3, 1.0, 2.7).validity(), Validity::invalid);
  try {
    height_density_sphere(SphereModel::from_kappas(2, 0.5, 3.0), 0.0);
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("kappa2 - kappa1 < 2"), std::string::npos) << e.what();
  }
}

TEST(ExpectedMaximaSphere, Examples) {
  EXPECT_NEAR(expected_maxima_sphere(SphereModel::from_kappas(1, 1.0, 0.5)), 1.0 / kPi, 1e-15);
  EXPECT_NEAR(expected_maxima_sphere(SphereModel::from_kappas(2, 1.0, 0.5)), 1.0 / (2.0 * kPi), 1e-15);
}

TEST(ExpectedMaximaSphere, PrefactorTimesGoeExpectation) {
  for (int n = 1; n <= 3; ++n) {
    for (double k1 : {0.1, 0.5, 1.0, 3.0}) {
      const auto m = SphereModel::from_kappas(n, k1, 0.5);
      const double expected = std::numbers::sqrt2 / (std::pow(kPi, 0.5 * (n + 1)) * std::pow(k1, 0.5 * n) * std::sqrt(1.0 + k1)) *
                             std::tgamma(0.5 * (n + 1)) * goe_expectation_quadrature({n, 1.0 / (1.0 + k1), 0.0}, 1e-8);
      EXPECT_LE(rel(expected_maxima_sphere(m), expected), 1e-7) << n << " " << k1;
    }
  }
}

TEST(HeightDensitySphere, Normalization) {
  for (int n = 1; n <= 3; ++n) {
    for (auto [k1, k2] : kPresetSets) {
      const auto m = SphereModel::from_kappas(n, k1, k2);
      const double mass = oracle::gk([&](double x) { return height_density_sphere(m, x); }, -14.0, 14.0, 1e-12);
      EXPECT_NEAR(mass, 1.0, 1e-6) << n << " " << k1 << " " << k2;
      for (int i = -1200; i <= 1200; ++i) ASSERT_GE(height_density_sphere(m, i * 0.01), -1e-12);
    }
  }
}

TEST(HeightDensitySphere, GaussianLimit) {
  for (double k1 : {0.2, 1.0, 4.0}) {
    // The odd term is O(sqrt(kappa2)), so the limit is taken far out.
    const auto m = SphereModel::from_kappas(1, k1, 1e-20);
    for (double x : {-2.0, 0.0, 0.7, 3.0}) EXPECT_NEAR(height_density_sphere(m, x), std_normal_pdf(x), 1e-9);
  }
  EXPECT_NEAR(height_exceedance_sphere(SphereModel::from_kappas(2, 1e-20, 1e-20), 0.0), 0.5, 1e-9);
}

TEST(HeightDensitySphere, EuclideanCorrespondence) {
  for (int n = 1; n <= 3; ++n) {
    for (double k : {0.3, 1.0}) {
      const auto s = SphereModel::from_kappas(n, 1e-12, k * k);
      const auto e = EuclideanModel::from_kappa(n, k);
      for (double x : {-1.0, 0.0, 2.0}) EXPECT_NEAR(height_density_sphere(s, x), height_density_euclidean(e, x), 1e-9);
    }
  }
}

TEST(HeightDensitySphere, RatioOfGoeExpectations) {
  for (int n = 1; n <= 3; ++n) {
    const double bound = n == 3 ? 1e-3 : 1e-6;
    const double tol = n == 3 ? 1e-6 : 1e-9;
    for (auto [k1, k2] : {std::pair{0.1, 0.1}, std::pair{1.0, 1.0}, std::pair{1.0, 2.0}, std::pair{0.5, 1.2}}) {
      for (double x : {-1.0, 0.0, 2.0}) {
        const double h = height_density_sphere(SphereModel::from_kappas(n, k1, k2), x);
        EXPECT_LE(rel(h, density_from_goe(n, k1, k2, x, tol)), bound) << n << " " << k1 << " " << k2 << " " << x;
      }
    }
  }
}

TEST(HeightDensitySphere, ContinuousAcrossTheProvedBoundary) {
  for (int n = 1; n <= 3; ++n) {
    for (double x : {-1.0, 0.0, 2.0}) {
      const double at = height_density_sphere(SphereModel::from_kappas(n, 1.0, 2.0), x);
      const double below = height_density_sphere(SphereModel::from_kappas(n, 1.0, 2.0 - 1e-7), x);
      const double above = height_density_sphere(SphereModel::from_kappas(n, 1.0, 2.0 + 1e-7), x);
      EXPECT_LE(std::abs(at - below), 1e-5);
      EXPECT_LE(std::abs(at - above), 1e-5);
    }
  }
}

TEST(HeightExceedanceSphere, Limits) {
  const auto m = SphereModel::from_kappas(3, 1.0, 2.0);
  EXPECT_EQ(height_exceedance_sphere(m, -kInf), 1.0);
  EXPECT_EQ(height_exceedance_sphere(m, kInf), 0.0);
  const double ref = oracle::gk([&](double x) { return height_density_sphere(m, x); }, 1.0, 16.0, 1e-13);
  EXPECT_NEAR(height_exceedance_sphere(m, 1.0), ref, 1e-9);
}

TEST(ExpectedMaximaAboveSphere, Composition) {
  const auto m = SphereModel::from_kappas(1, 1.0, 0.8);
  EXPECT_NEAR(expected_maxima_above_sphere(m, -kInf), expected_maxima_sphere(m), 1e-15);
  EXPECT_EQ(expected_maxima_above_sphere(m, kInf), 0.0);
  EXPECT_NEAR(expected_maxima_above_sphere(m, 1.0), height_exceedance_sphere(m, 1.0) / kPi, 1e-15);
  EXPECT_LT(expected_maxima_above_sphere(m, 40.0), 1e-300);
}

TEST(HeightExceedanceSphere, CurveMonotone) {
  for (auto [k1, k2] : kPresetSets) {
    const auto m = SphereModel::from_kappas(2, k1, k2);
    std::vector<double> xs;
    for (int i = -400; i <= 600; ++i) xs.push_back(i * 0.01);
    const auto c = height_exceedance_curve_sphere(m, xs);
    for (std::size_t i = 1; i < c.size(); ++i) ASSERT_LE(c[i], c[i - 1]);
    EXPECT_NEAR(c.front(), height_exceedance_sphere(m, xs.front()), 1e-10);
  }
}
