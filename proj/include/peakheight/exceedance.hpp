#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "peakheight/errors.hpp"
#include "peakheight/quadrature.hpp"

namespace peakheight::detail {

// Height densities decay at least like poly(x) * phi(x); beyond this radius
// the remaining mass is below 1e-28.
inline double height_window(int dim) { return 12.0 + 6.0 / std::sqrt(static_cast<double>(dim)); }

inline quadrature::Options exceedance_options() {
  quadrature::Options o;
  o.rel_tol = 1e-12;
  o.abs_tol = 1e-13;
  o.max_evaluations = 200'000;
  return o;
}

/// F(u) = int_u^inf h(x) dx for a height density h on R.
template <class Density>
double exceedance_from_density(Density&& h, int dim, double u) {
  if (std::isnan(u)) throw DomainError("exceedance: NaN threshold");
  if (u == -std::numeric_limits<double>::infinity()) return 1.0;
  const double window = height_window(dim);
  if (u >= window) return 0.0;
  const double lo = std::max(u, -window);
  const double value = quadrature::integrate_checked(h, lo, window, exceedance_options(), "exceedance");
  return std::clamp(value, 0.0, 1.0);
}

/// F at each of the strictly increasing points `xs`, accumulated from the
/// right so the result is nonincreasing by construction.
template <class Density>
std::vector<double> exceedance_curve_from_density(Density&& h, int dim, std::span<const double> xs) {
  std::vector<double> out(xs.size(), 0.0);
  if (xs.empty()) return out;
  const double window = height_window(dim);
  double acc = 0.0;
  double right = window;
  for (std::size_t i = xs.size(); i-- > 0;) {
    const double x = xs[i];
    if (x < right) {
      const double lo = std::max(x, -window);
      if (lo < right) {
        acc += quadrature::integrate_checked(h, lo, right, exceedance_options(), "exceedance");
      }
      right = lo;
    }
    out[i] = std::clamp(acc, 0.0, 1.0);
  }
  return out;
}

}  // namespace peakheight::detail
