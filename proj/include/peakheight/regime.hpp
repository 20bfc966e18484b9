#pragma once

#include <string>
#include <string_view>

#include "peakheight/errors.hpp"

namespace peakheight {

/// Whether the height-distribution formulas are established for a parameter
/// set. `proved` covers kappa <= 1 (sphere: kappa2 - kappa1 <= 1); the
/// formulas are only conjectured between that and the dimension bound
/// (3, 2, 5/3 for N = 1, 2, 3), and undefined beyond it.
enum class Validity { proved, conjectured, invalid };

inline std::string_view to_string(Validity v) {
  switch (v) {
    case Validity::proved: return "proved";
    case Validity::conjectured: return "conjectured";
    default: return "invalid";
  }
}

/// Strict upper bound on kappa^2 (Euclidean) or kappa2 - kappa1 (sphere).
inline double regime_bound(int dim) {
  switch (dim) {
    case 1: return 3.0;
    case 2: return 2.0;
    case 3: return 5.0 / 3.0;
    default: throw DomainError("dimension must be 1, 2 or 3");
  }
}

inline std::string_view regime_bound_text(int dim) {
  switch (dim) {
    case 1: return "3";
    case 2: return "2";
    default: return "5/3";
  }
}

// Shape parameter `s` (kappa^2, or kappa2 - kappa1) against the regime limits.
inline Validity classify_regime(int dim, double s) {
  // Slack absorbs the rounding of parameters reconstructed from derivatives.
  constexpr double kBoundarySlack = 1e-12;
  if (s <= 1.0 + kBoundarySlack) return Validity::proved;
  if (s < regime_bound(dim)) return Validity::conjectured;
  return Validity::invalid;
}

}  // namespace peakheight
