#pragma once

// Flat key=value covariance files for the simulate command.
//
//   # squared-exponential mixture on R^d
//   weights = 0.5, 0.5
//   scales  = 0.2, 5
//
//   # cosine series on the circle, a_0, a_1, a_2, ...
//   fourier = 0, 0, 1
//
//   # von Mises mixture on the circle, sum_j w_j exp(beta_j (cos t - 1))
//   weights = 0.5, 0.5
//   betas   = 2, 8

#include <istream>
#include <stdexcept>
#include <string>

#include "peakheight/montecarlo.hpp"

namespace peakheight::cli {

/// Malformed spec text (as opposed to a well-formed but invalid covariance).
struct SpecSyntaxError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

CovarianceSpec parse_covariance_spec(std::istream& in);
CovarianceSpec load_covariance_spec(const std::string& path);

}  // namespace peakheight::cli
