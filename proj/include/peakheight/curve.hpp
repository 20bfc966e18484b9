#pragma once

// Sampled density / exceedance curves and their CSV form.

#include <charconv>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "peakheight/errors.hpp"

namespace peakheight {

enum class Geometry { euclidean, sphere };
enum class CurveKind { density, exceedance };

inline std::string_view to_string(Geometry g) { return g == Geometry::euclidean ? "euclidean" : "sphere"; }
inline std::string_view to_string(CurveKind k) { return k == CurveKind::density ? "density" : "exceedance"; }

struct CurveTable {
  Geometry geometry = Geometry::euclidean;
  int dim = 1;
  std::map<std::string, double> params;
  std::vector<double> xs;
  std::vector<double> values;
  CurveKind kind = CurveKind::density;

  /// Throws DomainError if the table breaks its shape invariants.
  void validate() const {
    if (xs.size() != values.size()) throw DomainError("CurveTable: xs and values differ in length");
    for (std::size_t i = 1; i < xs.size(); ++i)
      if (!(xs[i] > xs[i - 1])) throw DomainError("CurveTable: xs must be strictly increasing");
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double v = values[i];
      if (!std::isfinite(v)) throw DomainError("CurveTable: non-finite value");
      if (v < 0.0) throw DomainError("CurveTable: negative value");
      if (kind == CurveKind::exceedance) {
        if (v > 1.0) throw DomainError("CurveTable: exceedance above 1");
        if (i > 0 && v > values[i - 1]) throw DomainError("CurveTable: exceedance must be nonincreasing");
      }
    }
  }
};

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: conversion failed");
  return std::string(buf, end);
}

inline void write_csv(std::ostream& os, const CurveTable& t) {
  os << "x,value\n";
  for (std::size_t i = 0; i < t.xs.size(); ++i) os << format_double(t.xs[i]) << ',' << format_double(t.values[i]) << '\n';
}

/// Parses "lo:hi:step" into lo, lo + step, ... up to hi (inclusive within
/// rounding). Throws std::invalid_argument on malformed input.
inline std::vector<double> parse_range(std::string_view text) {
  const auto c1 = text.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
  if (c2 == std::string_view::npos || text.find(':', c2 + 1) != std::string_view::npos)
    throw std::invalid_argument("range must look like lo:hi:step");
  auto number = [](std::string_view s) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v))
      throw std::invalid_argument("range: '" + std::string(s) + "' is not a finite number");
    return v;
  };
  const double lo = number(text.substr(0, c1));
  const double hi = number(text.substr(c1 + 1, c2 - c1 - 1));
  const double step = number(text.substr(c2 + 1));
  if (!(step > 0.0)) throw std::invalid_argument("range: step must be positive");
  if (hi < lo) throw std::invalid_argument("range: hi must not be below lo");
  const double count = std::floor((hi - lo) / step * (1.0 + 1e-12) + 1e-9) + 1.0;
  if (count > 1e7) throw std::invalid_argument("range: more than 10^7 points");
  std::vector<double> xs(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = lo + static_cast<double>(i) * step;
  return xs;
}

}  // namespace peakheight
