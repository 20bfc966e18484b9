#pragma once

// Globally adaptive Gauss-Kronrod (10/21 point) quadrature in the style of
// QUADPACK's QAG/QAGI drivers. Intervals are bisected in order of decreasing
// error estimate until the summed estimate meets the tolerance or the
// evaluation budget runs out.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "peakheight/errors.hpp"

namespace peakheight::quadrature {

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  std::size_t max_evaluations = 1'000'000;
};

struct Result {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

// Kronrod abscissae; odd indices are the 10-point Gauss nodes.
inline constexpr std::array<double, 11> kNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.0};

inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525462350, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double lo;
  double hi;
  double value;
  double error;
};

inline bool operator<(const Panel& a, const Panel& b) { return a.error < b.error; }

template <class F>
Panel gauss_kronrod_21(F& f, double lo, double hi) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 10> lower{};
  std::array<double, 10> upper{};
  const double f_center = f(center);
  double kronrod = f_center * kKronrodWeights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(kronrod);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kNodes[j];
    lower[j] = f(center - dx);
    upper[j] = f(center + dx);
    const double pair = lower[j] + upper[j];
    kronrod += kKronrodWeights[j] * pair;
    abs_sum += kKronrodWeights[j] * (std::abs(lower[j]) + std::abs(upper[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * kronrod;
  double asc = kKronrodWeights[10] * std::abs(f_center - mean);
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kKronrodWeights[j] * (std::abs(lower[j] - mean) + std::abs(upper[j] - mean));
  }

  const double scale = std::abs(half);
  const double result = kronrod * half;
  asc *= scale;
  abs_sum *= scale;
  double err = std::abs((kronrod - gauss) * half);
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (abs_sum > tiny / (50.0 * eps)) err = std::max(50.0 * eps * abs_sum, err);
  return {lo, hi, result, err};
}

template <class F>
Result adaptive(F& f, double lo, double hi, const Options& opt) {
  Result out;
  if (lo == hi) {
    out.converged = true;
    return out;
  }
  std::vector<Panel> heap;
  heap.push_back(gauss_kronrod_21(f, lo, hi));
  out.evaluations = 21;
  double total = heap.front().value;
  double total_err = heap.front().error;

  auto done = [&] {
    return total_err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(total));
  };
  // Re-sum from the panels to shed the drift of the running updates.
  auto resum = [&] {
    total = 0.0;
    total_err = 0.0;
    for (const auto& p : heap) {
      total += p.value;
      total_err += p.error;
    }
  };
  while (true) {
    if (done()) {
      resum();
      if (done()) break;
    }
    if (out.evaluations + 42 > opt.max_evaluations) break;
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // Interval can no longer be split in floating point.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    Panel left = gauss_kronrod_21(f, worst.lo, mid);
    Panel right = gauss_kronrod_21(f, mid, worst.hi);
    out.evaluations += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
  }
  resum();
  out.value = total;
  out.error = total_err;
  out.converged = done();
  return out;
}

}  // namespace detail

/// Integrates `f` over [lo, hi]. Either bound may be infinite; infinite
/// ranges are mapped onto (0, 1] by x = a + (1 - t) / t.
template <class F>
Result integrate(F&& f, double lo, double hi, const Options& opt = {}) {
  if (std::isnan(lo) || std::isnan(hi)) throw DomainError("quadrature: NaN integration bound");
  if (lo > hi) {
    Result r = integrate(f, hi, lo, opt);
    r.value = -r.value;
    return r;
  }
  const bool lo_inf = std::isinf(lo);
  const bool hi_inf = std::isinf(hi);
  if (!lo_inf && !hi_inf) return detail::adaptive(f, lo, hi, opt);

  if (lo_inf && hi_inf) {
    auto g = [&f](double t) {
      const double x = (1.0 - t) / t;
      const double jac = 1.0 / (t * t);
      return (f(x) + f(-x)) * jac;
    };
    return detail::adaptive(g, 0.0, 1.0, opt);
  }
  if (hi_inf) {
    auto g = [&f, lo](double t) { return f(lo + (1.0 - t) / t) / (t * t); };
    return detail::adaptive(g, 0.0, 1.0, opt);
  }
  auto g = [&f, hi](double t) { return f(hi - (1.0 - t) / t) / (t * t); };
  return detail::adaptive(g, 0.0, 1.0, opt);
}

/// As `integrate`, but raises ConvergenceError when the tolerance was not met.
template <class F>
double integrate_checked(F&& f, double lo, double hi, const Options& opt, const char* what) {
  const Result r = integrate(std::forward<F>(f), lo, hi, opt);
  if (!r.converged) throw ConvergenceError(std::string(what) + ": quadrature did not converge", r.error);
  return r.value;
}

}  // namespace peakheight::quadrature
