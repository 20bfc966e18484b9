#pragma once

// Empirical peak statistics from simulated Gaussian fields.
//
// Euclidean fields are drawn exactly (for the periodized covariance) on a
// torus grid by circulant embedding; circle fields by random-phase Fourier
// synthesis. Local maxima are grid points strictly above all 3^d - 1
// neighbours. Every replicate draws from its own substream of (seed,
// replicate index), so results do not depend on evaluation order.
//
// Requires linking against FFTW3.

#include <fftw3.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <numeric>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "peakheight/errors.hpp"
#include "peakheight/euclid.hpp"
#include "peakheight/sphere.hpp"

namespace peakheight {

/// One term w * exp(-alpha r^2) of a squared-exponential mixture covariance.
struct MixtureComponent {
  double weight;
  double scale;
};

/// Covariance of a simulable field: a squared-exponential mixture
/// rho(r^2) = sum w_i exp(-alpha_i r^2) on R^d, or a nonnegative cosine series
/// C(cos theta) = sum a_k cos(k theta) on the circle.
class CovarianceSpec {
 public:
  enum class Kind { gaussian_mixture, circle_fourier };

  static constexpr double kUnitVarianceTolerance = 1e-9;

  static CovarianceSpec gaussian_mixture(std::vector<MixtureComponent> components) {
    if (components.empty()) throw DomainError("CovarianceSpec: mixture needs at least one component");
    double total = 0.0;
    for (const auto& c : components) {
      if (!(c.weight > 0.0) || !std::isfinite(c.weight))
        throw DomainError("CovarianceSpec: mixture weights must be positive");
      if (!(c.scale > 0.0) || !std::isfinite(c.scale))
        throw DomainError("CovarianceSpec: mixture scales must be positive");
      total += c.weight;
    }
    if (std::abs(total - 1.0) > kUnitVarianceTolerance)
      throw DomainError("CovarianceSpec: mixture weights must sum to 1 (got " + std::to_string(total) + ")");
    CovarianceSpec s;
    s.kind_ = Kind::gaussian_mixture;
    s.components_ = std::move(components);
    return s;
  }

  static CovarianceSpec circle_fourier(std::vector<double> coefficients) {
    double total = 0.0;
    bool curved = false;
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
      const double a = coefficients[k];
      if (!(a >= 0.0) || !std::isfinite(a))
        throw DomainError("CovarianceSpec: Fourier coefficients must be nonnegative");
      total += a;
      if (k >= 2 && a > 0.0) curved = true;
    }
    if (std::abs(total - 1.0) > kUnitVarianceTolerance)
      throw DomainError("CovarianceSpec: Fourier coefficients must sum to 1 (got " + std::to_string(total) + ")");
    if (!curved)
      throw DomainError("CovarianceSpec: degenerate Hessian, all spectral mass sits at k <= 1 so C''(1) = 0");
    CovarianceSpec s;
    s.kind_ = Kind::circle_fourier;
    s.fourier_ = std::move(coefficients);
    return s;
  }

  /// Cosine series of sum_j w_j exp(beta_j (cos theta - 1)), a mixture of
  /// von Mises-type covariances, truncated once both the tail mass and the
  /// last k^4-weighted term drop below `tail`, then renormalized.
  static CovarianceSpec von_mises_mixture(std::span<const std::pair<double, double>> weight_beta,
                                          double tail = 1e-15);

  Kind kind() const noexcept { return kind_; }
  std::span<const MixtureComponent> components() const noexcept { return components_; }
  std::span<const double> fourier() const noexcept { return fourier_; }

  // Euclidean derivatives in the squared distance.
  double rho(double r2) const {
    require(Kind::gaussian_mixture);
    double v = 0.0;
    for (const auto& c : components_) v += c.weight * std::exp(-c.scale * r2);
    return v;
  }
  double rho1() const {
    require(Kind::gaussian_mixture);
    double v = 0.0;
    for (const auto& c : components_) v -= c.weight * c.scale;
    return v;
  }
  double rho2() const {
    require(Kind::gaussian_mixture);
    double v = 0.0;
    for (const auto& c : components_) v += c.weight * c.scale * c.scale;
    return v;
  }
  double kappa() const { return -rho1() / std::sqrt(rho2()); }

  // Circle derivatives in the inner-product variable: d/dt T_k(t) at t = 1 is
  // k^2 and the second derivative is k^2 (k^2 - 1) / 3.
  double c1() const {
    require(Kind::circle_fourier);
    double v = 0.0;
    for (std::size_t k = 0; k < fourier_.size(); ++k) v += fourier_[k] * static_cast<double>(k * k);
    return v;
  }
  double c2() const {
    require(Kind::circle_fourier);
    double v = 0.0;
    for (std::size_t k = 0; k < fourier_.size(); ++k) {
      const double k2 = static_cast<double>(k * k);
      v += fourier_[k] * k2 * (k2 - 1.0) / 3.0;
    }
    return v;
  }

  /// Variance of a first partial derivative of the field.
  double gradient_variance() const { return kind_ == Kind::gaussian_mixture ? -2.0 * rho1() : c1(); }

  EuclideanModel euclidean_model(int dim) const { return {dim, rho1(), rho2()}; }
  SphereModel circle_model() const { return {1, c1(), c2()}; }

 private:
  void require(Kind k) const {
    if (kind_ != k) throw DomainError("CovarianceSpec: operation does not apply to this covariance kind");
  }

  Kind kind_ = Kind::gaussian_mixture;
  std::vector<MixtureComponent> components_;
  std::vector<double> fourier_;
};

struct GridConfig {
  int points_per_side;
  double side_length;  // ignored on the circle, whose length is 2 pi
};

/// A field sampled on a periodic grid with `points_per_side^dim` points,
/// stored with the first coordinate varying fastest.
struct GriddedField {
  int dim = 1;
  int points_per_side = 0;
  double spacing = 0.0;
  std::vector<double> values;

  double at(std::array<int, 3> idx) const {
    std::size_t flat = 0;
    for (int d = dim; d-- > 0;) flat = flat * static_cast<std::size_t>(points_per_side) + static_cast<std::size_t>(idx[d]);
    return values[flat];
  }
};

struct LocalMaximum {
  std::array<int, 3> location{};
  double height = 0.0;
};

struct MaximaScan {
  std::vector<LocalMaximum> maxima;
  /// Points that were >= all neighbours but equal to at least one of them.
  std::size_t ties = 0;
};

/// Pooled outcome of repeated simulation.
struct SimResult {
  std::size_t replicate_count = 0;
  double region_volume = 0.0;
  std::vector<double> maxima_heights;
  std::vector<std::size_t> maxima_count_per_replicate;
  std::uint64_t seed = 0;
  std::size_t excluded_ties = 0;

  /// Mean number of maxima per unit volume.
  double mean_rate() const {
    if (maxima_count_per_replicate.empty()) return 0.0;
    const double total = std::accumulate(maxima_count_per_replicate.begin(), maxima_count_per_replicate.end(), 0.0);
    return total / static_cast<double>(maxima_count_per_replicate.size()) / region_volume;
  }

  /// Standard error of mean_rate() across replicates.
  double rate_standard_error() const {
    const std::size_t r = maxima_count_per_replicate.size();
    if (r < 2) return 0.0;
    const double mean = mean_rate() * region_volume;
    double ss = 0.0;
    for (auto c : maxima_count_per_replicate) ss += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
    return std::sqrt(ss / static_cast<double>(r - 1) / static_cast<double>(r)) / region_volume;
  }

  /// Fraction of pooled maxima with height > u.
  double empirical_exceedance(double u) const {
    if (maxima_heights.empty()) return 0.0;
    const auto above = std::count_if(maxima_heights.begin(), maxima_heights.end(), [u](double h) { return h > u; });
    return static_cast<double>(above) / static_cast<double>(maxima_heights.size());
  }

  /// Standard error of empirical_exceedance(u), treating replicates as the
  /// independent units (ratio estimator, delta method).
  double empirical_exceedance_standard_error(double u) const {
    const std::size_t r = maxima_count_per_replicate.size();
    if (r < 2 || maxima_heights.empty()) return 0.0;
    const double p = empirical_exceedance(u);
    double ss = 0.0;
    std::size_t offset = 0;
    for (auto count : maxima_count_per_replicate) {
      double above = 0.0;
      for (std::size_t i = offset; i < offset + count; ++i) above += maxima_heights[i] > u ? 1.0 : 0.0;
      const double e = above - p * static_cast<double>(count);
      ss += e * e;
      offset += count;
    }
    const double mean_count = static_cast<double>(maxima_heights.size()) / static_cast<double>(r);
    return std::sqrt(ss / static_cast<double>(r - 1) / static_cast<double>(r)) / mean_count;
  }
};

namespace detail {

struct FftwFree {
  void operator()(fftw_complex* p) const noexcept { fftw_free(p); }
};
struct FftwPlanDestroy {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex, FftwFree>;
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDestroy>;

inline FftwBuffer make_fftw_buffer(std::size_t n) {
  auto* p = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (p == nullptr) throw std::bad_alloc();
  return FftwBuffer(p);
}

// In-place transform over a cube of side n in `dim` dimensions.
inline FftwPlan make_cube_plan(int dim, int n, fftw_complex* data, int sign) {
  std::array<int, 3> dims{n, n, n};
  fftw_plan p = fftw_plan_dft(dim, dims.data(), data, data, sign, FFTW_ESTIMATE);
  if (p == nullptr) throw DomainError("fftw: could not create plan");
  return FftwPlan(p);
}

inline std::mt19937_64 substream(std::uint64_t seed, std::uint64_t replicate) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(replicate), static_cast<std::uint32_t>(replicate >> 32),
                    0x70656bu};
  return std::mt19937_64(seq);
}

inline std::size_t grid_size(int dim, int n) {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(n);
  return total;
}

inline void check_resolution(double spacing, double gradient_variance) {
  const double max_spacing = 0.2 / std::sqrt(gradient_variance);
  if (spacing > max_spacing)
    throw DomainError("simulation grid too coarse: spacing " + std::to_string(spacing) + " exceeds " +
                      std::to_string(max_spacing) + " (about 5 points per correlation length required)");
}

}  // namespace detail

inline CovarianceSpec CovarianceSpec::von_mises_mixture(std::span<const std::pair<double, double>> weight_beta,
                                                       double tail) {
  if (weight_beta.empty()) throw DomainError("von_mises_mixture: needs at least one component");
  double weight_sum = 0.0;
  double beta_max = 0.0;
  for (const auto& [w, beta] : weight_beta) {
    if (!(w > 0.0) || !(beta > 0.0) || !std::isfinite(beta))
      throw DomainError("von_mises_mixture: weights and betas must be positive");
    weight_sum += w;
    beta_max = std::max(beta_max, beta);
  }
  // The periodic trapezoid rule on m points recovers a_k up to aliasing from
  // a_{m-k}, and a_k decays like exp(-k^2 / (2 beta)).
  const double bandwidth = std::sqrt(80.0 * beta_max) + 16.0;
  int m = 64;
  while (m < 4.0 * bandwidth) m *= 2;
  auto data = detail::make_fftw_buffer(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const double theta = 2.0 * std::numbers::pi * j / m;
    double g = 0.0;
    for (const auto& [w, beta] : weight_beta) g += w / weight_sum * std::exp(beta * (std::cos(theta) - 1.0));
    data.get()[j][0] = g;
    data.get()[j][1] = 0.0;
  }
  auto plan = detail::make_cube_plan(1, m, data.get(), FFTW_FORWARD);
  fftw_execute(plan.get());

  std::vector<double> coef;
  double mass = 0.0;
  for (int k = 0; k < m / 2; ++k) {
    const double a = std::max(0.0, (k == 0 ? 1.0 : 2.0) * data.get()[k][0] / m);
    coef.push_back(a);
    mass += a;
    // c2 weights the tail by k^4, so the last term must be small on that scale too.
    const double k4 = static_cast<double>(k) * k * k * k;
    if (k >= 2 && 1.0 - mass < tail && a * k4 < tail) break;
  }
  for (double& a : coef) a /= mass;
  return circle_fourier(std::move(coef));
}

/// Draws stationary Gaussian fields on a torus with the periodized covariance
/// of a squared-exponential mixture. Holds the circulant eigenvalues and FFT
/// plan so repeated draws share the set-up cost.
class TorusFieldSimulator {
 public:
  TorusFieldSimulator(const CovarianceSpec& spec, int dim, const GridConfig& grid)
      : dim_(dim), n_(grid.points_per_side), side_(grid.side_length) {
    if (spec.kind() != CovarianceSpec::Kind::gaussian_mixture)
      throw DomainError("TorusFieldSimulator: needs a squared-exponential mixture covariance");
    if (dim < 1 || dim > 3) throw DomainError("TorusFieldSimulator: dim must be 1, 2 or 3");
    if (n_ < 3) throw DomainError("TorusFieldSimulator: need at least 3 points per side");
    if (dim == 3 && n_ > 64) throw DomainError("TorusFieldSimulator: 3-d grids are capped at 64^3");
    if (!(side_ > 0.0) || !std::isfinite(side_)) throw DomainError("TorusFieldSimulator: side length must be positive");
    spacing_ = side_ / n_;
    detail::check_resolution(spacing_, spec.gradient_variance());

    total_ = detail::grid_size(dim, n_);
    buffer_ = detail::make_fftw_buffer(total_);
    plan_ = detail::make_cube_plan(dim, n_, buffer_.get(), FFTW_FORWARD);
    compute_eigenvalues(spec);
  }

  int dim() const noexcept { return dim_; }
  int points_per_side() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  double volume() const noexcept { return std::pow(side_, dim_); }

  /// Covariance of the periodized field at grid offset `offset`.
  double grid_covariance(std::array<int, 3> offset) const {
    std::size_t flat = 0;
    for (int d = dim_; d-- > 0;) {
      const int j = ((offset[d] % n_) + n_) % n_;
      flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }
    return covariance_[flat];
  }

  GriddedField sample(std::uint64_t seed, std::uint64_t replicate = 0) {
    auto rng = detail::substream(seed, replicate);
    std::normal_distribution<double> normal;
    fftw_complex* data = buffer_.get();
    for (std::size_t i = 0; i < total_; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      data[i][0] = amplitude_[i] * re;
      data[i][1] = amplitude_[i] * im;
    }
    fftw_execute(plan_.get());
    GriddedField f;
    f.dim = dim_;
    f.points_per_side = n_;
    f.spacing = spacing_;
    f.values.resize(total_);
    for (std::size_t i = 0; i < total_; ++i) f.values[i] = data[i][0];
    return f;
  }

 private:
  void compute_eigenvalues(const CovarianceSpec& spec) {
    // Periodized covariance c(j) = sum over images m of rho(|j h + m L|^2),
    // keeping every image within the radius where rho drops below 1e-18.
    double min_scale = INFINITY;
    for (const auto& c : spec.components()) min_scale = std::min(min_scale, c.scale);
    const double cutoff = std::sqrt(std::log(1e18) / min_scale);
    const int images = static_cast<int>(std::ceil(cutoff / side_)) + 1;

    std::vector<double> axis_offsets(static_cast<std::size_t>(n_));
    for (int j = 0; j < n_; ++j) axis_offsets[static_cast<std::size_t>(j)] = (j <= n_ / 2 ? j : j - n_) * spacing_;

    covariance_.assign(total_, 0.0);
    std::array<int, 3> idx{0, 0, 0};
    for (std::size_t flat = 0; flat < total_; ++flat) {
      double c = 0.0;
      std::array<int, 3> m{0, 0, 0};
      const int m_hi = images;
      auto accumulate_images = [&](auto&& self, int d, double r2) -> void {
        if (d == dim_) {
          c += spec.rho(r2);
          return;
        }
        for (m[d] = -m_hi; m[d] <= m_hi; ++m[d]) {
          const double x = axis_offsets[static_cast<std::size_t>(idx[d])] + m[d] * side_;
          self(self, d + 1, r2 + x * x);
        }
      };
      accumulate_images(accumulate_images, 0, 0.0);
      covariance_[flat] = c;
      for (int d = 0; d < dim_; ++d) {
        if (++idx[d] < n_) break;
        idx[d] = 0;
      }
    }

    fftw_complex* data = buffer_.get();
    for (std::size_t i = 0; i < total_; ++i) {
      data[i][0] = covariance_[i];
      data[i][1] = 0.0;
    }
    fftw_execute(plan_.get());
    double max_eig = 0.0;
    double min_eig = INFINITY;
    for (std::size_t i = 0; i < total_; ++i) {
      max_eig = std::max(max_eig, data[i][0]);
      min_eig = std::min(min_eig, data[i][0]);
    }
    if (min_eig < -1e-10 * max_eig)
      throw DomainError("TorusFieldSimulator: periodized covariance has negative spectral weight " +
                        std::to_string(min_eig));
    amplitude_.resize(total_);
    for (std::size_t i = 0; i < total_; ++i)
      amplitude_[i] = std::sqrt(std::max(data[i][0], 0.0) / static_cast<double>(total_));
  }

  int dim_;
  int n_;
  double side_;
  double spacing_ = 0.0;
  std::size_t total_ = 0;
  std::vector<double> covariance_;
  std::vector<double> amplitude_;
  detail::FftwBuffer buffer_;
  detail::FftwPlan plan_;
};

/// Random-phase Fourier synthesis on the circle:
/// f(theta) = sum_k sqrt(a_k) (xi_k cos k theta + eta_k sin k theta).
class CircleFieldSimulator {
 public:
  CircleFieldSimulator(const CovarianceSpec& spec, int grid_points) : n_(grid_points) {
    if (spec.kind() != CovarianceSpec::Kind::circle_fourier)
      throw DomainError("CircleFieldSimulator: needs a Fourier covariance");
    if (n_ < 3) throw DomainError("CircleFieldSimulator: need at least 3 grid points");
    const auto coef = spec.fourier();
    std::size_t highest = 0;
    for (std::size_t k = 0; k < coef.size(); ++k)
      if (coef[k] > 0.0) highest = k;
    if (2 * highest >= static_cast<std::size_t>(n_))
      throw DomainError("CircleFieldSimulator: grid_points must exceed twice the highest frequency " +
                        std::to_string(highest));
    spacing_ = 2.0 * std::numbers::pi / n_;
    detail::check_resolution(spacing_, spec.gradient_variance());
    amplitude_.assign(coef.begin(), coef.begin() + static_cast<std::ptrdiff_t>(highest + 1));
    for (double& a : amplitude_) a = std::sqrt(a);
    buffer_ = detail::make_fftw_buffer(static_cast<std::size_t>(n_));
    plan_ = detail::make_cube_plan(1, n_, buffer_.get(), FFTW_BACKWARD);
  }

  int points() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }

  GriddedField sample(std::uint64_t seed, std::uint64_t replicate = 0) {
    auto rng = detail::substream(seed, replicate);
    std::normal_distribution<double> normal;
    fftw_complex* data = buffer_.get();
    for (int i = 0; i < n_; ++i) data[i][0] = data[i][1] = 0.0;
    for (std::size_t k = 0; k < amplitude_.size(); ++k) {
      const double xi = normal(rng);
      const double eta = normal(rng);
      data[k][0] = amplitude_[k] * xi;
      data[k][1] = k == 0 ? 0.0 : -amplitude_[k] * eta;
    }
    fftw_execute(plan_.get());
    GriddedField f;
    f.dim = 1;
    f.points_per_side = n_;
    f.spacing = spacing_;
    f.values.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) f.values[static_cast<std::size_t>(i)] = data[i][0];
    return f;
  }

 private:
  int n_;
  double spacing_ = 0.0;
  std::vector<double> amplitude_;
  detail::FftwBuffer buffer_;
  detail::FftwPlan plan_;
};

inline GriddedField simulate_field_euclidean(const CovarianceSpec& spec, int dim, int grid_points_per_side,
                                             double side_length, std::uint64_t seed) {
  TorusFieldSimulator sim(spec, dim, {grid_points_per_side, side_length});
  return sim.sample(seed);
}

inline GriddedField simulate_circle_field(const CovarianceSpec& spec, int grid_points, std::uint64_t seed) {
  CircleFieldSimulator sim(spec, grid_points);
  return sim.sample(seed);
}

/// Grid points strictly greater than all 3^dim - 1 periodic neighbours.
inline MaximaScan extract_local_maxima(const GriddedField& field) {
  if (field.dim < 1 || field.dim > 3) throw DomainError("extract_local_maxima: dim must be 1, 2 or 3");
  const int n = field.points_per_side;
  if (n < 3) throw DomainError("extract_local_maxima: need at least 3 points per side");
  if (field.values.size() != detail::grid_size(field.dim, n))
    throw DomainError("extract_local_maxima: value count does not match the grid");

  // Flat-index strides of the neighbour offsets, excluding the centre.
  std::vector<std::array<int, 3>> offsets;
  for (int dz = (field.dim > 2 ? -1 : 0); dz <= (field.dim > 2 ? 1 : 0); ++dz)
    for (int dy = (field.dim > 1 ? -1 : 0); dy <= (field.dim > 1 ? 1 : 0); ++dy)
      for (int dx = -1; dx <= 1; ++dx)
        if (dx != 0 || dy != 0 || dz != 0) offsets.push_back({dx, dy, dz});

  MaximaScan scan;
  std::array<int, 3> idx{0, 0, 0};
  const std::size_t total = field.values.size();
  const auto wrap = [n](int i) { return i < 0 ? i + n : (i >= n ? i - n : i); };
  for (std::size_t flat = 0; flat < total; ++flat) {
    const double v = field.values[flat];
    bool is_max = true;
    bool tied = false;
    for (const auto& o : offsets) {
      const std::array<int, 3> nb{wrap(idx[0] + o[0]), wrap(idx[1] + o[1]), wrap(idx[2] + o[2])};
      const double w = field.at(nb);
      if (w > v) {
        is_max = false;
        break;
      }
      if (w == v) tied = true;
    }
    if (is_max) {
      if (tied) {
        ++scan.ties;
      } else {
        scan.maxima.push_back({idx, v});
      }
    }
    for (int d = 0; d < field.dim; ++d) {
      if (++idx[d] < n) break;
      idx[d] = 0;
    }
  }
  return scan;
}

/// Simulates `replicates` independent fields and pools their local maxima.
/// For circle covariances `dim` must be 1 and `grid.side_length` is ignored.
inline SimResult estimate_peak_statistics(const CovarianceSpec& spec, int dim, std::size_t replicates,
                                          const GridConfig& grid, std::uint64_t seed) {
  if (replicates < 30) throw DomainError("estimate_peak_statistics: need at least 30 replicates");
  SimResult result;
  result.replicate_count = replicates;
  result.seed = seed;
  result.maxima_count_per_replicate.reserve(replicates);

  auto run = [&](auto& sim) {
    for (std::size_t r = 0; r < replicates; ++r) {
      const auto scan = extract_local_maxima(sim.sample(seed, r));
      result.maxima_count_per_replicate.push_back(scan.maxima.size());
      result.excluded_ties += scan.ties;
      for (const auto& m : scan.maxima) result.maxima_heights.push_back(m.height);
    }
  };

  if (spec.kind() == CovarianceSpec::Kind::circle_fourier) {
    if (dim != 1) throw DomainError("estimate_peak_statistics: circle fields are one-dimensional");
    CircleFieldSimulator sim(spec, grid.points_per_side);
    result.region_volume = 2.0 * std::numbers::pi;
    run(sim);
  } else {
    TorusFieldSimulator sim(spec, dim, grid);
    result.region_volume = sim.volume();
    run(sim);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Goodness of fit for pooled heights
// ---------------------------------------------------------------------------

/// sup_u |ECDF(u) - model_cdf(u)| for `sorted` heights with the model CDF
/// evaluated at each of them.
inline double ks_statistic(std::span<const double> sorted, std::span<const double> model_cdf) {
  if (sorted.size() != model_cdf.size()) throw DomainError("ks_statistic: size mismatch");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    d = std::max(d, std::abs(static_cast<double>(i + 1) / n - model_cdf[i]));
    d = std::max(d, std::abs(model_cdf[i] - static_cast<double>(i) / n));
  }
  return d;
}

namespace detail {

// sup |ECDF_a - ECDF_b| over two sorted samples.
inline double two_sample_sup_distance(std::span<const double> a, std::span<const double> b) {
  std::size_t i = 0;
  std::size_t j = 0;
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

}  // namespace detail

/// Quantile of sqrt(n*) sup|ECDF* - ECDF| under resampling of whole
/// replicates, which keeps the within-replicate dependence of pooled heights.
inline double block_bootstrap_ks_quantile(const SimResult& result, double level, std::size_t resamples,
                                          std::uint64_t seed) {
  const std::size_t r = result.maxima_count_per_replicate.size();
  if (r < 2) throw DomainError("block_bootstrap_ks_quantile: need at least two replicates");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("block_bootstrap_ks_quantile: level must lie in (0, 1)");
  std::vector<std::size_t> offsets(r + 1, 0);
  for (std::size_t i = 0; i < r; ++i) offsets[i + 1] = offsets[i] + result.maxima_count_per_replicate[i];

  std::vector<double> pooled = result.maxima_heights;
  std::sort(pooled.begin(), pooled.end());

  auto rng = detail::substream(seed, 0xb007u);
  std::uniform_int_distribution<std::size_t> pick(0, r - 1);
  std::vector<double> stats;
  stats.reserve(resamples);
  std::vector<double> sample;
  for (std::size_t b = 0; b < resamples; ++b) {
    sample.clear();
    for (std::size_t k = 0; k < r; ++k) {
      const std::size_t rep = pick(rng);
      sample.insert(sample.end(), result.maxima_heights.begin() + static_cast<std::ptrdiff_t>(offsets[rep]),
                    result.maxima_heights.begin() + static_cast<std::ptrdiff_t>(offsets[rep + 1]));
    }
    if (sample.empty()) continue;
    std::sort(sample.begin(), sample.end());
    stats.push_back(std::sqrt(static_cast<double>(sample.size())) * detail::two_sample_sup_distance(sample, pooled));
  }
  if (stats.empty()) throw DomainError("block_bootstrap_ks_quantile: no maxima to resample");
  std::sort(stats.begin(), stats.end());
  const auto pos = static_cast<std::size_t>(std::ceil(level * static_cast<double>(stats.size()))) - 1;
  return stats[std::min(pos, stats.size() - 1)];
}

}  // namespace peakheight
