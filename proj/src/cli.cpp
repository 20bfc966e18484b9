#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "peakheight/curve.hpp"
#include "peakheight/euclid.hpp"
#include "peakheight/goe.hpp"
#include "peakheight/montecarlo.hpp"
#include "peakheight/sphere.hpp"
#include "spec_file.hpp"

namespace peakheight::cli {
namespace {

using nlohmann::ordered_json;

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Flags shared by every command that describes a field.
struct ModelFlags {
  std::string geometry = "euclidean";
  int dim = 0;
  std::optional<double> kappa, rho1, rho2, kappa1, kappa2, c1, c2;

  void attach(CLI::App* cmd, bool dim_required = true) {
    cmd->add_option("--geometry", geometry, "euclidean or sphere")
        ->check(CLI::IsMember({"euclidean", "sphere"}))
        ->capture_default_str();
    auto* d = cmd->add_option("--dim", dim, "dimension N (1, 2 or 3)")->check(CLI::Range(1, 3));
    if (dim_required) d->required();
    cmd->add_option("--kappa", kappa, "Euclidean shape parameter (sets rho' = -kappa, rho'' = 1)");
    cmd->add_option("--rho1", rho1, "Euclidean rho'(0)");
    cmd->add_option("--rho2", rho2, "Euclidean rho''(0)");
    cmd->add_option("--kappa1", kappa1, "sphere C'/C''");
    cmd->add_option("--kappa2", kappa2, "sphere C'^2/C''");
    cmd->add_option("--c1", c1, "sphere C'(1)");
    cmd->add_option("--c2", c2, "sphere C''(1)");
  }
};

using Model = std::variant<EuclideanModel, SphereModel>;

struct BuiltModel {
  Model model;
  std::map<std::string, double> params;
};

BuiltModel build_model(const ModelFlags& f, bool need_scale) {
  if (f.geometry == "euclidean") {
    if (f.kappa1 || f.kappa2 || f.c1 || f.c2)
      throw UsageError("--kappa1/--kappa2/--c1/--c2 apply to --geometry sphere");
    if (f.kappa && (f.rho1 || f.rho2)) throw UsageError("give either --kappa or --rho1/--rho2, not both");
    if (f.kappa) {
      if (need_scale)
        throw UsageError("this command needs --rho1 and --rho2; --kappa fixes only the height distribution");
      return {EuclideanModel::from_kappa(f.dim, *f.kappa), {{"kappa", *f.kappa}}};
    }
    if (f.rho1 && f.rho2) return {EuclideanModel(f.dim, *f.rho1, *f.rho2), {{"rho1", *f.rho1}, {"rho2", *f.rho2}}};
    throw UsageError("euclidean geometry needs --kappa or both --rho1 and --rho2");
  }
  if (f.kappa || f.rho1 || f.rho2) throw UsageError("--kappa/--rho1/--rho2 apply to --geometry euclidean");
  if ((f.kappa1 || f.kappa2) && (f.c1 || f.c2)) throw UsageError("give either --kappa1/--kappa2 or --c1/--c2");
  if (f.kappa1 && f.kappa2)
    return {SphereModel::from_kappas(f.dim, *f.kappa1, *f.kappa2), {{"kappa1", *f.kappa1}, {"kappa2", *f.kappa2}}};
  if (f.c1 && f.c2) return {SphereModel(f.dim, *f.c1, *f.c2), {{"c1", *f.c1}, {"c2", *f.c2}}};
  throw UsageError("sphere geometry needs both --kappa1 and --kappa2, or both --c1 and --c2");
}

Validity validity_of(const Model& m) {
  return std::visit([](const auto& x) { return x.validity(); }, m);
}

void require_valid(const Model& m) {
  std::visit([](const auto& x) { x.require_valid(); }, m);
}

std::string conjectured_warning(const Model& m) {
  std::ostringstream msg;
  if (const auto* e = std::get_if<EuclideanModel>(&m)) {
    msg << "kappa^2 = " << e->kappa_squared() << " lies in the conjectured regime 1 < kappa^2 < "
        << regime_bound_text(e->dim()) << " for N=" << e->dim() << "; results are not proved there";
  } else {
    const auto& s = std::get<SphereModel>(m);
    msg << "kappa2 - kappa1 = " << s.kappa2() - s.kappa1() << " lies in the conjectured regime 1 < kappa2 - kappa1 < "
        << regime_bound_text(s.dim()) << " for N=" << s.dim() << "; results are not proved there";
  }
  return msg.str();
}

// Validates, emits the regime warning and returns the validity label.
Validity check_model(const Model& m, std::ostream& err) {
  require_valid(m);
  const Validity v = validity_of(m);
  if (v == Validity::conjectured) err << "warning: " << conjectured_warning(m) << '\n';
  return v;
}

CurveTable compute_curve(const BuiltModel& b, CurveKind kind, const std::vector<double>& xs) {
  CurveTable t;
  t.kind = kind;
  t.params = b.params;
  t.xs = xs;
  std::visit(
      [&](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        t.dim = m.dim();
        if constexpr (std::is_same_v<M, EuclideanModel>) {
          t.geometry = Geometry::euclidean;
          if (kind == CurveKind::density) {
            for (double x : xs) t.values.push_back(height_density_euclidean(m, x));
          } else {
            t.values = height_exceedance_curve_euclidean(m, xs);
          }
        } else {
          t.geometry = Geometry::sphere;
          if (kind == CurveKind::density) {
            for (double x : xs) t.values.push_back(height_density_sphere(m, x));
          } else {
            t.values = height_exceedance_curve_sphere(m, xs);
          }
        }
      },
      b.model);
  t.validate();
  return t;
}

ordered_json params_json(const std::map<std::string, double>& params) {
  ordered_json j = ordered_json::object();
  for (const auto& [k, v] : params) j[k] = v;
  return j;
}

ordered_json curve_header_json(const CurveTable& t, const Model& m) {
  ordered_json j;
  j["geometry"] = to_string(t.geometry);
  j["dim"] = t.dim;
  j["params"] = params_json(t.params);
  j["kind"] = to_string(t.kind);
  const Validity v = validity_of(m);
  j["validity"] = to_string(v);
  if (v == Validity::conjectured) j["warning"] = conjectured_warning(m);
  return j;
}

ordered_json curve_json(const CurveTable& t, const Model& m) {
  ordered_json j = curve_header_json(t, m);
  j["xs"] = t.xs;
  j["values"] = t.values;
  return j;
}

// Writes `text` to `path`, or to `out` when the path is empty.
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

std::string render_curve(const CurveTable& t, const Model& m, const std::string& format) {
  std::ostringstream os;
  if (format == "json") {
    os << curve_json(t, m).dump(2) << '\n';
  } else {
    write_csv(os, t);
  }
  return os.str();
}

struct Preset {
  std::string file_stem;
  ModelFlags flags;
};

std::vector<Preset> preset_members(const std::string& name) {
  std::vector<Preset> out;
  for (int n = 1; n <= 3; ++n) {
    if (name == "fig1") {
      for (double k : {1.0, 0.5, 0.1}) {
        Preset p;
        p.flags.dim = n;
        p.flags.kappa = k;
        p.file_stem = "fig1_N" + std::to_string(n) + "_kappa" + format_double(k);
        out.push_back(std::move(p));
      }
    } else {
      for (auto [k1, k2] : {std::pair{1.0, 2.0}, std::pair{1.0, 1.0}, std::pair{0.1, 0.1}}) {
        Preset p;
        p.flags.geometry = "sphere";
        p.flags.dim = n;
        p.flags.kappa1 = k1;
        p.flags.kappa2 = k2;
        p.file_stem = "fig2_N" + std::to_string(n) + "_kappa1_" + format_double(k1) + "_kappa2_" + format_double(k2);
        out.push_back(std::move(p));
      }
    }
  }
  return out;
}

struct CurveFlags {
  ModelFlags model;
  std::string range = "-4:4:0.01";
  std::string format = "csv";
  std::string output;
  std::string preset;
  std::string output_dir;
};

int run_curve(const CurveFlags& f, CurveKind kind, std::ostream& out, std::ostream& err) {
  const auto xs = parse_range(f.range);
  if (f.preset.empty()) {
    if (!f.output_dir.empty()) throw UsageError("--output-dir applies to --preset runs");
    if (f.model.dim == 0) throw UsageError("--dim is required");
    const auto built = build_model(f.model, false);
    check_model(built.model, err);
    emit(f.output, render_curve(compute_curve(built, kind, xs), built.model, f.format), out);
    return kOk;
  }

  if (!f.output.empty()) throw UsageError("--preset writes into --output-dir, not --output");
  const auto& m = f.model;
  if (m.dim != 0 || m.kappa || m.rho1 || m.rho2 || m.kappa1 || m.kappa2 || m.c1 || m.c2)
    throw UsageError("--preset fixes the model; drop --dim and the parameter flags");
  if (!f.output_dir.empty()) std::filesystem::create_directories(f.output_dir);

  ordered_json manifest;
  manifest["preset"] = f.preset;
  manifest["kind"] = to_string(kind);
  manifest["curves"] = ordered_json::array();
  for (const auto& p : preset_members(f.preset)) {
    const auto built = build_model(p.flags, false);
    check_model(built.model, err);
    const auto table = compute_curve(built, kind, xs);
    if (f.output_dir.empty()) {
      manifest["curves"].push_back(curve_json(table, built.model));
      continue;
    }
    const std::string file = p.file_stem + (f.format == "json" ? ".json" : ".csv");
    emit((std::filesystem::path(f.output_dir) / file).string(), render_curve(table, built.model, f.format), out);
    ordered_json entry = curve_header_json(table, built.model);
    entry["file"] = file;
    entry["points"] = table.xs.size();
    manifest["curves"].push_back(std::move(entry));
  }
  out << manifest.dump(2) << '\n';
  return kOk;
}

double expected_maxima(const Model& m) {
  return std::visit(
      [](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, EuclideanModel>) {
          return expected_maxima_euclidean(x);
        } else {
          return expected_maxima_sphere(x);
        }
      },
      m);
}

double exceedance(const Model& m, double u) {
  return std::visit(
      [u](const auto& x) {
        if constexpr (std::is_same_v<std::decay_t<decltype(x)>, EuclideanModel>) {
          return height_exceedance_euclidean(x, u);
        } else {
          return height_exceedance_sphere(x, u);
        }
      },
      m);
}

ordered_json model_report(const ModelFlags& f, const BuiltModel& b) {
  ordered_json j;
  j["geometry"] = f.geometry;
  j["dim"] = f.dim;
  j["params"] = params_json(b.params);
  const Validity v = validity_of(b.model);
  j["validity"] = to_string(v);
  if (v == Validity::conjectured) j["warning"] = conjectured_warning(b.model);
  return j;
}

int run_expected_maxima(const ModelFlags& f, std::ostream& out, std::ostream& err) {
  const auto built = build_model(f, true);
  check_model(built.model, err);
  ordered_json j = model_report(f, built);
  j["expected_maxima"] = expected_maxima(built.model);
  out << j.dump(2) << '\n';
  return kOk;
}

int run_pvalue(const ModelFlags& f, double u, std::ostream& out, std::ostream& err) {
  if (std::isnan(u)) throw UsageError("--u must be a number");
  const auto built = build_model(f, true);
  check_model(built.model, err);
  const double total = expected_maxima(built.model);
  const double tail = exceedance(built.model, u);
  ordered_json j = model_report(f, built);
  j["u"] = u;
  j["F"] = tail;
  j["expected_maxima"] = total;
  j["expected_maxima_above"] = tail * total;
  out << j.dump(2) << '\n';
  return kOk;
}

int run_goe_check(int n, double a, double b, double tol, std::ostream& out) {
  if (!(a > 0.0) || !std::isfinite(a)) throw UsageError("--a must be > 0");
  if (!std::isfinite(b)) throw UsageError("--b must be finite");
  if (!(tol >= 1e-10 && tol <= 1e-2)) throw UsageError("--tol must lie in [1e-10, 1e-2]");
  const GoeQuery q(n, a, b);
  const double closed = goe_expectation_closed(q);
  const double quad = goe_expectation_quadrature(q, tol);
  ordered_json j;
  j["n"] = n;
  j["a"] = a;
  j["b"] = b;
  j["tol"] = tol;
  j["closed"] = closed;
  j["quadrature"] = quad;
  j["abs_error"] = std::abs(closed - quad);
  j["rel_error"] = std::abs(closed - quad) / std::abs(quad);
  out << j.dump(2) << '\n';
  return kOk;
}

struct SimulateFlags {
  std::string spec_path;
  int dim = 1;
  std::size_t replicates = 200;
  std::optional<int> grid_points;
  std::optional<double> side_length;
  std::uint64_t seed = 1;
  double u = 0.0;
  std::string output;
};

// Default grids suit the default covariance; 3-D trades spacing for torus size.
GridConfig default_grid(int dim) {
  switch (dim) {
    case 1: return {1024, 100.0};
    case 2: return {256, 25.6};
    default: return {64, 12.8};
  }
}

int run_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
  if (f.replicates < 30) throw UsageError("--replicates must be at least 30");
  const CovarianceSpec spec = f.spec_path.empty() ? CovarianceSpec::gaussian_mixture({{1.0, 0.5}})
                                                  : load_covariance_spec(f.spec_path);
  const bool circle = spec.kind() == CovarianceSpec::Kind::circle_fourier;
  if (circle && f.dim != 1) throw UsageError("circle covariances simulate with --dim 1");
  if (circle && f.side_length) throw UsageError("--side-length does not apply to circle covariances");

  GridConfig grid = circle ? GridConfig{1024, 2.0 * std::numbers::pi} : default_grid(f.dim);
  if (f.grid_points) grid.points_per_side = *f.grid_points;
  if (f.side_length) grid.side_length = *f.side_length;

  const SimResult r = estimate_peak_statistics(spec, f.dim, f.replicates, grid, f.seed);

  ordered_json covariance;
  ordered_json comparison;
  double closed_rate = 0.0;
  double closed_tail = 0.0;
  if (circle) {
    covariance["kind"] = "circle_fourier";
    covariance["fourier"] = std::vector<double>(spec.fourier().begin(), spec.fourier().end());
    const SphereModel m = spec.circle_model();
    check_model(m, err);
    comparison["geometry"] = "sphere";
    comparison["params"] = {{"c1", m.c1()}, {"c2", m.c2()}, {"kappa1", m.kappa1()}, {"kappa2", m.kappa2()}};
    comparison["validity"] = to_string(m.validity());
    closed_rate = expected_maxima_sphere(m);
    closed_tail = height_exceedance_sphere(m, f.u);
  } else {
    covariance["kind"] = "gaussian_mixture";
    std::vector<double> w, s;
    for (const auto& c : spec.components()) {
      w.push_back(c.weight);
      s.push_back(c.scale);
    }
    covariance["weights"] = w;
    covariance["scales"] = s;
    const EuclideanModel m = spec.euclidean_model(f.dim);
    check_model(m, err);
    comparison["geometry"] = "euclidean";
    comparison["params"] = {{"rho1", m.rho1()}, {"rho2", m.rho2()}, {"kappa", m.kappa()}};
    comparison["validity"] = to_string(m.validity());
    closed_rate = expected_maxima_euclidean(m);
    closed_tail = height_exceedance_euclidean(m, f.u);
  }
  comparison["dim"] = f.dim;
  const double rate = r.mean_rate();
  const double rate_se = r.rate_standard_error();
  comparison["empirical_rate"] = rate;
  comparison["rate_standard_error"] = rate_se;
  comparison["closed_form_rate"] = closed_rate;
  comparison["rate_z_score"] = rate_se > 0.0 ? (rate - closed_rate) / rate_se : 0.0;
  const double tail = r.empirical_exceedance(f.u);
  const double tail_se = r.empirical_exceedance_standard_error(f.u);
  comparison["u"] = f.u;
  comparison["empirical_exceedance"] = tail;
  comparison["exceedance_standard_error"] = tail_se;
  comparison["closed_form_exceedance"] = closed_tail;
  comparison["exceedance_z_score"] = tail_se > 0.0 ? (tail - closed_tail) / tail_se : 0.0;

  ordered_json j;
  j["sim_result"] = {{"replicate_count", r.replicate_count},
                     {"region_volume", r.region_volume},
                     {"maxima_heights", r.maxima_heights},
                     {"maxima_count_per_replicate", r.maxima_count_per_replicate},
                     {"seed", r.seed}};
  j["covariance"] = covariance;
  j["grid"] = {{"points_per_side", grid.points_per_side},
               {"side_length", circle ? 2.0 * std::numbers::pi : grid.side_length},
               {"spacing", (circle ? 2.0 * std::numbers::pi : grid.side_length) / grid.points_per_side}};
  j["comparison"] = comparison;
  j["diagnostics"] = {{"excluded_ties", r.excluded_ties}};
  emit(f.output, j.dump(2) + "\n", out);
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app("Height distributions and expected counts of local maxima of isotropic Gaussian fields",
               "peakheight");
  app.require_subcommand(1);

  CurveFlags density_flags;
  CurveFlags exceedance_flags;
  auto add_curve_command = [&](const std::string& name, const std::string& help, CurveFlags& f) {
    auto* cmd = app.add_subcommand(name, help);
    f.model.attach(cmd, false);
    cmd->add_option("--x", f.range, "sample points lo:hi:step")->capture_default_str();
    cmd->add_option("--format", f.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    cmd->add_option("--output", f.output, "write to this file instead of stdout");
    cmd->add_option("--preset", f.preset, "parameter sweep: fig1 (Euclidean) or fig2 (sphere)")
        ->check(CLI::IsMember({"fig1", "fig2"}));
    cmd->add_option("--output-dir", f.output_dir, "directory for one file per preset curve");
    return cmd;
  };
  auto* density = add_curve_command("density", "height density h(x) of local maxima", density_flags);
  auto* exceed = add_curve_command("exceedance", "exceedance F(u) = P(height > u)", exceedance_flags);

  ModelFlags em_flags;
  auto* em = app.add_subcommand("expected-maxima", "expected number of local maxima per unit volume");
  em_flags.attach(em);

  ModelFlags pv_flags;
  double pv_u = 0.0;
  auto* pv = app.add_subcommand("pvalue", "peak p-value F(u) with expected counts above u");
  pv_flags.attach(pv);
  pv->add_option("--u", pv_u, "threshold")->required();

  int goe_n = 1;
  double goe_a = 0.0;
  double goe_b = 0.0;
  double goe_tol = 1e-8;
  auto* goe = app.add_subcommand("goe-check", "closed-form GOE expectation against brute-force quadrature");
  goe->add_option("--n", goe_n, "n, ensemble size n + 1")->required()->check(CLI::Range(1, 3));
  goe->add_option("--a", goe_a, "a > 0")->required();
  goe->add_option("--b", goe_b, "b")->required();
  goe->add_option("--tol", goe_tol, "relative tolerance of the quadrature")->capture_default_str();

  SimulateFlags sim_flags;
  auto* sim = app.add_subcommand("simulate", "Monte Carlo peak statistics against the closed forms");
  sim->add_option("--spec", sim_flags.spec_path, "covariance spec file (default: rho = exp(-r^2/2))");
  sim->add_option("--dim", sim_flags.dim, "dimension of the torus")->check(CLI::Range(1, 3))->capture_default_str();
  sim->add_option("--replicates", sim_flags.replicates, "independent fields (>= 30)")->capture_default_str();
  sim->add_option("--grid-points", sim_flags.grid_points, "grid points per side");
  sim->add_option("--side-length", sim_flags.side_length, "torus side length");
  sim->add_option("--seed", sim_flags.seed, "random seed")->capture_default_str();
  sim->add_option("--u", sim_flags.u, "threshold for the exceedance comparison")->capture_default_str();
  sim->add_option("--output", sim_flags.output, "write to this file instead of stdout");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (density->parsed()) return run_curve(density_flags, CurveKind::density, out, err);
    if (exceed->parsed()) return run_curve(exceedance_flags, CurveKind::exceedance, out, err);
    if (em->parsed()) return run_expected_maxima(em_flags, out, err);
    if (pv->parsed()) return run_pvalue(pv_flags, pv_u, out, err);
    if (goe->parsed()) return run_goe_check(goe_n, goe_a, goe_b, goe_tol, out);
    if (sim->parsed()) return run_simulate(sim_flags, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const SpecSyntaxError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kDomain;
  } catch (const ConvergenceError& e) {
    err << "convergence failure: " << e.what() << " (achieved error " << e.achieved_error() << ")\n";
    return kConvergence;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace peakheight::cli
