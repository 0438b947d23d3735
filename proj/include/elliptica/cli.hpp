#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "elliptica/asymptotics.hpp"
#include "elliptica/branch.hpp"
#include "elliptica/emden.hpp"
#include "elliptica/error.hpp"
#include "elliptica/exponents.hpp"
#include "elliptica/gallery.hpp"
#include "elliptica/grid2d.hpp"
#include "elliptica/inequality_lab.hpp"
#include "elliptica/io.hpp"
#include "elliptica/nonlinearity.hpp"
#include "elliptica/radial_solver.hpp"
#include "elliptica/stability.hpp"
#include "elliptica/svg.hpp"
#include "elliptica/symmetry.hpp"
#include "elliptica/version.hpp"

namespace elliptica::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// 64-bit FNV-1a; used for the config hash stamped into metadata and plots.
inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

/// Binds CLI options to variables and lets a config section fill whatever the command line
/// did not set. Unknown config keys are rejected.
class Binder {
 public:
  explicit Binder(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* option(const std::string& flag, const std::string& key, T& var, const std::string& help) {
    auto* opt = app_->add_option(flag, var, help)->capture_default_str();
    keys_.insert(key);
    fills_.push_back([opt, key, &var](const Json& sec) {
      if (opt->count() == 0 && sec.contains(key)) var = sec.at(key).template get<T>();
    });
    return opt;
  }

  CLI::Option* flag(const std::string& flag, const std::string& key, bool& var, const std::string& help) {
    auto* opt = app_->add_flag(flag, var, help);
    keys_.insert(key);
    fills_.push_back([opt, key, &var](const Json& sec) {
      if (opt->count() == 0 && sec.contains(key)) var = sec.at(key).get<bool>();
    });
    return opt;
  }

  void apply(const Json& sec, const std::string& name) const {
    if (sec.is_null()) return;
    if (!sec.is_object()) throw ConfigError("config section '" + name + "' must be a table");
    for (auto it = sec.begin(); it != sec.end(); ++it)
      if (!keys_.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in config section '" + name + "'");
    try {
      for (const auto& f : fills_) f(sec);
    } catch (const Json::exception& e) {
      throw ConfigError("config section '" + name + "': " + e.what());
    }
  }

 private:
  CLI::App* app_;
  std::set<std::string> keys_;
  std::vector<std::function<void(const Json&)>> fills_;
};

struct Context {
  std::filesystem::path out;
  int jobs = 0;
  std::uint64_t seed = 0;
  std::string command;
  std::string config_hash;
  std::ostream* log = &std::cout;
  std::vector<std::string> written;

  void json(const std::string& name, const Json& j) {
    write_json((out / name).string(), j);
    written.push_back(name);
  }
  void text(const std::string& name, const std::string& s) {
    write_text((out / name).string(), s);
    written.push_back(name);
  }
  std::ostream& say() { return *log; }
};

// --- argument bundles ---------------------------------------------------------

struct SolveArgs {
  std::string nonlinearity = "exp";
  int dim = 3;
  double center = 0.0;
  double r_max = 100.0;
  double rel_tol = 1e-10, abs_tol = 1e-12;
  double series_radius = 0.0;
  double mesh_ratio = 1.02;
  double blowup_guard = 1e8;
  bool phase_plane = false;
};

struct BranchArgs {
  std::string nonlinearity = "exp";
  int dim = 10;
  double a_lo = 0.1, a_hi = 10.0;
  int samples = 64;
  bool linear = false;
  int refine = 2;
  double r_max = 1e3;
  std::size_t resolution = 2048;
  std::vector<double> radii{10.0, 100.0, 1000.0};
  double tol_spec = kDefaultTolSpec;
};

struct SpectrumArgs {
  std::string nonlinearity = "exp";
  int dim = 10;
  bool singular = false;
  std::string profile;
  double center = 0.0;
  double r_max = 1e3;
  std::vector<double> radii;
  double r_inner = 0.1;
  std::size_t resolution = 0;
  double tol_spec = kDefaultTolSpec;
  int rayleigh_samples = 0;
};

struct InequalityArgs {
  std::string zeta = "thm1";
  int dim = 10;
  std::string profile;
  std::string nonlinearity;
  double center = 0.0;
  double r_max = 1e3;
  double R1 = 5.0, R2 = 30.0;
  double R = std::numeric_limits<double>::quiet_NaN();  // thm1: 30, thm8: 10
  double alpha = std::numeric_limits<double>::quiet_NaN();
  int level = 1;
  bool override_stability = false;
  std::size_t resolution = 2048;
  double tol_spec = kDefaultTolSpec;
};

struct DecayArgs {
  std::string profile;
  bool bubble = false;
  std::string nonlinearity;
  int dim = 3;
  double center = 1.0;
  double r_max = 1e4;
  double r_min = 16.0;
  int min_samples = 8;
  double residual_threshold = 0.05;
  double slack = 0.05;
  int level = 1;
  bool no_normalize = false;
};

struct SymmetryArgs {
  std::string nonlinearity = "truncated:2:1";
  std::string geometry = "disk:4";
  std::string bc = "dirichlet";
  double h = 1.0 / 64.0;
  double damping = 1.0;
  double tol = 1e-8;
  int max_iter = 40;
  int axes = 8;
  int steps = 64;
  bool refine = false;
  bool save_grid = false;
};

struct GalleryArgs {
  std::string id;
  int dim = 0;
  std::size_t resolution = 2048;
  double residual_tol = 1e-8;
  std::string constant_nonlinearity = "allen-cahn";
};

struct ReportArgs {
  std::string in;
};

// --- helpers ------------------------------------------------------------------

inline RadialProfile load_profile(const std::string& path, int dim) {
  if (path.size() > 4 && path.substr(path.size() - 4) == ".csv")
    return profile_from_csv(read_text(path), dim, std::filesystem::path(path).stem().string());
  return profile_from_json(read_json(path));
}

inline std::optional<EmdenSpec> emden_spec_of(const Nonlinearity& f) {
  if (f.kind == BuiltinKind::Exp) return EmdenSpec::exp();
  if (f.kind == BuiltinKind::Power) return EmdenSpec::power(f.p);
  return std::nullopt;
}

inline Json tail_json(const TailLimit& t) {
  return {{"settled", t.settled},
          {"geometric", t.geometric},
          {"limit", detail::num(t.limit)},
          {"tail_variation", detail::num(t.tail_variation)},
          {"ratio", detail::num(t.ratio)}};
}

inline Geometry2D parse_geometry(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  try {
    if (parts.size() == 2 && parts[0] == "disk") return Disk{std::stod(parts[1])};
    if (parts.size() == 3 && parts[0] == "box") return Box{std::stod(parts[1]), std::stod(parts[2])};
  } catch (const std::exception&) {
  }
  throw ConfigError("geometry must be disk:R or box:a:b, got '" + s + "'");
}

/// Radial Dirichlet profile on the inscribed disk, found by scanning centre values for a sign
/// change of u(R) and bisecting.
inline RadialProfile radial_initial_guess(const Nonlinearity& f, double R) {
  ShootingParams sp;
  sp.dim = 2;
  sp.r_max = R;
  sp.max_spacing = R / 400.0;
  double prev_a = 0.0, prev_g = 0.0;
  bool have = false;
  for (int k = 0; k <= 60; ++k) {
    double a = 1e-3 * std::pow(1e6, k / 60.0);
    sp.center_value = a;
    double g;
    try {
      g = shoot(f, sp).u().back();
    } catch (const NumericalError&) {
      break;
    }
    if (have && prev_g > 0.0 && g < 0.0) return dirichlet_ball_profile(f, 2, R, prev_a, a);
    prev_a = a;
    prev_g = g;
    have = true;
  }
  throw PreconditionError("no positive radial Dirichlet solution found to start the grid solve");
}

// --- subcommands --------------------------------------------------------------

inline void run_solve(const SolveArgs& a, Context& ctx) {
  auto f = parse_nonlinearity(a.nonlinearity);
  ShootingParams sp;
  sp.dim = a.dim;
  sp.center_value = a.center;
  sp.r_max = a.r_max;
  sp.rel_tol = a.rel_tol;
  sp.abs_tol = a.abs_tol;
  sp.series_radius = a.series_radius;
  sp.mesh_ratio = a.mesh_ratio;
  sp.blowup_guard = a.blowup_guard;
  auto p = shoot(f, sp);
  auto cls = classify_shot(p, f);
  auto res = validate_profile(p, f, 1e-6, true);
  ctx.json("profile.json", to_json(p));
  ctx.text("profile.csv", profile_csv(p));
  Json s = {{"profile_id", p.id()},
            {"class", to_string(cls.cls)},
            {"detail", cls.detail},
            {"tail", tail_json(cls.tail)},
            {"center_value", p.center_value()},
            {"inf_estimate", p.inf_estimate()},
            {"u_end", p.u().back()},
            {"residual", {{"max_abs", res.max_abs}, {"max_scaled", res.max_scaled}, {"rms", res.l2}}}};
  if (a.phase_plane) {
    auto spec = emden_spec_of(f);
    if (!spec) throw ConfigError("--phase-plane needs an exp or power nonlinearity");
    auto sys = build_emden(*spec, a.dim);
    auto tr = to_emden_trajectory(p, sys);
    ctx.text("trajectory.csv", trajectory_csv(tr));
    s["phase_plane"] = {{"fixed_point", sys.fixed_point},
                        {"class", to_string(classify_fixed_point(sys))},
                        {"crossings", tr.crossings},
                        {"terminal_distance", tr.terminal_distance}};
  }
  ctx.json("solve.json", s);
  ctx.say() << p.id() << ": " << to_string(cls.cls) << " (" << cls.detail << "), u(r_max) = " << p.u().back()
            << "\n";
}

inline void run_branch(const BranchArgs& a, Context& ctx) {
  auto f = parse_nonlinearity(a.nonlinearity);
  BranchOptions o;
  o.samples = a.samples;
  o.log_spacing = !a.linear;
  o.refine_levels = a.refine;
  o.r_max = a.r_max;
  o.resolution = a.resolution;
  o.morse_radii = a.radii;
  o.tol_spec = a.tol_spec;
  o.jobs = ctx.jobs;
  auto b = find_bounded_stable_branch(f, a.dim, a.a_lo, a.a_hi, o);
  Json entries = Json::array();
  std::ostringstream csv;
  csv << "a,class,bounded,stable,max_neg_count\n";
  for (const auto& e : b.entries) {
    Json je = {{"a", e.a},
               {"class", to_string(e.cls)},
               {"bounded", e.bounded},
               {"limit", detail::num(e.limit)},
               {"inf_estimate", detail::num(e.inf_estimate)},
               {"stable", e.stable},
               {"neg_count", e.neg_count},
               {"lambda1", e.lambda1},
               {"detail", e.detail}};
    if (e.blowup_radius) je["blowup_radius"] = *e.blowup_radius;
    entries.push_back(je);
    std::size_t mx = e.neg_count.empty() ? 0 : *std::max_element(e.neg_count.begin(), e.neg_count.end());
    csv << detail::fmt(e.a) << ',' << to_string(e.cls) << ',' << e.bounded << ',' << e.stable << ',' << mx << '\n';
  }
  ctx.json("branch.json", {{"dim", b.dim},
                           {"nonlinearity", b.nonlinearity},
                           {"a_range", {b.a_lo, b.a_hi}},
                           {"morse_radii", b.morse_radii},
                           {"bounded_stable_count", b.bounded_stable_count()},
                           {"entries", entries}});
  ctx.text("branch.csv", csv.str());
  ctx.say() << b.entries.size() << " shots, " << b.count(ShotClass::Bounded) << " bounded, "
            << b.bounded_stable_count() << " bounded and stable\n";
}

inline void run_spectrum(const SpectrumArgs& a, Context& ctx) {
  auto f = parse_nonlinearity(a.nonlinearity);
  SpectralReport rep;
  std::optional<LinearizedOperator> first;
  if (a.singular) {
    auto spec = emden_spec_of(f);
    if (!spec) throw ConfigError("--singular needs an exp or power nonlinearity");
    auto s = singular_solution(*spec, a.dim);
    std::vector<double> radii = a.radii.empty() ? std::vector<double>{1.0, 10.0, 100.0} : a.radii;
    std::vector<Annulus> ann;
    for (double R : radii) {
      if (!(R > a.r_inner)) throw ConfigError("annulus outer radius must exceed r_inner");
      ann.push_back({a.r_inner, R});
    }
    std::size_t res = a.resolution ? a.resolution : 4096;
    rep = singular_spectrum(s, ann, res, a.tol_spec, ctx.jobs);
    if (a.rayleigh_samples > 0)
      first = build_operator(s.dim, ann.front(), [&](double r) { return s.potential(r); }, res);
  } else {
    RadialProfile p = a.profile.empty() ? [&] {
      ShootingParams sp;
      sp.dim = a.dim;
      sp.center_value = a.center;
      sp.r_max = a.r_max;
      return shoot(f, sp);
    }()
                                        : load_profile(a.profile, a.dim);
    std::vector<double> radii;
    for (double R : a.radii.empty() ? std::vector<double>{10.0, 100.0, 1000.0} : a.radii)
      if (R <= p.r_max() * (1.0 + 1e-12)) radii.push_back(R);
    if (radii.empty()) throw ConfigError("no requested radius fits inside the profile mesh");
    MorseOptions mo;
    mo.resolution = a.resolution ? a.resolution : 2048;
    mo.tol_spec = a.tol_spec;
    mo.jobs = ctx.jobs;
    rep = morse_index_radial(p, f, radii, mo);
    if (a.rayleigh_samples > 0) first = linearize(p, f, Ball{radii.front()}, mo.resolution);
  }
  Json j = to_json(rep);
  if (first) {
    // every Rayleigh quotient sits above lambda1
    std::mt19937_64 rng(ctx.seed);
    std::normal_distribution<double> g;
    double l1 = first->pencil.eigenvalue(0);
    double worst = std::numeric_limits<double>::infinity();
    const auto& W = first->pencil.weight;
    for (int k = 0; k < a.rayleigh_samples; ++k) {
      std::vector<double> x(W.size());
      double nw = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        x[i] = g(rng);
        nw += W[i] * x[i] * x[i];
      }
      worst = std::min(worst, first->pencil.quadratic_form(x) / nw - l1);
    }
    j["rayleigh_check"] = {{"samples", a.rayleigh_samples}, {"seed", ctx.seed}, {"min_gap", worst},
                           {"passed", worst >= -1e-9 * (1.0 + std::abs(l1))}};
  }
  ctx.json("spectrum.json", j);
  ctx.text("spectrum.csv", spectral_csv(rep));
  for (std::size_t i = 0; i < rep.radii.size(); ++i)
    ctx.say() << "R = " << rep.radii[i] << ": lambda1 = " << rep.lambda1[i] << ", neg_count = " << rep.neg_count[i]
              << "\n";
}

inline void run_inequality(const InequalityArgs& a, Context& ctx) {
  std::optional<RadialProfile> p;
  std::string fname = a.nonlinearity;
  if (!a.profile.empty()) {
    p = load_profile(a.profile, a.dim);
    if (fname.empty()) fname = p->meta().value("nonlinearity", std::string("exp"));
  } else {
    if (fname.empty()) fname = "exp";
    ShootingParams sp;
    sp.dim = a.dim;
    sp.center_value = a.center;
    sp.r_max = a.r_max;
    p = shoot(parse_nonlinearity(fname), sp);
  }
  auto f = parse_nonlinearity(fname);
  LedgerOptions o;
  o.level = a.level;
  o.override_stability = a.override_stability;
  o.resolution = a.resolution;
  o.tol_spec = a.tol_spec;
  std::optional<InequalityLedger> L;
  if (a.zeta == "thm1") {
    L = evaluate_radial_22(*p, zeta_theorem1(a.R1, std::isnan(a.R) ? 30.0 : a.R), f, o);
  } else if (a.zeta == "thm8") {
    double al = std::isnan(a.alpha) ? alpha_exponent(p->dim()) : a.alpha;
    L = evaluate_pohozaev(*p, zeta_theorem8(al, std::isnan(a.R) ? 10.0 : a.R, a.R2), f, o);
  } else {
    throw ConfigError("--zeta must be thm1 or thm8");
  }
  ctx.json("ledger.json", to_json(*L));
  ctx.say() << L->kind << ": lhs = " << L->lhs << ", rhs = " << L->rhs << ", slack = " << L->slack
            << " (quadrature error " << L->quadrature_error << "), " << to_string(L->verdict) << "\n";
}

inline void run_decay(const DecayArgs& a, Context& ctx) {
  RadialProfile p = [&] {
    if (!a.profile.empty()) return load_profile(a.profile, a.dim);
    if (a.bubble) {
      if (a.dim < 3) throw ConfigError("the bubble needs dim >= 3");
      return detail::bubble_profile(a.dim, a.r_max);
    }
    ShootingParams sp;
    sp.dim = a.dim;
    sp.center_value = a.center;
    sp.r_max = a.r_max;
    return shoot(parse_nonlinearity(a.nonlinearity.empty() ? "exp" : a.nonlinearity), sp);
  }();
  Json j = {{"profile_id", p.id()}, {"dim", p.dim()}};
  if (!a.no_normalize) {
    p = normalize_to_zero_limit(p);
    j["normalized_limit"] = p.meta().value("normalized_limit", 0.0);
  }
  DecayOptions o;
  o.r_min = a.r_min;
  o.min_samples = a.min_samples;
  o.residual_threshold = a.residual_threshold;
  o.slack = a.slack;
  o.level = a.level;
  auto sup = fit_sup_decay(p, o);
  auto grad = fit_gradient_tail(p, o);
  sup.profile_id = grad.profile_id = j["profile_id"].get<std::string>();
  j["fits"] = {to_json(sup), to_json(grad)};
  j["l2star"] = to_json(l2star_norm(p, 2.0, a.level));
  ctx.json("decay.json", j);
  append_decay_table((ctx.out / "decay_table.csv").string(), {sup, grad});
  ctx.written.push_back("decay_table.csv");
  for (const auto* fit : {&sup, &grad})
    ctx.say() << to_string(fit->quantity) << ": exponent " << fit->exponent << " vs bound " << fit->bound << " -> "
              << to_string(fit->verdict) << "\n";
}

inline Json symmetry_run(const Nonlinearity& f, const Geometry2D& geom, BoundaryCondition bc, double h,
                         const SymmetryArgs& a, const RadialProfile& guess, Context& ctx, GridSolution2D* keep) {
  GridSolveOptions go;
  go.tol = a.tol;
  go.max_iter = a.max_iter;
  go.initial_guess = [&](double x, double y) {
    double r = std::hypot(x, y);
    return r < guess.r_max() ? guess.u_at(r) : 0.0;
  };
  auto g = solve_grid_2d(f, geom, bc, h, a.damping, go);
  MovingPlaneOptions mo;
  mo.steps = a.steps;
  mo.f = &f;
  auto axes = moving_plane_axes(g, a.axes, mo, ctx.jobs);
  auto dev = radial_deviation(g);
  Json ja = Json::array();
  double lam_min = 0.0;
  bool all = true;
  for (const auto& r : axes) {
    ja.push_back(to_json(r));
    lam_min = std::min(lam_min, r.lambda0);
    all = all && r.reaches_origin();
  }
  auto m = locate_maximum(g);
  Json j = {{"h", h},
            {"unknowns", g.inside_count()},
            {"residual_norm", g.residual_norm},
            {"history", g.history},
            {"max_value", m.value},
            {"lambda0_min", lam_min},
            {"all_axes_reach_origin", all},
            {"radial_deviation", to_json(dev)},
            {"axes", ja}};
  if (keep) *keep = std::move(g);
  return j;
}

inline void run_symmetry(const SymmetryArgs& a, Context& ctx) {
  auto f = parse_nonlinearity(a.nonlinearity);
  auto geom = parse_geometry(a.geometry);
  BoundaryCondition bc;
  if (a.bc == "dirichlet")
    bc = BoundaryCondition::Dirichlet0;
  else if (a.bc == "neumann")
    bc = BoundaryCondition::Neumann0;
  else
    throw ConfigError("--bc must be dirichlet or neumann");
  double Rin = std::holds_alternative<Disk>(geom) ? std::get<Disk>(geom).R
                                                  : std::min(std::get<Box>(geom).a, std::get<Box>(geom).b);
  auto guess = radial_initial_guess(f, Rin);
  GridSolution2D g;
  Json j = {{"nonlinearity", f.name}, {"geometry", describe(geom)}, {"bc", to_string(bc)},
            {"radial_center_value", guess.center_value()}};
  j["coarse"] = symmetry_run(f, geom, bc, a.h, a, guess, ctx, &g);
  if (a.refine) {
    j["fine"] = symmetry_run(f, geom, bc, a.h / 2.0, a, guess, ctx, nullptr);
    double d1 = j["coarse"]["radial_deviation"]["max_deviation"].get<double>();
    double d2 = j["fine"]["radial_deviation"]["max_deviation"].get<double>();
    j["deviation_ratio"] = d2 > 0.0 ? Json(d1 / d2) : Json(nullptr);
  }
  ctx.json("symmetry.json", j);
  ctx.text("grid.csv", grid_csv(g));
  if (a.save_grid) ctx.json("grid.json", to_json(g));
  ctx.say() << "lambda0 (min over " << a.axes << " axes) = " << j["coarse"]["lambda0_min"].get<double>()
            << ", radial deviation = " << j["coarse"]["radial_deviation"]["max_deviation"].get<double>() << "\n";
}

inline void run_gallery_verify(const GalleryArgs& a, Context& ctx) {
  GalleryOptions o;
  o.dim = a.dim;
  o.resolution = a.resolution;
  o.residual_tol = a.residual_tol;
  o.constant_nonlinearity = a.constant_nonlinearity;
  o.jobs = ctx.jobs;
  std::vector<GalleryReport> reps;
  if (a.id.empty())
    reps = verify_all(o);
  else
    reps.push_back(verify_entry(a.id, o));
  Json all = Json::array();
  for (const auto& r : reps) {
    ctx.json("gallery_" + r.id + ".json", to_json(r));
    all.push_back(to_json(r));
    ctx.say() << std::left << std::setw(16) << r.id << " N=" << r.dim << "  " << to_string(r.overall()) << "\n";
    for (const auto& c : r.checks)
      ctx.say() << "    " << std::setw(26) << c.property << to_string(c.status) << "\n";
  }
  if (reps.size() > 1) ctx.json("gallery.json", all);
}

inline void run_gallery_list(Context& ctx) {
  auto cat = catalog_json();
  ctx.json("catalog.json", cat);
  for (const auto& e : list_entries()) ctx.say() << std::left << std::setw(16) << e.id << e.summary << "\n";
}

inline void run_report(const ReportArgs& a, Context& ctx) {
  std::filesystem::path in = a.in.empty() ? ctx.out : std::filesystem::path(a.in);
  if (!std::filesystem::is_directory(in)) throw ConfigError("report input is not a directory: " + in.string());
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(in))
    if (e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  const std::string prov = "elliptica " + std::string(kVersion) + ", config " + ctx.config_hash;
  Json rows = Json::array();
  std::ostringstream table;
  table << std::left << std::setw(28) << "file" << std::setw(22) << "kind" << "summary\n";
  std::vector<SvgSeries> spectra;
  for (const auto& path : files) {
    auto name = path.filename().string();
    if (name == "report.json" || name == "metadata.json" || name == "error.json") continue;
    Json j;
    try {
      j = read_json(path.string());
    } catch (const FormatError&) {
      continue;
    }
    std::string kind = "other", summary;
    if (j.is_object() && j.value("schema", "") == kProfileSchema && j.value("kind", "") == "radial") {
      kind = "profile";
      auto p = profile_from_json(j);
      summary = p.id() + ", u(r_max) = " + detail::fmt(p.u().back());
      SvgPlot pl{"profile " + p.id(), "r", "u", true, false, prov};
      SvgSeries s{p.id(), {p.r().begin() + 1, p.r().end()}, {p.u().begin() + 1, p.u().end()}};
      ctx.text("plot_" + path.stem().string() + ".svg", render_svg(pl, {s}));
    } else if (j.is_object() && j.value("schema", "") == kSpectralSchema) {
      kind = "spectrum";
      auto r = spectral_from_json(j);
      summary = r.profile_id + ", max neg_count " + std::to_string(r.max_neg_count());
      spectra.push_back({r.profile_id, r.radii, r.lambda1, true});
    } else if (j.is_object() && j.value("schema", "") == kLedgerSchema) {
      kind = "ledger";
      summary = j.value("kind", "") + ", slack " + detail::fmt(j.value("slack", 0.0)) + ", " + j.value("verdict", "");
    } else if (j.is_object() && j.contains("fits")) {
      kind = "decay";
      std::vector<SvgSeries> ss;
      for (const auto& fit : j["fits"]) {
        summary += fit.value("quantity", "") + " " + fit.value("verdict", "") + "; ";
        auto radii = fit.value("radii", std::vector<double>{});
        auto vals = fit.value("values", std::vector<double>{});
        ss.push_back({fit.value("quantity", ""), radii, vals, true});
        if (fit["exponent"].is_number() && !radii.empty()) {
          double e = fit["exponent"].get<double>(), c = fit.value("constant", 0.0);
          std::vector<double> y;
          for (double r : radii) y.push_back(c * std::pow(r, e));
          ss.push_back({"fit " + detail::fmt(e), radii, y, false, true});
        }
      }
      SvgPlot pl{"decay " + j.value("profile_id", ""), "R", "value", true, true, prov};
      ctx.text("plot_" + path.stem().string() + ".svg", render_svg(pl, ss));
    } else if (j.is_object() && j.contains("overall") && j.contains("checks")) {
      kind = "gallery";
      summary = j.value("id", "") + ": " + j.value("overall", "");
    } else if (j.is_object() && j.contains("coarse")) {
      kind = "symmetry";
      summary = "lambda0_min " + detail::fmt(j["coarse"].value("lambda0_min", 0.0));
    } else if (j.is_object() && j.contains("entries")) {
      kind = "branch";
      summary = std::to_string(j.value("bounded_stable_count", 0)) + " bounded and stable";
    }
    rows.push_back({{"file", name}, {"kind", kind}, {"summary", summary}});
    table << std::left << std::setw(28) << name << std::setw(22) << kind << summary << "\n";
  }
  if (!spectra.empty()) {
    SvgPlot pl{"lambda1(R)", "R", "lambda1", true, false, prov};
    ctx.text("plot_lambda1.svg", render_svg(pl, spectra));
  }
  ctx.json("report.json", {{"input", in.filename().string()}, {"rows", rows}});
  ctx.text("summary.txt", table.str());
  ctx.say() << table.str();
}

// --- entry point --------------------------------------------------------------

inline void write_error(const std::filesystem::path& out, const std::string& kind, const std::string& msg,
                        const Json& extra = Json::object()) {
  try {
    std::filesystem::create_directories(out);
    Json j = {{"kind", kind}, {"message", msg}};
    for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
    write_json((out / "error.json").string(), j);
  } catch (...) {
  }
}

inline Json numerical_details(const NumericalError& e) {
  Json j = Json::object();
  if (auto b = dynamic_cast<const BlowUpError*>(&e)) j["blowup_radius"] = b->radius();
  if (auto s = dynamic_cast<const StepFailureError*>(&e)) j["radius"] = s->radius();
  if (auto n = dynamic_cast<const NonConvergenceError*>(&e)) j["best_residual"] = detail::num(n->best_residual());
  if (auto t = dynamic_cast<const NoFiniteLimitError*>(&e)) j["tail_variation"] = detail::num(t->tail_variation());
  return j;
}

inline std::string utc_timestamp() {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"elliptica: radial solutions, spectra, integral inequalities, decay fits and moving planes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  std::string config_path, out_dir = "elliptica-out";
  int jobs = 0;
  std::uint64_t seed = 0;
  auto* o_out = app.add_option("--out", out_dir, "output directory (ELLIPTICA_OUT overrides)")->capture_default_str();
  auto* o_jobs = app.add_option("--jobs", jobs, "worker threads, 0 = all cores")->capture_default_str();
  auto* o_seed = app.add_option("--seed", seed, "seed for randomized property checks")->capture_default_str();
  app.add_option("--config", config_path, "JSON config with one table per subcommand");

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "shoot a radial solution from the origin");
  Binder bs(solve);
  bs.option("--nonlinearity", "nonlinearity", sa.nonlinearity, "exp, power:p, truncated:p:beta, allen-cahn, constant:c, logistic, sine");
  bs.option("--dim", "dim", sa.dim, "dimension N");
  bs.option("--center", "center", sa.center, "centre value u(0)");
  bs.option("--r-max", "r_max", sa.r_max, "outer radius");
  bs.option("--rel-tol", "rel_tol", sa.rel_tol, "relative tolerance");
  bs.option("--abs-tol", "abs_tol", sa.abs_tol, "absolute tolerance");
  bs.option("--series-radius", "series_radius", sa.series_radius, "series/stepper switch, 0 = auto");
  bs.option("--mesh-ratio", "mesh_ratio", sa.mesh_ratio, "output mesh growth ratio");
  bs.option("--blowup-guard", "blowup_guard", sa.blowup_guard, "|u| guard");
  bs.flag("--phase-plane", "phase_plane", sa.phase_plane, "also write the Emden trajectory (t,v,dv)");

  BranchArgs ba;
  auto* branch = app.add_subcommand("branch", "sweep centre values and annotate with Morse counts");
  Binder bb(branch);
  bb.option("--nonlinearity", "nonlinearity", ba.nonlinearity, "nonlinearity");
  bb.option("--dim", "dim", ba.dim, "dimension N");
  bb.option("--a-lo", "a_lo", ba.a_lo, "lowest centre value");
  bb.option("--a-hi", "a_hi", ba.a_hi, "highest centre value");
  bb.option("--samples", "samples", ba.samples, "number of samples");
  bb.flag("--linear", "linear", ba.linear, "linear spacing in a (e.g. for exp)");
  bb.option("--refine", "refine", ba.refine, "trisection passes");
  bb.option("--r-max", "r_max", ba.r_max, "outer radius");
  bb.option("--resolution", "resolution", ba.resolution, "spectral mesh intervals");
  bb.option("--radii", "radii", ba.radii, "ball radii for Morse counts");
  bb.option("--tol-spec", "tol_spec", ba.tol_spec, "negative eigenvalue threshold");

  SpectrumArgs pa;
  auto* spectrum = app.add_subcommand("spectrum", "lowest eigenvalues and Morse counts");
  Binder bp(spectrum);
  bp.option("--nonlinearity", "nonlinearity", pa.nonlinearity, "nonlinearity");
  bp.option("--dim", "dim", pa.dim, "dimension N");
  bp.flag("--singular", "singular", pa.singular, "use the singular solution on annuli");
  bp.option("--profile", "profile", pa.profile, "profile JSON or r,u,du CSV");
  bp.option("--center", "center", pa.center, "centre value when shooting");
  bp.option("--r-max", "r_max", pa.r_max, "outer radius when shooting");
  bp.option("--radii", "radii", pa.radii, "ball radii (annulus outer radii with --singular)");
  bp.option("--r-inner", "r_inner", pa.r_inner, "annulus inner radius");
  bp.option("--resolution", "resolution", pa.resolution, "mesh intervals, 0 = default");
  bp.option("--tol-spec", "tol_spec", pa.tol_spec, "negative eigenvalue threshold");
  bp.option("--rayleigh-samples", "rayleigh_samples", pa.rayleigh_samples, "random Rayleigh-quotient checks");

  InequalityArgs ia;
  auto* inequality = app.add_subcommand("inequality", "evaluate an integral inequality ledger");
  Binder bi(inequality);
  bi.option("--zeta", "zeta", ia.zeta, "thm1 or thm8");
  bi.option("--dim", "dim", ia.dim, "dimension N");
  bi.option("--profile", "profile", ia.profile, "profile JSON or r,u,du CSV");
  bi.option("--nonlinearity", "nonlinearity", ia.nonlinearity, "nonlinearity (default: from profile)");
  bi.option("--center", "center", ia.center, "centre value when shooting");
  bi.option("--r-max", "r_max", ia.r_max, "outer radius when shooting");
  bi.option("--R1", "R1", ia.R1, "thm1 inner radius");
  bi.option("--R", "R", ia.R, "cut-off radius (thm1: 30, thm8: 10)");
  bi.option("--R2", "R2", ia.R2, "thm8 logarithmic cap radius");
  bi.option("--alpha", "alpha", ia.alpha, "thm8 power (default: the cancelling exponent)");
  bi.option("--level", "level", ia.level, "quadrature sub-panels");
  bi.flag("--override-stability", "override_stability", ia.override_stability, "evaluate on unstable supports");
  bi.option("--resolution", "resolution", ia.resolution, "spectral mesh intervals for the precondition");
  bi.option("--tol-spec", "tol_spec", ia.tol_spec, "negative eigenvalue threshold");

  DecayArgs da;
  auto* decay = app.add_subcommand("decay", "fit decay exponents of a profile");
  Binder bd(decay);
  bd.option("--profile", "profile", da.profile, "profile JSON or r,u,du CSV");
  bd.flag("--bubble", "bubble", da.bubble, "use the closed-form bubble");
  bd.option("--nonlinearity", "nonlinearity", da.nonlinearity, "nonlinearity when shooting");
  bd.option("--dim", "dim", da.dim, "dimension N");
  bd.option("--center", "center", da.center, "centre value when shooting");
  bd.option("--r-max", "r_max", da.r_max, "outer radius");
  bd.option("--r-min", "r_min", da.r_min, "first dyadic radius");
  bd.option("--min-samples", "min_samples", da.min_samples, "minimum dyadic samples");
  bd.option("--residual-threshold", "residual_threshold", da.residual_threshold, "max RMS log residual");
  bd.option("--slack", "slack", da.slack, "exponent slack");
  bd.option("--level", "level", da.level, "quadrature sub-panels");
  bd.flag("--no-normalize", "no_normalize", da.no_normalize, "skip subtracting the limit at infinity");

  SymmetryArgs ya;
  auto* symmetry = app.add_subcommand("symmetry", "2D grid solve plus moving-plane sweeps");
  Binder by(symmetry);
  by.option("--nonlinearity", "nonlinearity", ya.nonlinearity, "nonlinearity");
  by.option("--geometry", "geometry", ya.geometry, "disk:R or box:a:b");
  by.option("--bc", "bc", ya.bc, "dirichlet or neumann");
  by.option("--spacing", "h", ya.h, "grid spacing h");
  by.option("--damping", "damping", ya.damping, "Newton damping in (0, 1]");
  by.option("--tol", "tol", ya.tol, "residual tolerance");
  by.option("--max-iter", "max_iter", ya.max_iter, "Newton iterations");
  by.option("--axes", "axes", ya.axes, "number of sweep axes");
  by.option("--steps", "steps", ya.steps, "plane positions per axis");
  by.flag("--refine", "refine", ya.refine, "repeat at h/2");
  by.flag("--save-grid", "save_grid", ya.save_grid, "write grid.json");

  GalleryArgs ga;
  auto* gallery = app.add_subcommand("gallery", "closed-form solutions and counterexamples");
  gallery->require_subcommand(1);
  auto* gverify = gallery->add_subcommand("verify", "verify one entry (or all)");
  Binder bg(gverify);
  bg.option("--id", "id", ga.id, "entry id, empty = all");
  bg.option("--dim", "dim", ga.dim, "dimension, 0 = entry default");
  bg.option("--resolution", "resolution", ga.resolution, "spectral mesh intervals");
  bg.option("--residual-tol", "residual_tol", ga.residual_tol, "residual tolerance");
  bg.option("--constant-nonlinearity", "constant_nonlinearity", ga.constant_nonlinearity, "f for the constant entry");
  auto* glist = gallery->add_subcommand("list", "list entries");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "aggregate JSON outputs into a summary and SVG plots");
  Binder br(report);
  br.option("--in", "in", ra.in, "directory to scan (default: the output directory)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    out << (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp" ? app.help() : std::string(kVersion) + "\n");
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "elliptica: " << e.what() << "\n";
    return kExitConfig;
  }

  std::string command;
  for (auto* s : app.get_subcommands()) {
    command = s->get_name();
    for (auto* t : s->get_subcommands()) command += " " + t->get_name();
  }

  Context ctx;
  ctx.log = &out;
  ctx.command = command;
  std::string config_text;
  Json config = Json::object();
  try {
    if (!config_path.empty()) {
      config_text = read_text(config_path);
      config = Json::parse(config_text);
      if (!config.is_object()) throw ConfigError("config must be a JSON object");
      static const std::set<std::string> sections{"global", "solve", "branch", "spectrum", "inequality",
                                                  "decay", "symmetry", "gallery", "report"};
      for (auto it = config.begin(); it != config.end(); ++it)
        if (!sections.count(it.key())) throw ConfigError("unknown config section '" + it.key() + "'");
      if (config.contains("global")) {
        const auto& g = config["global"];
        for (auto it = g.begin(); it != g.end(); ++it)
          if (it.key() != "out" && it.key() != "jobs" && it.key() != "seed")
            throw ConfigError("unknown key '" + it.key() + "' in config section 'global'");
        if (o_out->count() == 0 && g.contains("out")) out_dir = g["out"].get<std::string>();
        if (o_jobs->count() == 0 && g.contains("jobs")) jobs = g["jobs"].get<int>();
        if (o_seed->count() == 0 && g.contains("seed")) seed = g["seed"].get<std::uint64_t>();
      }
    }
    auto section = [&](const char* k) { return config.contains(k) ? config[k] : Json(); };
    if (solve->parsed()) bs.apply(section("solve"), "solve");
    if (branch->parsed()) bb.apply(section("branch"), "branch");
    if (spectrum->parsed()) bp.apply(section("spectrum"), "spectrum");
    if (inequality->parsed()) bi.apply(section("inequality"), "inequality");
    if (decay->parsed()) bd.apply(section("decay"), "decay");
    if (symmetry->parsed()) by.apply(section("symmetry"), "symmetry");
    if (gverify->parsed()) bg.apply(section("gallery"), "gallery");
    if (report->parsed()) br.apply(section("report"), "report");
  } catch (const ConfigError& e) {
    err << "elliptica: config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "elliptica: config error: " << e.what() << "\n";
    return kExitConfig;
  }

  if (const char* env = std::getenv("ELLIPTICA_OUT"); env && *env) out_dir = env;
  ctx.out = out_dir;
  ctx.jobs = jobs;
  ctx.seed = seed;
  std::string canon;
  // where the files go is not part of the computation
  for (int i = 1; i < argc; ++i) {
    std::string s = argv[i];
    if (s == "--out") {
      ++i;
      continue;
    }
    if (s.rfind("--out=", 0) == 0) continue;
    canon += s + '\0';
  }
  ctx.config_hash = hex64(fnv1a(config_text + '\0' + canon));

  int code = kExitOk;
  try {
    std::filesystem::create_directories(ctx.out);
    if (solve->parsed()) run_solve(sa, ctx);
    else if (branch->parsed()) run_branch(ba, ctx);
    else if (spectrum->parsed()) run_spectrum(pa, ctx);
    else if (inequality->parsed()) run_inequality(ia, ctx);
    else if (decay->parsed()) run_decay(da, ctx);
    else if (symmetry->parsed()) run_symmetry(ya, ctx);
    else if (gverify->parsed()) run_gallery_verify(ga, ctx);
    else if (glist->parsed()) run_gallery_list(ctx);
    else if (report->parsed()) run_report(ra, ctx);
  } catch (const NumericalError& e) {
    err << "elliptica: " << e.kind() << ": " << e.what() << "\n";
    write_error(ctx.out, e.kind(), e.what(), numerical_details(e));
    code = kExitNumerical;
  } catch (const ConfigError& e) {
    err << "elliptica: config error: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "elliptica: invalid parameter: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const FormatError& e) {
    err << "elliptica: bad input file: " << e.what() << "\n";
    code = kExitConfig;
  } catch (const std::exception& e) {
    err << "elliptica: failure: " << e.what() << "\n";
    write_error(ctx.out, "Failure", e.what());
    code = kExitNumerical;
  }
  try {
    if (std::filesystem::is_directory(ctx.out))
      write_json((ctx.out / "metadata.json").string(), {{"command", command},
                                                         {"version", kVersion},
                                                         {"timestamp", utc_timestamp()},
                                                         {"config_hash", ctx.config_hash},
                                                         {"seed", seed},
                                                         {"jobs", jobs},
                                                         {"exit_code", code},
                                                         {"outputs", ctx.written}});
  } catch (...) {
  }
  return code;
}

}  // namespace elliptica::cli
