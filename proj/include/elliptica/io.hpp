#pragma once

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "elliptica/asymptotics.hpp"
#include "elliptica/emden.hpp"
#include "elliptica/gallery.hpp"
#include "elliptica/grid2d.hpp"
#include "elliptica/inequality_lab.hpp"
#include "elliptica/profile.hpp"
#include "elliptica/stability.hpp"
#include "elliptica/symmetry.hpp"

namespace elliptica {

inline constexpr const char* kProfileSchema = "elliptica-profile-v1";
inline constexpr const char* kSpectralSchema = "elliptica-spectral-v1";
inline constexpr const char* kLedgerSchema = "elliptica-ledger-v1";

/// Schema mismatch or malformed document.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// Non-finite doubles become null (JSON has no NaN/inf).
inline Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

inline double num_or_nan(const Json& j) {
  return j.is_number() ? j.get<double>() : std::numeric_limits<double>::quiet_NaN();
}

inline void expect_schema(const Json& j, const char* schema) {
  if (!j.is_object() || !j.contains("schema") || j["schema"] != schema)
    throw FormatError(std::string("expected a document with schema ") + schema);
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

}  // namespace detail

// --- profiles ---------------------------------------------------------------

inline Json to_json(const RadialProfile& p) {
  Json j;
  j["schema"] = kProfileSchema;
  j["kind"] = "radial";
  j["id"] = p.id();
  j["dim"] = p.dim();
  j["center_value"] = p.center_value();
  j["inf_estimate"] = detail::num(p.inf_estimate());
  j["meta"] = p.meta();
  j["r"] = p.r();
  j["u"] = p.u();
  j["du"] = p.du();
  if (p.d2u()) j["d2u"] = *p.d2u();
  return j;
}

inline RadialProfile profile_from_json(const Json& j) {
  detail::expect_schema(j, kProfileSchema);
  if (j.value("kind", "radial") != "radial") throw FormatError("profile document is not radial");
  try {
    std::optional<std::vector<double>> d2;
    if (j.contains("d2u")) d2 = j["d2u"].get<std::vector<double>>();
    RadialProfile p(j.at("dim").get<int>(), j.at("r").get<std::vector<double>>(),
                    j.at("u").get<std::vector<double>>(), j.at("du").get<std::vector<double>>(),
                    std::move(d2), j.value("meta", Json::object()), j.value("id", std::string("profile")));
    if (j.contains("inf_estimate") && j["inf_estimate"].is_number())
      p = p.with_inf_estimate(j["inf_estimate"].get<double>());
    return p;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed profile document: ") + e.what());
  }
}

inline std::string profile_csv(const RadialProfile& p) {
  std::ostringstream s;
  s << "r,u,du\n";
  for (std::size_t i = 0; i < p.size(); ++i)
    s << detail::fmt(p.r()[i]) << ',' << detail::fmt(p.u()[i]) << ',' << detail::fmt(p.du()[i]) << '\n';
  return s.str();
}

/// Reads an r,u,du table (header required).
inline RadialProfile profile_from_csv(const std::string& text, int dim, std::string id = "csv") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("r,u,du", 0) != 0) throw FormatError("CSV header must be r,u,du");
  std::vector<double> r, u, du;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string a, b, c;
    if (!std::getline(row, a, ',') || !std::getline(row, b, ',') || !std::getline(row, c, ','))
      throw FormatError("CSV row needs three columns: " + line);
    try {
      r.push_back(std::stod(a));
      u.push_back(std::stod(b));
      du.push_back(std::stod(c));
    } catch (const std::exception&) {
      throw FormatError("non-numeric CSV row: " + line);
    }
  }
  return RadialProfile(dim, std::move(r), std::move(u), std::move(du), std::nullopt, Json{{"source", "csv"}},
                       std::move(id));
}

inline Json to_json(const GridSolution2D& g) {
  Json j;
  j["schema"] = kProfileSchema;
  j["kind"] = "grid2d";
  j["id"] = g.id;
  Json geom;
  if (auto d = std::get_if<Disk>(&g.geometry)) {
    geom = {{"type", "Disk"}, {"R", d->R}};
  } else {
    auto& b = std::get<Box>(g.geometry);
    geom = {{"type", "Box"}, {"a", b.a}, {"b", b.b}};
  }
  j["geometry"] = geom;
  j["bc"] = to_string(g.bc);
  j["h"] = g.h;
  j["nx"] = g.nx;
  j["ny"] = g.ny;
  j["x0"] = g.x0;
  j["y0"] = g.y0;
  j["center"] = {g.cx, g.cy};
  j["residual_norm"] = detail::num(g.residual_norm);
  j["history"] = g.history;
  j["u"] = g.u;
  std::vector<int> mask(g.inside.begin(), g.inside.end());
  j["inside"] = mask;
  return j;
}

inline GridSolution2D grid_from_json(const Json& j) {
  detail::expect_schema(j, kProfileSchema);
  if (j.value("kind", "") != "grid2d") throw FormatError("profile document is not a 2D grid");
  try {
    GridSolution2D g;
    auto& geom = j.at("geometry");
    if (geom.at("type") == "Disk")
      g.geometry = Disk{geom.at("R").get<double>()};
    else
      g.geometry = Box{geom.at("a").get<double>(), geom.at("b").get<double>()};
    g.bc = j.at("bc") == "Neumann0" ? BoundaryCondition::Neumann0 : BoundaryCondition::Dirichlet0;
    g.h = j.at("h").get<double>();
    g.nx = j.at("nx").get<int>();
    g.ny = j.at("ny").get<int>();
    g.x0 = j.at("x0").get<double>();
    g.y0 = j.at("y0").get<double>();
    g.cx = j.at("center").at(0).get<double>();
    g.cy = j.at("center").at(1).get<double>();
    g.residual_norm = detail::num_or_nan(j.at("residual_norm"));
    g.history = j.value("history", std::vector<double>{});
    g.u = j.at("u").get<std::vector<double>>();
    auto mask = j.at("inside").get<std::vector<int>>();
    g.inside.assign(mask.begin(), mask.end());
    g.id = j.value("id", std::string("grid"));
    if (g.u.size() != static_cast<std::size_t>(g.nx) * g.ny || g.inside.size() != g.u.size())
      throw FormatError("grid arrays do not match nx * ny");
    return g;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed grid document: ") + e.what());
  }
}

/// x,y,u rows for the inside nodes.
inline std::string grid_csv(const GridSolution2D& g) {
  std::ostringstream s;
  s << "x,y,u\n";
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      if (g.inside[g.idx(i, j)])
        s << detail::fmt(g.x(i)) << ',' << detail::fmt(g.y(j)) << ',' << detail::fmt(g.at(i, j)) << '\n';
  return s.str();
}

// --- spectra ----------------------------------------------------------------

inline Json to_json(const SpectralReport& r) {
  Json j;
  j["schema"] = kSpectralSchema;
  j["dim"] = r.dim;
  j["profile_id"] = r.profile_id;
  j["radii"] = r.radii;
  Json l1 = Json::array();
  for (double v : r.lambda1) l1.push_back(detail::num(v));
  j["lambda1"] = l1;
  j["neg_count"] = r.neg_count;
  j["grid_resolution"] = r.grid_resolution;
  j["tol_spec"] = r.tol_spec;
  j["stable_outside_radius"] = r.stable_outside_radius ? Json(*r.stable_outside_radius) : Json(nullptr);
  j["stable"] = r.stable();
  return j;
}

inline SpectralReport spectral_from_json(const Json& j) {
  detail::expect_schema(j, kSpectralSchema);
  try {
    SpectralReport r;
    r.dim = j.at("dim").get<int>();
    r.profile_id = j.value("profile_id", std::string());
    r.radii = j.at("radii").get<std::vector<double>>();
    for (auto& v : j.at("lambda1")) r.lambda1.push_back(detail::num_or_nan(v));
    r.neg_count = j.at("neg_count").get<std::vector<std::size_t>>();
    r.grid_resolution = j.value("grid_resolution", std::size_t{0});
    r.tol_spec = j.value("tol_spec", kDefaultTolSpec);
    if (j.contains("stable_outside_radius") && j["stable_outside_radius"].is_number())
      r.stable_outside_radius = j["stable_outside_radius"].get<double>();
    return r;
  } catch (const Json::exception& e) {
    throw FormatError(std::string("malformed spectral document: ") + e.what());
  }
}

inline std::string spectral_csv(const SpectralReport& r) {
  std::ostringstream s;
  s << "R,lambda1,neg_count\n";
  for (std::size_t i = 0; i < r.radii.size(); ++i)
    s << detail::fmt(r.radii[i]) << ',' << detail::fmt(r.lambda1[i]) << ',' << r.neg_count[i] << '\n';
  return s.str();
}

// --- ledgers ----------------------------------------------------------------

inline Json to_json(const TestFunction& z) {
  Json pieces = Json::array();
  for (const auto& p : z.pieces()) {
    std::visit(
        [&](const auto& q) {
          using T = std::decay_t<decltype(q)>;
          if constexpr (std::is_same_v<T, piece::Power>)
            pieces.push_back({{"type", "power"}, {"a", q.a}, {"k", q.k}});
          else if constexpr (std::is_same_v<T, piece::Constant>)
            pieces.push_back({{"type", "constant"}, {"c", q.c}});
          else if constexpr (std::is_same_v<T, piece::LogCap>)
            pieces.push_back({{"type", "logcap"}, {"c", q.c}, {"R2", q.R2}});
          else if constexpr (std::is_same_v<T, piece::Linear>)
            pieces.push_back({{"type", "linear"}, {"a", q.a}, {"b", q.b}});
          else
            pieces.push_back({{"type", "zero"}});
        },
        p);
  }
  Json j = {{"name", z.name()}, {"breakpoints", z.breakpoints()}, {"pieces", pieces}};
  j["alpha"] = z.alpha() ? Json(*z.alpha()) : Json(nullptr);
  return j;
}

inline Json to_json(const InequalityLedger& L) {
  Json j;
  j["schema"] = kLedgerSchema;
  j["kind"] = L.kind;
  j["profile_id"] = L.profile_id;
  j["dim"] = L.dim;
  j["level"] = L.level;
  j["zeta"] = to_json(L.zeta);
  Json terms = Json::array();
  for (const auto& t : L.terms)
    terms.push_back({{"name", t.name}, {"side", t.side}, {"value", detail::num(t.value)}, {"error", detail::num(t.error)}});
  j["terms"] = terms;
  j["lhs"] = detail::num(L.lhs);
  j["rhs"] = detail::num(L.rhs);
  j["lhs_error"] = detail::num(L.lhs_error);
  j["rhs_error"] = detail::num(L.rhs_error);
  j["slack"] = detail::num(L.slack);
  j["quadrature_error"] = detail::num(L.quadrature_error);
  j["verdict"] = to_string(L.verdict);
  j["precondition"] = {{"checked", L.precondition.checked},
                       {"overridden", L.precondition.overridden},
                       {"stable", L.precondition.stable},
                       {"domain", L.precondition.domain},
                       {"lambda1", detail::num(L.precondition.lambda1)}};
  return j;
}

// --- decay ------------------------------------------------------------------

inline Json to_json(const DecayFit& f) {
  Json j = {{"quantity", to_string(f.quantity)},
            {"profile_id", f.profile_id},
            {"exponent", detail::num(f.exponent)},
            {"constant", detail::num(f.constant)},
            {"fit_range", {f.fit_range.first, f.fit_range.second}},
            {"residual", detail::num(f.residual)},
            {"bound", detail::num(f.bound)},
            {"slack", f.slack},
            {"drop_one_change", detail::num(f.drop_one_change)},
            {"radii", f.radii},
            {"values", f.values},
            {"trivial", f.trivial},
            {"verdict", to_string(f.verdict)}};
  return j;
}

inline std::string decay_csv_header() { return "profile_id,quantity,exponent,bound,verdict\n"; }

inline std::string decay_csv_row(const DecayFit& f) {
  return f.profile_id + ',' + to_string(f.quantity) + ',' + detail::fmt(f.exponent) + ',' + detail::fmt(f.bound) +
         ',' + to_string(f.verdict) + '\n';
}

/// Appends rows to a results table, writing the header when the file is new or empty.
inline void append_decay_table(const std::string& path, const std::vector<DecayFit>& fits) {
  bool fresh;
  {
    std::ifstream probe(path);
    fresh = !probe.good() || probe.peek() == std::ifstream::traits_type::eof();
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path);
  if (fresh) out << decay_csv_header();
  for (const auto& f : fits) out << decay_csv_row(f);
}

inline Json to_json(const L2StarEstimate& e) {
  return {{"exponent", e.exponent},
          {"core", e.core},
          {"band_radii", e.band_radii},
          {"bands", e.bands},
          {"ratio", detail::num(e.ratio)},
          {"tail_extrapolation", e.tail_extrapolation},
          {"value", detail::num(e.value)},
          {"verdict", to_string(e.verdict)}};
}

// --- phase plane ------------------------------------------------------------

inline std::string trajectory_csv(const EmdenTrajectory& t) {
  std::ostringstream s;
  s << "t,v,dv\n";
  for (std::size_t i = 0; i < t.t.size(); ++i)
    s << detail::fmt(t.t[i]) << ',' << detail::fmt(t.v[i]) << ',' << detail::fmt(t.dv[i]) << '\n';
  return s.str();
}

// --- symmetry ---------------------------------------------------------------

inline Json to_json(const MovingPlaneResult& r) {
  Json steps = Json::array();
  for (const auto& s : r.certificate)
    steps.push_back({{"lambda", s.lambda},
                     {"count", s.count},
                     {"min_w", detail::num(s.min_w)},
                     {"a_lambda_norm", detail::num(s.a_lambda_norm)},
                     {"lambda0", s.lambda0}});
  return {{"axis_angle", r.axis_angle}, {"axis", {r.ex, r.ey}},   {"lambda0", r.lambda0},
          {"lambda_start", r.lambda_start}, {"tol", r.tol},       {"violated", r.violated},
          {"reaches_origin", r.reaches_origin()}, {"certificate", steps}};
}

inline Json to_json(const RadialDeviation& d) {
  return {{"max_deviation", d.max_deviation}, {"radius_of_max", d.radius_of_max}, {"h", d.h},
          {"threshold", d.threshold},         {"strictly_decreasing", d.strictly_decreasing},
          {"passed", d.passed()},             {"radii", d.radii},
          {"deviation", d.deviation},         {"averages", d.averages}};
}

// --- gallery ----------------------------------------------------------------

inline Json to_json(const GalleryReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back({{"property", c.property},
                      {"status", to_string(c.status)},
                      {"value", detail::num(c.value)},
                      {"threshold", detail::num(c.threshold)},
                      {"detail", c.detail}});
  return {{"id", r.id},         {"label", r.label},   {"dim", r.dim}, {"nonlinearity", r.nonlinearity},
          {"checks", checks},   {"flags", r.flags},   {"overall", to_string(r.overall())}};
}

inline Json catalog_json() {
  Json a = Json::array();
  for (const auto& e : list_entries())
    a.push_back({{"id", e.id}, {"label", e.label}, {"summary", e.summary}, {"default_dim", e.default_dim}});
  return a;
}

// --- files ------------------------------------------------------------------

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline void write_json(const std::string& path, const Json& j) { write_text(path, j.dump(2) + "\n"); }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline Json read_json(const std::string& path) {
  try {
    return Json::parse(read_text(path));
  } catch (const Json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

}  // namespace elliptica
