// Acceptance run: one PASS/FAIL line per criterion, wall time included.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "elliptica/asymptotics.hpp"
#include "elliptica/branch.hpp"
#include "elliptica/emden.hpp"
#include "elliptica/exponents.hpp"
#include "elliptica/gallery.hpp"
#include "elliptica/inequality_lab.hpp"
#include "elliptica/radial_solver.hpp"
#include "elliptica/stability.hpp"
#include "elliptica/symmetry.hpp"

using namespace elliptica;

namespace {

struct Outcome {
  bool ok = true;
  std::ostringstream note;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      note << " [failed: " << what << "]";
    }
  }
};

RadialProfile exp_n10(double r_max) {
  ShootingParams sp;
  sp.dim = 10;
  sp.center_value = 4.0;
  sp.r_max = r_max;
  return shoot(make_exp(), sp);
}

// bubble dilated by lam: still a solution, unstable part pushed inside B_1
RadialProfile scaled_bubble(int N, double lam) {
  auto b = detail::bubble_profile(N, 1e4 * lam);
  std::vector<double> r, u, du;
  for (std::size_t i = 0; i < b.size(); ++i) {
    double s = b.r()[i] / lam;
    if (s > 1e4 * (1.0 + 1e-12)) break;
    r.push_back(s);
    u.push_back(std::pow(lam, (N - 2) / 2.0) * b.u()[i]);
    du.push_back(std::pow(lam, N / 2.0) * b.du()[i]);
  }
  return RadialProfile(N, r, u, du, std::nullopt, Json::object(), "bubble-N" + std::to_string(N) + "-scaled");
}

// --- 1 ---------------------------------------------------------------------
void emden_threshold(Outcome& o) {
  int wrong = 0;
  for (int N = 3; N <= 20; ++N) {
    auto c = classify_fixed_point(build_emden(EmdenSpec::exp(), N));
    long long d = exp_discriminant_exact(N);
    auto want = N <= 9 ? FixedPointClass::SpiralSink : N == 10 ? FixedPointClass::DegenerateNode : FixedPointClass::RealSink;
    if (c != want || (d < 0) != (N <= 9) || (d == 0) != (N == 10)) ++wrong;
  }
  o.note << "N=3..20 classified, discriminant(9,10,11) = " << exp_discriminant_exact(9) << ","
         << exp_discriminant_exact(10) << "," << exp_discriminant_exact(11);
  o.require(wrong == 0, std::to_string(wrong) + " dimensions misclassified");
}

// --- 2 ---------------------------------------------------------------------
void hardy_borderline(Outcome& o) {
  const Annulus ann{0.1, 10.0};
  for (int N : {9, 10, 11}) {
    auto s = singular_solution(EmdenSpec::exp(), N);
    double l[3];
    std::size_t res[3] = {1024, 2048, 4096};
    for (int k = 0; k < 3; ++k) l[k] = singular_spectrum(s, {ann}, res[k]).lambda1[0];
    double ratio = (l[0] - l[1]) / (l[1] - l[2]);
    o.note << " N=" << N << ": " << l[2] << " (ratio " << ratio << ")";
    if (N == 9) o.require(l[2] < -1e-3, "N=9 not below -1e-3");
    else o.require(l[2] >= -1e-4, "N=" + std::to_string(N) + " below -1e-4");
    o.require(ratio > 3.0 && ratio < 5.0, "N=" + std::to_string(N) + " refinement not second order");
  }
}

// --- 3 ---------------------------------------------------------------------
void cancellation(Outcome& o) {
  auto z = zeta_theorem1(5.0, 50.0);
  double worst = 0.0;
  // sample points in [0, R): the logarithmic cap is outside the identity
  for (int i = 1; i <= 1000; ++i) {
    double r = 50.0 * (i - 0.5) / 1000.0, rz = z.r_dzeta(r);
    worst = std::max(worst, std::abs(rz * ((6.0 - 10) * z(r) + rz)) / (1.0 + z(r) * z(r)));
  }
  double id = 0.0;
  for (int N = 3; N <= 64; ++N) id = std::max(id, std::abs(cancellation_identity(N)));
  o.note << "integrand at N=10 " << worst << ", identity N=3..64 " << id;
  o.require(worst <= 1e-12, "integrand");
  o.require(id <= 1e-12, "identity");
}

// --- 4 ---------------------------------------------------------------------
void ledgers(Outcome& o) {
  struct Case {
    std::string name;
    RadialProfile p;
    Nonlinearity f;
    TestFunction z22, zpo;
  };
  std::vector<Case> cases;
  {
    auto p = exp_n10(1000.0);
    cases.push_back({"exp N=10", p, make_exp(), zeta_theorem1(5.0, 30.0), zeta_theorem8(alpha_exponent(10), 5.0, 30.0)});
  }
  for (int N : {3, 5}) {
    // stable outside B_1, so both cut-offs vanish on the unit ball
    auto z = zeta_theorem8(alpha_exponent(N), 10.0, 100.0);
    cases.push_back({"bubble N=" + std::to_string(N), scaled_bubble(N, N == 3 ? 4.0 : 8.0),
                     make_power((N + 2.0) / (N - 2.0)), z, z});
  }
  for (auto& c : cases) {
    for (int kind = 0; kind < 2; ++kind) {
      for (int level : {1, 2}) {
        LedgerOptions lo;
        lo.level = level;
        auto L = kind == 0 ? evaluate_radial_22(c.p, c.z22, c.f, lo) : evaluate_pohozaev(c.p, c.zpo, c.f, lo);
        bool fine = L.slack >= -L.quadrature_error && L.quadrature_error < 0.01 * L.largest_term();
        o.require(fine, c.name + " " + L.kind + " level " + std::to_string(level));
        if (level == 2) o.note << " " << c.name << " " << L.kind << " slack " << L.slack << " err " << L.quadrature_error << ";";
      }
    }
  }
}

// --- 5 ---------------------------------------------------------------------
void sharp_decay(Outcome& o) {
  for (int N : {3, 4, 5}) {
    auto p = normalize_to_zero_limit(detail::bubble_profile(N));
    auto s = fit_sup_decay(p);
    auto g = fit_gradient_tail(p);
    auto l = l2star_norm(p);
    o.note << " N=" << N << ": sup " << s.exponent << " <= " << sup_decay_bound(N) + 0.05 << ", grad " << g.exponent
           << " <= " << gradient_tail_bound(N) + 0.05 << ", L2* " << to_string(l.verdict) << ";";
    o.require(s.exponent <= sup_decay_bound(N) + 0.05 && s.verdict == Verdict::Holds, "sup N=" + std::to_string(N));
    o.require(g.exponent <= gradient_tail_bound(N) + 0.05 && g.verdict == Verdict::Holds, "grad N=" + std::to_string(N));
    o.require(l.verdict == NormVerdict::Finite, "L2* N=" + std::to_string(N));
  }
}

// --- 6 ---------------------------------------------------------------------
void morse_bubble(Outcome& o) {
  auto p = detail::bubble_profile(3, 1e4);
  std::vector<double> radii{20.0, 50.0, 100.0, 200.0, 500.0, 1000.0, 2000.0, 5000.0, 10000.0};
  std::vector<std::size_t> prev;
  for (std::size_t res : {2048u, 4096u}) {
    MorseOptions mo;
    mo.resolution = res;
    mo.find_stable_outside = false;
    auto rep = morse_index_radial(p, make_power(5.0), radii, mo);
    bool ones = std::all_of(rep.neg_count.begin(), rep.neg_count.end(), [](std::size_t c) { return c == 1; });
    o.require(ones, "neg_count != 1 at resolution " + std::to_string(res));
    if (!prev.empty()) o.require(prev == rep.neg_count, "resolutions disagree");
    prev = rep.neg_count;
  }
  o.note << "neg_count = 1 on " << radii.size() << " balls R in [20, 1e4] at 2048 and 4096";
}

// --- 7 ---------------------------------------------------------------------
void liouville_branch(Outcome& o) {
  BranchOptions bo;
  bo.samples = 64;
  bo.refine_levels = 0;
  bo.morse_radii = {10.0, 100.0, 1000.0};
  bo.r_max = 1000.0;
  {
    auto eo = bo;
    eo.log_spacing = false;
    auto b = find_bounded_stable_branch(make_exp(), 10, -2.0, 10.0, eo);
    o.note << " exp N=10: " << b.bounded_stable_count() << "/" << b.entries.size();
    o.require(b.bounded_stable_count() == 0, "exp N=10 has a bounded stable profile");
  }
  // the profile's length scale a^{-(p-1)/2} stays <= 10, so R = 1000 spans >= 100 of them
  for (double p : {3.0, 5.0, 7.0}) {
    auto b = find_bounded_stable_branch(make_power(p), 10, std::pow(10.0, -2.0 / (p - 1.0)), 10.0, bo);
    o.note << " power:" << p << " N=10: " << b.bounded_stable_count() << "/" << b.entries.size();
    o.require(b.bounded_stable_count() == 0, "power " + std::to_string(p) + " N=10 has a bounded stable profile");
  }
  double pc = *hardy_power_threshold(11);
  double p = 7.0;
  auto b = find_bounded_stable_branch(make_power(p), 11, std::pow(10.0, -2.0 / (p - 1.0)), 10.0, bo);
  o.note << " power:7 N=11 (threshold " << pc << "): " << b.bounded_stable_count() << "/" << b.entries.size();
  o.require(p > pc, "p not above threshold");
  o.require(b.bounded_stable_count() >= 1, "no bounded stable profile at N=11");
}

// --- 8 ---------------------------------------------------------------------
struct SymmetryRun {
  bool axes_ok = true;
  double worst_lambda0 = 0.0;
  RadialDeviation dev;
};

SymmetryRun symmetry_at(double h) {
  auto f = make_truncated(2.0, 1.0);
  auto radial = dirichlet_ball_profile(f, 2, 4.0, 2.0, 4.0);
  GridSolveOptions go;
  go.initial_guess = [&](double x, double y) { return radial.u_at(std::min(std::hypot(x, y), 4.0)); };
  auto g = solve_grid_2d(f, Disk{4.0}, BoundaryCondition::Dirichlet0, h, 1.0, go);
  SymmetryRun s;
  MovingPlaneOptions mo;
  mo.steps = 32;
  for (const auto& r : moving_plane_axes(g, 8, mo)) {
    s.axes_ok = s.axes_ok && r.reaches_origin();
    s.worst_lambda0 = std::min(s.worst_lambda0, r.lambda0);
  }
  s.dev = radial_deviation(g);
  return s;
}

void moving_planes(Outcome& o) {
  const double h = 1.0 / 64.0;
  auto c = symmetry_at(h);
  auto f = symmetry_at(h / 2.0);
  double ratio = c.dev.max_deviation / f.dev.max_deviation;
  o.note << "lambda0 min " << c.worst_lambda0 << " (tol " << h * h << "), deviation " << c.dev.max_deviation
         << " <= " << c.dev.threshold << ", h/2 deviation " << f.dev.max_deviation << " (ratio " << ratio << ")";
  o.require(c.axes_ok, "an axis stopped before the origin");
  o.require(c.dev.passed(), "radial deviation");
  o.require(ratio >= 3.0, "no second-order improvement at h/2");
}

// --- 9 ---------------------------------------------------------------------
void gallery(Outcome& o) {
  auto all = verify_all();
  int residual_fail = 0;
  for (const auto& r : all) {
    for (const auto& c : r.checks)
      if (c.property.rfind("residual", 0) == 0 && c.status != CheckStatus::Pass) ++residual_fail;
    o.require(r.overall() != CheckStatus::Fail, r.id + " failed");
  }
  const GalleryReport *para = nullptr, *tanh = nullptr;
  for (const auto& r : all) {
    if (r.id == "paraboloid") para = &r;
    if (r.id == "tanh") tanh = &r;
  }
  o.note << all.size() << " entries, residual failures " << residual_fail;
  o.require(residual_fail == 0, "residual");
  o.require(para && para->has_flag("stable") && para->has_flag("not-bounded-below"), "paraboloid flags");
  o.require(tanh && tanh->has_flag("sign-changing-f"), "tanh flag");
}

// --- 10 --------------------------------------------------------------------
void weighted_energy(Outcome& o) {
  auto radii = dyadic_radii(4, 10);
  auto g = weighted_energy_growth(exp_n10(1100.0), radii);
  const int N = 10;
  auto q = sample_profile(N, graded_mesh(1100.0, 0.01, 1.02), [](double r) { return -r * r; },
                          [](double r) { return -2.0 * r; });
  auto h = weighted_energy_growth(q, radii);
  // E(R)/ln R = 4|S| + c/ln R on the tail; c is the measured constant
  double S = sphere_area(N);
  double c = (g.ratio.back() - 4.0 * S) * std::log(radii.back());
  o.note << "exp ratio " << g.ratio.front() << " -> " << g.ratio.back() << " (tail constant " << c / S
         << " |S|), paraboloid " << h.ratio.front() << " -> " << h.ratio.back();
  o.require(g.strictly_decreasing, "exp ratio not strictly decreasing");
  o.require(h.strictly_increasing, "paraboloid ratio not strictly increasing");
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> run;
};

}  // namespace

int main() {
  std::vector<Criterion> list{
      {1, "emden-threshold", 1.0, emden_threshold},
      {2, "hardy-borderline", 10.0, hardy_borderline},
      {3, "cancellation-identities", 1.0, cancellation},
      {4, "inequality-ledgers", 30.0, ledgers},
      {5, "sharp-decay", 10.0, sharp_decay},
      {6, "morse-index", 10.0, morse_bubble},
      {7, "liouville-consistency", 300.0, liouville_branch},
      {8, "moving-planes", 120.0, moving_planes},
      {9, "counterexample-gallery", 10.0, gallery},
      {10, "weighted-energy", 10.0, weighted_energy},
  };
  int failed = 0;
  for (auto& c : list) {
    Outcome o;
    auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.ok = false;
      o.note << " [exception: " << e.what() << "]";
    }
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > c.budget_s) {
      o.ok = false;
      o.note << " [over budget " << c.budget_s << " s]";
    }
    if (!o.ok) ++failed;
    std::printf("%s criterion %d %s (%.2f s): %s\n", o.ok ? "PASS" : "FAIL", c.id, c.name, dt, o.note.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(list.size()) - failed, list.size());
  return failed == 0 ? 0 : 1;
}
