// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Every run uses a fixed seed; results of the Monte Carlo checks are also
// written to acceptance.csv in the working directory.

#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathlab/estimators/checks.hpp"
#include "pathlab/estimators/monte_carlo.hpp"
#include "pathlab/estimators/report.hpp"
#include "pathlab/malliavin/process.hpp"
#include "pathlab/pathfunc/cylinder.hpp"
#include "pathlab/sde/frame_path.hpp"
#include "pathlab/sde/integrals.hpp"

using namespace pathlab;
using namespace pathlab::estimators;
using malliavin::AdaptedProcess;
using pathfunc::BasePtr;
using pathfunc::CylinderFunction;
using pathfunc::PhiProfile;
namespace fs = std::filesystem;

namespace {

std::ofstream g_csv;

VecA vec(std::initializer_list<double> x) {
  VecA v(static_cast<int>(x.size()));
  int i = 0;
  for (double e : x) v[i++] = e;
  return v;
}

VecN dir2(double a, double b) {
  VecN v(2);
  v << a, b;
  return v;
}

MCSetup setup(const char* model, double T, std::size_t N, std::uint64_t seed, double dt = 1e-3) {
  return make_setup(ManifoldModel::parse(model), T, static_cast<int>(std::lround(T / dt)), N, seed);
}

void record(const CheckResult& r, const MCSetup& s) {
  write_csv_rows(g_csv, r, {s.paths, s.seed, s.grid.dt(), s.grid.horizon(), s.model->name()});
}

std::string fmt(double x) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", x);
  return b;
}

std::string show(const Estimate& e) { return fmt(e.value) + " +/- " + fmt(e.se); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

BasePtr torus_bump(VecA c, double sigma) { return pathfunc::gaussian_bump(std::move(c), sigma, 1.0, {1.0, 1.0}); }

// 1 ------------------------------------------------------------------------
Outcome noise() {
  Outcome o;
  const auto s = setup("euclidean(2)", 1.0, 100000, 101);
  const auto r = check_noise(s);
  record(r, s);
  for (const char* c : {"h_11", "h_12", "h_21", "h_22"}) {
    const auto& e = r.get("E[W_T W_T^T]", c);
    o.require(acceptable(e.verdict), std::string("cov ") + c + " " + show(e.est));
  }
  for (const char* c : {"v_1", "v_2"}) o.require(acceptable(r.get("E[W_T]", c).verdict), std::string("mean ") + c);
  return o;
}

// 2 ------------------------------------------------------------------------
Outcome heat_flow() {
  Outcome o;
  struct Case {
    const char* model;
    BasePtr f;
  };
  const std::vector<Case> cases{{"euclidean(2)", pathfunc::gaussian_bump(vec({0.5, -0.3}), 0.8)},
                                {"euclidean(2)", pathfunc::gaussian_bump(vec({0.0, 1.0}), 0.4, 2.0)},
                                {"torus(1,1)", torus_bump(vec({0.3, 0.2}), 0.2)},
                                {"torus(1,1)", torus_bump(vec({0.7, 0.6}), 0.35)}};
  std::uint64_t seed = 201;
  for (const auto& c : cases)
    for (double t : {0.25, 1.0}) {
      const auto s = setup(c.model, t, 100000, seed++);
      const auto r = check_heat_flow(s, c.f, t, 3.0, 0.01);
      record(r, s);
      const auto& d = r.get("difference");
      o.require(acceptable(d.verdict), std::string(c.model) + " t=" + fmt(t) + " diff " + show(d.est));
    }
  return o;
}

// 3 ------------------------------------------------------------------------
Outcome ibp() {
  Outcome o;
  struct Case {
    const char* model;
    std::size_t N;
    CylinderFunction F, G;
    std::function<PhiProfile(const sde::TimeGrid&)> phi;
    VecN dir;
  };
  const auto ramp = [](double t0) { return [t0](const sde::TimeGrid& g) { return PhiProfile::ramp(g, t0); }; };
  const auto sine = [](const sde::TimeGrid& g) { return PhiProfile::sine(g); };
  const auto one = CylinderFunction({1.0}, pathfunc::constant(1.0));
  const auto E = ManifoldModel::euclidean(2);
  const auto T = ManifoldModel::flat_torus({1.0, 1.0});
  const auto S = ManifoldModel::sphere(2, 1.0);
  std::vector<Case> cases{
      {"euclidean(2)", 100000, CylinderFunction({0.5}, pathfunc::coordinate_linear(vec({1.0, 0.0}))), one, ramp(0.5),
       dir2(1, 0)},
      {"euclidean(2)", 100000, CylinderFunction({1.0}, pathfunc::gaussian_bump(vec({0.5, 0.0}), 1.0)),
       CylinderFunction({0.5}, pathfunc::gaussian_bump(vec({0.0, -0.5}), 1.5)), sine, dir2(0, 1)},
      {"euclidean(2)", 100000,
       CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(pathfunc::gaussian_bump(vec({0.3, 0.0}), 1.0),
                                                             pathfunc::gaussian_bump(vec({0.0, 0.3}), 1.2))),
       CylinderFunction({1.0}, pathfunc::heat_kernel_at(E, vec({0.0, 0.0}), 1.0)), ramp(1.0), dir2(0.6, 0.8)},
      {"torus(1,1)", 100000, CylinderFunction({1.0}, torus_bump(vec({0.3, 0.2}), 0.25)), one, ramp(1.0), dir2(1, 0)},
      {"torus(1,1)", 100000, CylinderFunction({0.5}, torus_bump(vec({0.5, 0.5}), 0.3)),
       CylinderFunction({1.0}, pathfunc::heat_kernel_at(T, vec({0.0, 0.0}), 0.1)), sine, dir2(0, 1)},
      {"torus(1,1)", 100000,
       CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(torus_bump(vec({0.1, 0.1}), 0.3), torus_bump(vec({0.6, 0.4}), 0.3))),
       one, ramp(0.5), dir2(0.6, -0.8)},
      {"sphere(2,1)", 200000, CylinderFunction({1.0}, pathfunc::gaussian_bump(vec({0.4, 0.2, 0.9}), 0.6)), one,
       ramp(1.0), dir2(0, 1)},
      {"sphere(2,1)", 200000, CylinderFunction({0.5}, pathfunc::gaussian_bump(vec({0.0, 0.5, 0.8}), 0.5)),
       CylinderFunction({1.0}, pathfunc::heat_kernel_at(S, vec({0.0, 0.0, 1.0}), 0.5)), sine, dir2(1, 0)},
      {"sphere(2,1)", 200000,
       CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(pathfunc::gaussian_bump(vec({0.3, 0.0, 0.95}), 0.7),
                                                             pathfunc::gaussian_bump(vec({0.0, -0.3, 0.95}), 0.7))),
       CylinderFunction({0.25}, pathfunc::coordinate_linear(vec({1.0, 1.0, 0.0}), 2.0)), ramp(0.25), dir2(0.8, 0.6)}};
  std::uint64_t seed = 301;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& c = cases[i];
    const auto s = setup(c.model, 1.0, c.N, seed++);
    const auto r = check_ibp(s, c.F, c.G, c.phi(s.grid), c.dir);
    record(r, s);
    const auto& d = r.get("lhs-rhs");
    o.require(acceptable(d.verdict), std::string(c.model) + "#" + std::to_string(i % 3 + 1) + " lhs-rhs " + show(d.est));
    if (i == 0) {
      const auto lhs = r.get("lhs").est, rhs = r.get("rhs").est;
      o.require(std::abs(lhs.value - 1.0) <= 3.0 * lhs.se + 1e-12, "exact lhs " + show(lhs));
      o.require(std::abs(rhs.value - 1.0) <= 3.0 * rhs.se, "rhs vs 1 " + show(rhs));
    }
  }
  return o;
}

// 4 ------------------------------------------------------------------------
Outcome halfway() {
  Outcome o;
  struct Case {
    const char* model;
    std::size_t N;
    CylinderFunction F;
    bool sine;
    VecN dir;
  };
  const std::vector<Case> cases{
      {"torus(1,1)", 100000, CylinderFunction({1.0}, torus_bump(vec({0.3, 0.2}), 0.25)), false, dir2(1, 0)},
      {"torus(1,1)", 100000,
       CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(torus_bump(vec({0.1, 0.1}), 0.3), torus_bump(vec({0.6, 0.4}), 0.3))),
       true, dir2(0.6, 0.8)},
      {"sphere(2,1)", 200000, CylinderFunction({1.0}, pathfunc::gaussian_bump(vec({0.4, 0.2, 0.9}), 0.6)), true,
       dir2(1, 0)}};
  std::uint64_t seed = 401;
  for (const auto& c : cases) {
    const auto s = setup(c.model, 1.0, c.N, seed++);
    const auto phi = c.sine ? PhiProfile::sine(s.grid) : PhiProfile::ramp(s.grid, 1.0);
    const auto r = halfway_harnack(s, c.F, phi, c.dir);
    record(r, s);
    const auto& d = r.get("four-term - variance");
    o.require(acceptable(d.verdict), std::string(c.model) + " diff " + show(d.est));
    o.require(acceptable(r.get("Q_F four-term").verdict), "Q4 " + show(r.get("Q_F four-term").est));
    o.require(acceptable(r.get("Q_F variance").verdict), "Qv " + show(r.get("Q_F variance").est));
  }
  return o;
}

// 5 ------------------------------------------------------------------------
Outcome harnack() {
  Outcome o;
  const auto T = ManifoldModel::flat_torus({1.0, 1.0});
  const std::vector<CylinderFunction> Fs{
      CylinderFunction({1.0}, torus_bump(vec({0.3, 0.2}), 0.25)),
      CylinderFunction({0.5}, torus_bump(vec({0.5, 0.5}), 0.15)),
      CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(torus_bump(vec({0.1, 0.1}), 0.3), torus_bump(vec({0.6, 0.4}), 0.3))),
      CylinderFunction({1.0}, pathfunc::heat_kernel_at(T, vec({0.4, 0.1}), 0.2)),
      CylinderFunction({0.25}, pathfunc::heat_kernel_at(T, vec({0.2, 0.6}), 0.05))};
  std::uint64_t seed = 501;
  int i = 0;
  for (const auto& F : Fs) {
    const auto s = setup("torus(1,1)", 1.0, 100000, seed++);
    const auto phi = i % 2 ? PhiProfile::sine(s.grid) : PhiProfile::ramp(s.grid, 1.0);
    const auto rep = differential_harnack(s, F, phi);
    record(to_result(rep), s);
    o.require(acceptable(rep.verdict) && rep.verdict != Verdict::kUnasserted, "F" + std::to_string(++i) + " " + show(rep.combined));
  }
  const auto s = setup("torus(1,1)", 1.0, 100000, seed++);
  const auto phi = PhiProfile::sine(s.grid);
  const auto rep = differential_harnack(s, CylinderFunction({1.0}, pathfunc::constant(1.0)), phi);
  record(to_result(rep), s);
  o.require(std::abs(rep.combined.value - phi.norm2()) <= 3.0 * rep.combined.se + 1e-12,
            "F=1 " + show(rep.combined) + " vs " + fmt(phi.norm2()));
  return o;
}

// 6 ------------------------------------------------------------------------
Outcome liyau() {
  Outcome o;
  const auto s = setup("euclidean(2)", 1.0, 100000, 601);
  const auto r = liyau_recovery(s, pathfunc::heat_kernel_at(*s.model, vec({0.0, 0.0}), 1.0), 1.0);
  record(r, s);
  const auto lhs = r.get("li-yau lhs path space").est;
  const double oracle = r.get("li-yau lhs oracle").est.value;
  o.require(std::abs(lhs.value - 0.5) <= std::max(3.0 * lhs.se, 0.01), "path-space lhs " + show(lhs));
  o.require(std::abs(oracle - 0.5) <= 0.01, "oracle lhs " + fmt(oracle));
  for (const char* c : {"v_1", "v_2"}) {
    const auto& g = r.get("E[grad_phi F]-oracle", c);
    o.require(acceptable(g.verdict), std::string("grad ") + c + " " + show(g.est));
  }
  return o;
}

// 7 ------------------------------------------------------------------------
Outcome hessian_relation() {
  Outcome o;
  double worst_torus = 0.0, worst_sphere = 0.0;
  {
    auto s = setup("torus(1,1)", 1.0, 200, 701);
    const CylinderFunction F({0.25, 1.0}, pathfunc::product_of_two(torus_bump(vec({0.1, 0.1}), 0.3), torus_bump(vec({0.6, 0.4}), 0.3)));
    const auto phi = PhiProfile::sine(s.grid);
    for (std::size_t i = 0; i < s.paths; ++i) {
      const auto p = sde::simulate_path(s.model, s.base, s.grid, s.seed, i);
      const auto jet = pathfunc::make_jet(F, p);
      const sde::PathContext ctx(p);
      const pathfunc::CurvatureSums sums(ctx, phi, jet.knots);
      worst_torus = std::max(worst_torus, std::abs(pathfunc::phi_laplacian(jet, sums, phi) - pathfunc::l2_phi_laplacian(jet, phi)));
    }
  }
  {
    auto s = setup("sphere(2,1)", 1.0, 200, 702);
    const CylinderFunction F({0.5, 1.0}, pathfunc::product_of_two(pathfunc::gaussian_bump(vec({0.3, 0.0, 0.95}), 0.7),
                                                                  pathfunc::gaussian_bump(vec({0.0, -0.3, 0.95}), 0.7)));
    const auto phi = PhiProfile::sine(s.grid);
    for (std::size_t i = 0; i < s.paths; ++i) {
      const auto p = sde::simulate_path(s.model, s.base, s.grid, s.seed, i);
      const auto jet = pathfunc::make_jet(F, p);
      const sde::PathContext ctx(p);
      const pathfunc::CurvatureSums sums(ctx, phi, jet.knots, true);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          const VecN ea = VecN::Unit(2, a), eb = VecN::Unit(2, b);
          worst_sphere = std::max(worst_sphere, std::abs(pathfunc::markovian_correction(jet, sums, ea, eb) -
                                                         pathfunc::stratonovich_correction(jet, sums, ea, eb)));
        }
    }
  }
  o.require(worst_torus < 1e-10, "torus max |Lap_phi - Lap^L_phi| " + fmt(worst_torus));
  o.require(worst_sphere < 1e-10, "sphere max correction mismatch " + fmt(worst_sphere));
  return o;
}

// 8 ------------------------------------------------------------------------
Outcome cameron_martin() {
  Outcome o;
  const auto E = ManifoldModel::euclidean(2);
  std::uint64_t seed = 801;
  auto run = [&](const CylinderFunction& F, auto make_phi, VecN dir, const std::string& name) {
    const auto s = setup("euclidean(2)", 1.0, 100000, seed++);
    const auto h = malliavin::deterministic_process(make_phi(s.grid), dir);
    const auto r = check_cameron_martin(s, F, h);
    record(r, s);
    return r;
  };
  const auto r1 = run(CylinderFunction({1.0}, pathfunc::gaussian_bump(vec({0.5, 0.0}), 1.0)),
                      [](const sde::TimeGrid& g) { return PhiProfile::ramp(g, 1.0); }, dir2(1, 0), "bump");
  const auto r2 = run(CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(pathfunc::gaussian_bump(vec({0.3, 0.0}), 1.0),
                                                                            pathfunc::gaussian_bump(vec({0.0, 0.3}), 1.2))),
                      [](const sde::TimeGrid& g) { return PhiProfile::sine(g); }, dir2(0, 0.8), "product");
  const auto r3 = run(CylinderFunction({0.75}, pathfunc::heat_kernel_at(E, vec({0.5, 0.5}), 0.5)),
                      [](const sde::TimeGrid& g) {
                        const double t[] = {0.5, 1.0}, v[] = {1.0, -0.5};
                        return PhiProfile::piecewise(g, t, v);
                      },
                      dir2(0.6, 0.8), "heat-kernel");
  int i = 0;
  for (const auto* r : {&r1, &r2, &r3}) {
    const auto& d = r->get("lhs-rhs");
    o.require(acceptable(d.verdict), "pair " + std::to_string(++i) + " " + show(d.est));
  }
  const auto r4 = run(CylinderFunction({1.0}, pathfunc::constant(1.0)),
                      [](const sde::TimeGrid& g) { return PhiProfile::sine(g); }, dir2(1.0, 1.0), "one");
  const auto w = r4.get("E[F weight]").est;
  o.require(std::abs(w.value - 1.0) <= 3.0 * w.se, "F=1 weight mean " + show(w));
  return o;
}

// 9 ------------------------------------------------------------------------
AdaptedProcess random_profile(std::mt19937_64& rng, const sde::TimeGrid& g) {
  std::uniform_int_distribution<int> kind(0, 2);
  std::normal_distribution<double> n01(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  VecN d = dir2(n01(rng), n01(rng));
  d *= u(rng) / d.norm();
  switch (kind(rng)) {
    case 0: {
      const double t0s[] = {0.25, 0.5, 1.0};
      return malliavin::deterministic_process(PhiProfile::ramp(g, t0s[rng() % 3]), d);
    }
    case 1:
      return malliavin::deterministic_process(PhiProfile::sine(g), d);
    default: {
      const double t[] = {0.5, 1.0};
      const double v[] = {n01(rng), n01(rng)};
      return malliavin::deterministic_process(PhiProfile::piecewise(g, t, v), d);
    }
  }
}

CylinderFunction random_function(std::mt19937_64& rng, const ManifoldModel& E) {
  std::normal_distribution<double> c(0.0, 0.7);
  std::uniform_real_distribution<double> sig(0.5, 1.5);
  switch (rng() % 3) {
    case 0:
      return CylinderFunction({rng() % 2 ? 1.0 : 0.5}, pathfunc::gaussian_bump(vec({c(rng), c(rng)}), sig(rng)));
    case 1:
      return CylinderFunction({1.0}, pathfunc::heat_kernel_at(E, vec({c(rng), c(rng)}), sig(rng)));
    default:
      return CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(pathfunc::gaussian_bump(vec({c(rng), c(rng)}), sig(rng)),
                                                                   pathfunc::gaussian_bump(vec({c(rng), c(rng)}), sig(rng))));
  }
}

Outcome convexity() {
  Outcome o;
  std::mt19937_64 rng(2026);
  const auto E = ManifoldModel::euclidean(2);
  double worst = -1e300;
  for (int i = 0; i < 10; ++i) {
    const auto s = setup("euclidean(2)", 1.0, 100000, 901 + i);
    const auto F = random_function(rng, E);
    const auto h1 = random_profile(rng, s.grid), h2 = random_profile(rng, s.grid);
    const auto r = check_convexity(s, F, h1, h2);
    record(r, s);
    const auto& d = r.get("midpoint defect");
    worst = std::max(worst, d.est.se > 0 ? d.est.value / d.est.se : d.est.value);
    o.require(acceptable(d.verdict), "triple " + std::to_string(i + 1) + " " + show(d.est));
  }
  o.detail = "max defect/se " + fmt(worst) + "; " + o.detail;
  // One-point Gaussian: d^2/de^2 [ln f_t(h_t + e v) + ||h + e u||^2 / 4] = |v|^2 (1/(2t) - 1/(2(t+s0))).
  const auto s = setup("euclidean(2)", 1.0, 100000, 911);
  const double s0 = 1.0, t = 1.0;
  const CylinderFunction F({t}, pathfunc::heat_kernel_at(E, vec({0.0, 0.0}), s0));
  const auto h = malliavin::deterministic_process(PhiProfile::sine(s.grid), dir2(0.3, -0.2));
  const VecN v = dir2(0.6, 0.8);
  const auto u = malliavin::deterministic_process(PhiProfile::ramp(s.grid, t), v);
  const auto e = convexity_second_difference(s, F, h, u);
  const double analytic = v.squaredNorm() * (0.5 / t - 0.5 / (t + s0));
  o.require(std::abs(e.value - analytic) <= 3.0 * e.se, "second difference " + show(e) + " vs " + fmt(analytic));
  return o;
}

// 10 -----------------------------------------------------------------------
Outcome commutator() {
  Outcome o;
  {
    const auto s = setup("euclidean(2)", 1.0, 100000, 1001);
    const auto phi = PhiProfile::ramp(s.grid, 1.0);
    const auto r = check_commutator(s, CylinderFunction({1.0}, pathfunc::gaussian_bump(vec({0.5, 0.0}), 1.0)), phi,
                                    dir2(1, 0), phi, dir2(1, 0));
    record(r, s);
    o.require(acceptable(r.get("lhs-rhs").verdict), "euclidean " + show(r.get("lhs-rhs").est));
  }
  {
    const auto s = setup("sphere(2,1)", 1.0, 200000, 1002);
    const auto r = check_commutator(s, CylinderFunction({1.0}, pathfunc::gaussian_bump(vec({0.4, 0.2, 0.9}), 0.6)),
                                    PhiProfile::ramp(s.grid, 1.0), dir2(1, 0), PhiProfile::sine(s.grid), dir2(0.6, 0.8));
    record(r, s);
    o.require(acceptable(r.get("lhs-rhs").verdict), "sphere " + show(r.get("lhs-rhs").est));
  }
  return o;
}

// 11 -----------------------------------------------------------------------
Outcome hat_map() {
  Outcome o;
  const auto s = setup("sphere(2,1)", 1.0, 2, 1101);
  const auto p = sde::simulate_path(s.model, s.base, s.grid, s.seed, 0);
  const sde::PathContext ctx(p);
  std::vector<VecN> rates(s.grid.steps(), dir2(1, 0));
  const auto v = AdaptedProcess::from_rates(rates, s.grid.dt(), malliavin::Provenance::kDeterministic);
  const auto w = malliavin::hat(v, ctx);
  double err = 0.0;
  for (int i = 0; i <= s.grid.steps(); ++i) {
    const double t = s.grid.knot(i);
    err = std::max(err, (w.value(i) - dir2(t + 0.5 * t * t, 0.0)).norm());
  }
  const double dt = s.grid.dt();
  o.require(err <= dt * dt, "closed form max error " + fmt(err) + " (dt^2 = " + fmt(dt * dt) + ")");

  std::mt19937_64 rng(1102);
  std::normal_distribution<double> n01(0.0, 1.0);
  double worst_trip = 0.0, worst_ratio = 0.0;
  int bound_ok = 0;
  for (const char* model : {"sphere(2,1)", "sphere(2,1)*euclidean(1)"}) {
    const auto sm = setup(model, 1.0, 2, 1103);
    const int n = sm.model->dim();
    const double C = sm.model->ricci_bound() * sm.grid.horizon() / std::sqrt(2.0);
    for (int i = 0; i < 50; ++i) {
      const auto path = sde::simulate_path(sm.model, sm.base, sm.grid, sm.seed, i);
      const sde::PathContext c(path);
      std::vector<VecN> r(sm.grid.steps());
      VecN cur = VecN::Zero(n);
      for (auto& x : r) {
        for (int a = 0; a < n; ++a) cur[a] += 0.1 * n01(rng);
        x = cur;
      }
      const auto x = AdaptedProcess::from_rates(r, sm.grid.dt(), malliavin::Provenance::kDeterministic);
      const auto hx = malliavin::hat(x, c);
      const double trip = std::sqrt((malliavin::hat_inverse(hx, c) + x.scaled(-1.0)).h_norm2());
      worst_trip = std::max(worst_trip, trip);
      const double ratio = std::sqrt(hx.h_norm2() / x.h_norm2());
      worst_ratio = std::max(worst_ratio, ratio / (1.0 + C));
      bound_ok += ratio <= 1.0 + C;
    }
  }
  o.require(worst_trip < 1e-6, "round trip max H-error " + fmt(worst_trip));
  o.require(bound_ok == 100, "norm bound " + std::to_string(bound_ok) + "/100 (max ratio to bound " + fmt(worst_ratio) + ")");
  return o;
}

// 12 -----------------------------------------------------------------------
Outcome error_norms() {
  Outcome o;
  std::vector<Estimate> first, second;
  for (double r : {1.0, 2.0, 4.0}) {
    const std::string model = "sphere(2," + fmt(r) + ")";
    const auto s = setup(model.c_str(), 1.0, 100000, 1201);
    const auto res = error_norm_experiment(s, PhiProfile::ramp(s.grid, 1.0));
    record(res, s);
    first.push_back(res.get("E|sum_a nabla_Va Va|^2").est);
    second.push_back(res.get("E|sum_a nabla_Va hat Va|^2").est);
  }
  o.require(first[0].value > first[1].value && first[1].value > first[2].value,
            "first norm " + fmt(first[0].value) + " > " + fmt(first[1].value) + " > " + fmt(first[2].value));
  o.require(second[0].value > second[1].value && second[1].value > second[2].value,
            "second norm " + fmt(second[0].value) + " > " + fmt(second[1].value) + " > " + fmt(second[2].value));
  const auto s = setup("torus(1,1)", 1.0, 1000, 1202);
  const auto t = error_norm_experiment(s, PhiProfile::ramp(s.grid, 1.0));
  record(t, s);
  o.require(t.get("E|sum_a nabla_Va Va|^2").est.value == 0.0 && t.get("E|sum_a nabla_Va hat Va|^2").est.value == 0.0,
            "torus exactly 0");
  return o;
}

// 13 -----------------------------------------------------------------------
Outcome matrix_harnack_check() {
  Outcome o;
  const auto E = ManifoldModel::euclidean(2);
  MatA q = MatA::Identity(2, 2);
  const std::vector<CylinderFunction> Fs{
      CylinderFunction({1.0}, pathfunc::gaussian_bump(vec({0.5, 0.0}), 1.0)),
      CylinderFunction({0.5}, pathfunc::gaussian_bump(vec({0.0, 1.0}), 0.4, 2.0)),
      CylinderFunction({1.0}, pathfunc::heat_kernel_at(E, vec({0.0, 0.0}), 1.0)),
      CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(pathfunc::gaussian_bump(vec({0.3, 0.0}), 1.0),
                                                            pathfunc::gaussian_bump(vec({0.0, 0.3}), 1.2))),
      CylinderFunction({1.0}, pathfunc::coordinate_quadratic(q, vec({0.2, 0.0}), 1.0))};
  std::uint64_t seed = 1301;
  int i = 0;
  for (const auto& F : Fs) {
    const auto s = setup("euclidean(2)", 1.0, 100000, seed++);
    const auto phi = i % 2 ? PhiProfile::sine(s.grid) : PhiProfile::ramp(s.grid, 1.0);
    const auto rep = matrix_harnack(s, F, phi);
    record(to_result(rep), s);
    o.require(acceptable(rep.verdict) && rep.verdict != Verdict::kUnasserted,
              "F" + std::to_string(++i) + " min eig " + show(rep.min_eigenvalue));
  }
  return o;
}

// 14 -----------------------------------------------------------------------
std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome reproducibility() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / ("pathlab_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  struct Run {
    std::string name;
    nlohmann::json config;
  };
  const std::vector<Run> runs{
      {"li-yau (criterion 6)",
       {{"experiment", "liyau"}, {"F", {{"name", "heat-kernel"}, {"times", {1.0}}, {"s0", 1.0}}}, {"seed", 601}}},
      {"sphere ibp (criterion 3)",
       {{"experiment", "ibp"}, {"model", "sphere(2,1)"}, {"N", 20000}, {"seed", 307},
        {"F", {{"name", "gaussian-bump"}, {"times", {1.0}}, {"center", {0.4, 0.2, 0.9}}, {"sigma", 0.6}}},
        {"G", {{"name", "constant"}}}, {"phi", {{"kind", "ramp"}, {"direction", {0.0, 1.0}}}}}}};
  for (const auto& r : runs) {
    const fs::path cfg = dir / "config.json";
    std::ofstream(cfg) << r.config.dump(2);
    std::vector<std::string> csvs;
    for (const char* workers : {"1", "4"}) {
      const fs::path out = dir / (std::string("w") + workers);
      const std::string cmd = std::string("PATHLAB_WORKERS=") + workers + " " + PATHLAB_CLI_PATH + " run " +
                              cfg.string() + " --out " + out.string() + " >/dev/null 2>&1";
      const int status = std::system(cmd.c_str());
      o.require(WIFEXITED(status) && WEXITSTATUS(status) == 0, r.name + " workers=" + workers + " exit 0");
      csvs.push_back(slurp(out / "results.csv"));
    }
    o.require(!csvs[0].empty() && csvs[0] == csvs[1],
              r.name + " CSV identical across 1 and 4 workers (" + std::to_string(csvs[0].size()) + " bytes)");
  }
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  g_csv.open("acceptance.csv");
  write_csv_header(g_csv);
  struct Criterion {
    int id;
    const char* name;
    Outcome (*run)();
  };
  const Criterion criteria[] = {{1, "noise normalization", noise},
                                {2, "heat-flow consistency", heat_flow},
                                {3, "integration by parts", ibp},
                                {4, "halfway harnack identity", halfway},
                                {5, "ricci-flat differential harnack", harnack},
                                {6, "li-yau recovery", liyau},
                                {7, "hessian relation", hessian_relation},
                                {8, "cameron-martin", cameron_martin},
                                {9, "convexity", convexity},
                                {10, "commutator", commutator},
                                {11, "hat map", hat_map},
                                {12, "error-norm scaling", error_norms},
                                {13, "matrix harnack", matrix_harnack_check},
                                {14, "reproducibility", reproducibility}};
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failed += !o.pass;
    std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << ", " << fmt(secs)
              << " s): " << o.detail << std::endl;
  }
  std::cout << (failed ? std::to_string(failed) + " criteria failed" : std::string("all 14 criteria passed")) << std::endl;
  return failed ? 1 : 0;
}
