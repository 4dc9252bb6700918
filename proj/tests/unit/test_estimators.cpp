#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numbers>
#include <random>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "oracles.hpp"
#include "pathlab/estimators/checks.hpp"
#include "pathlab/estimators/heat_kernel.hpp"
#include "pathlab/estimators/monte_carlo.hpp"
#include "pathlab/estimators/report.hpp"
#include "pathlab/estimators/statistics.hpp"

using namespace pathlab;
using namespace pathlab::estimators;
using pathfunc::CylinderFunction;
using pathfunc::PhiProfile;

namespace {

const double kPi = std::numbers::pi;

VecA vec(std::initializer_list<double> x) {
  VecA v(static_cast<int>(x.size()));
  int i = 0;
  for (double e : x) v[i++] = e;
  return v;
}

template <class F>
double gk(F f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
}

VecA sphere_point(double theta, double phi) {
  return vec({std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)});
}

struct WorkerGuard {
  explicit WorkerGuard(const char* n) { setenv("PATHLAB_WORKERS", n, 1); }
  ~WorkerGuard() { unsetenv("PATHLAB_WORKERS"); }
};

}  // namespace

TEST_SUITE("estimators") {

TEST_CASE("euclidean kernel normalisation point") {
  const auto M = ManifoldModel::euclidean(1);
  const VecA x = vec({0.0});
  CHECK(heat_kernel(M, x, x, 1.0 / (4.0 * kPi)) == doctest::Approx(1.0).epsilon(1e-14));
  const auto E2 = ManifoldModel::euclidean(2);
  CHECK(heat_kernel(E2, vec({0, 0}), vec({1, 1}), 0.5) == doctest::Approx(oracle::gauss_density(2.0, 2, 0.5)));
}

TEST_CASE("sphere zonal series against gegenbauer polynomials") {
  for (int n : {2, 3}) {
    for (double r : {1.0, 2.0}) {
      for (double t : {0.05, 0.3, 1.0}) {
        for (double u : {-0.9, 0.0, 0.5, 0.99}) {
          const auto z = sphere_zonal(n, r, t, u);
          CHECK(z.z == doctest::Approx(oracle::sphere_kernel(n, r, t, u)).epsilon(1e-9));
          const double h = 1e-5;
          const double fd = (oracle::sphere_kernel(n, r, t, u + h) - oracle::sphere_kernel(n, r, t, u - h)) / (2 * h);
          CHECK(z.dz == doctest::Approx(fd).epsilon(1e-5));
        }
      }
    }
  }
  CHECK_THROWS(sphere_zonal(2, 1.0, 1e-7, 0.5));
}

TEST_CASE("sphere kernel integrates to one and satisfies the semigroup law") {
  const auto M = ManifoldModel::sphere(2, 1.0);
  const VecA x = M.default_base();
  for (double t : {0.05, 0.5}) {
    const double mass = 2 * kPi * gk([&](double th) { return heat_kernel(M, x, sphere_point(th, 0.0), t) * std::sin(th); }, 0, kPi);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
  }
  const VecA y = sphere_point(1.1, 0.4);
  const double s = 0.2, t = 0.3;
  const double conv = gk([&](double th) {
    return std::sin(th) * gk([&](double ph) {
             const VecA z = sphere_point(th, ph);
             return heat_kernel(M, x, z, s) * heat_kernel(M, z, y, t);
           }, 0, 2 * kPi);
  }, 0, kPi);
  CHECK(conv == doctest::Approx(heat_kernel(M, x, y, s + t)).epsilon(1e-7));
  CHECK(sphere_heat_expectation(1.0, x, 0.7, [&](const VecA& z) { return z.dot(x); }) ==
        doctest::Approx(std::exp(-1.4)).epsilon(1e-9));
}

TEST_CASE("torus image kernel against the fourier series") {
  for (double L : {1.0, 2.5}) {
    for (double t : {0.01, 0.2, 1.0}) {
      for (double d : {0.0, 0.3, 0.5 * L, 0.9 * L}) {
        double f = 1.0 / L;
        for (int j = 1; j < 400; ++j) {
          const double k = 2 * kPi * j / L;
          f += 2.0 / L * std::exp(-k * k * t) * std::cos(k * d);
        }
        CHECK(torus_image_kernel(d, L, t).k == doctest::Approx(f).epsilon(1e-10));
      }
    }
  }
  const auto T = ManifoldModel::flat_torus({1.0, 2.0});
  const VecA x = vec({0.2, 0.3});
  double mass = 0.0;
  const int q = 64;
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) mass += heat_kernel(T, x, vec({(i + 0.5) / q, 2.0 * (j + 0.5) / q}), 0.05);
  CHECK(mass * 2.0 / (q * q) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("kernel jet against finite differences") {
  const auto S = ManifoldModel::sphere(2, 1.0);
  const VecA x = S.default_base();
  const VecA y = sphere_point(0.8, 0.3);
  const auto jet = heat_kernel_jet(S, x, y, 0.4);
  const double h = 1e-6;
  for (int a = 0; a < 3; ++a) {
    VecA up = y, dn = y;
    up[a] += h;
    dn[a] -= h;
    // Ambient extension of the zonal kernel: u = <x,y>/r^2 without renormalising y.
    const double fd = (sphere_zonal(2, 1.0, 0.4, x.dot(up)).z - sphere_zonal(2, 1.0, 0.4, x.dot(dn)).z) / (2 * h);
    CHECK(jet.grad[a] == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK_THROWS_AS(heat_kernel(ManifoldModel::hyperbolic(2, 1.0), vec({0, 0, 1}), vec({0, 0, 1}), 1.0), UnsupportedOracle);
  CHECK_FALSE(has_heat_kernel(ManifoldModel::parse("sphere(2,1)*hyperbolic(2,1)")));
  CHECK(has_heat_kernel(ManifoldModel::parse("sphere(2,1)*euclidean(1)")));
}

TEST_CASE("heat flow oracle of a gaussian bump is a wider gaussian") {
  const auto E = ManifoldModel::euclidean(2);
  const VecA c = vec({0.3, -0.2});
  const double sigma = 0.7, t = 0.25;
  const auto f = pathfunc::gaussian_bump(c, sigma);
  const VecA x = vec({0.1, 0.4});
  const auto jet = heat_flow_oracle(E, [&](const VecA& y) {
    const VecA ys[] = {y};
    return f->value(ys);
  }, x, t);
  const double s2 = sigma * sigma + 2 * t;
  const VecA d = x - c;
  const double val = sigma * sigma / s2 * std::exp(-d.squaredNorm() / (2 * s2));
  CHECK(jet.value == doctest::Approx(val).epsilon(1e-8));
  for (int a = 0; a < 2; ++a) CHECK(jet.grad[a] == doctest::Approx(-val * d[a] / s2).epsilon(1e-7));
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      CHECK(jet.hess(a, b) == doctest::Approx(val * (d[a] * d[b] / (s2 * s2) - (a == b ? 1.0 / s2 : 0.0))).epsilon(1e-6));
}

TEST_CASE("pairwise sum") {
  std::vector<double> x(1000003, 0.1);
  CHECK(pairwise_sum(x) == doctest::Approx(100000.3).epsilon(1e-14));
  std::vector<double> y{1e16, 1.0, -1e16, 1.0};
  CHECK(pairwise_sum(std::span<const double>()) == 0.0);
  CHECK(pairwise_sum(y) == pairwise_sum(y));
}

TEST_CASE("sample table moments and delta method") {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::size_t n = 5000;
  SampleTable t(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = g(rng);
    t.row(i)[0] = 2.0 + z;
    t.row(i)[1] = 3.0 + 0.5 * z + g(rng);
  }
  const Eigen::VectorXd mu = t.means();
  const Eigen::MatrixXd cov = t.covariance();
  CHECK(t.mean(0).value == doctest::Approx(mu[0]));
  CHECK(t.mean(0).se == doctest::Approx(std::sqrt(cov(0, 0) / n)).epsilon(1e-12));
  const auto r = t.delta([](const Eigen::VectorXd& m) { return m[0] / m[1]; });
  Eigen::Vector2d grad(1.0 / mu[1], -mu[0] / (mu[1] * mu[1]));
  CHECK(r.value == doctest::Approx(mu[0] / mu[1]).epsilon(1e-14));
  CHECK(r.se == doctest::Approx(std::sqrt(grad.dot(cov * grad) / n)).epsilon(1e-6));
  std::vector<char> keep(n, 1);
  keep[0] = keep[7] = 0;
  t.compact(keep);
  CHECK(t.rows() == n - 2);
}

TEST_CASE("verdicts") {
  CHECK(lower_bound_verdict({0.1, 1.0}, 3) == Verdict::kHolds);
  CHECK(lower_bound_verdict({-2.9, 1.0}, 3) == Verdict::kHoldsWithinCI);
  CHECK(lower_bound_verdict({-3.1, 1.0}, 3) == Verdict::kViolated);
  CHECK(upper_bound_verdict({-0.1, 1.0}, 3) == Verdict::kHolds);
  CHECK(zero_verdict({0.0, 0.0}, 3) == Verdict::kHolds);
  CHECK(zero_verdict({1e-3, 0.0}, 3) == Verdict::kViolated);
  CHECK(to_string(Verdict::kHoldsWithinCI) == "holds-within-CI");
  CHECK(to_string(Verdict::kInfo) == "-");
  CHECK(acceptable(Verdict::kUnasserted));
  CHECK_FALSE(acceptable(Verdict::kViolated));
  CHECK(vector_component(0) == "v_1");
  CHECK(matrix_component(0, 1) == "h_12");
}

TEST_CASE("monte carlo of a constant is exact") {
  const auto s = make_setup(ManifoldModel::sphere(2, 1.0), 1.0, 50, 200, 1);
  const auto r = mc_expect(s, CylinderFunction({0.5}, pathfunc::constant(3.0)));
  CHECK(r.estimate[0] == 3.0);
  CHECK(r.se[0] == 0.0);
}

TEST_CASE("euclidean heat kernel functional: E[rho_1(0, gamma_1)] = 1/(8 pi)") {
  const auto M = ManifoldModel::euclidean(2);
  const auto s = make_setup(M, 1.0, 10, 40000, 3);
  const auto r = mc_expect(s, CylinderFunction({1.0}, pathfunc::heat_kernel_at(M, vec({0, 0}), 1.0)));
  CHECK(std::abs(r.estimate[0] - 1.0 / (8.0 * kPi)) < 3.0 * r.se[0]);
}

TEST_CASE("table is identical for any worker count") {
  const auto s = make_setup(ManifoldModel::sphere(2, 1.0), 1.0, 100, 1000, 5);
  Assembler a = [](const FramePath& p, double* row) {
    row[0] = p.point(100)[0];
    row[1] = p.point(50)[2];
  };
  PathRun r1, r4;
  {
    WorkerGuard w("1");
    CHECK(worker_count() == 1);
    r1 = run_paths(s, 2, a);
  }
  {
    WorkerGuard w("4");
    CHECK(worker_count() == 4);
    r4 = run_paths(s, 2, a);
  }
  for (std::size_t i = 0; i < 1000; ++i) {
    CHECK(r1.table(i, 0) == r4.table(i, 0));
    CHECK(r1.table(i, 1) == r4.table(i, 1));
  }
  CHECK(r1.table.mean(0).value == r4.table.mean(0).value);
}

TEST_CASE("non-finite rows are excluded up to one in a thousand") {
  auto s = make_setup(ManifoldModel::euclidean(2), 1.0, 4, 10000, 1);
  Assembler few = [](const FramePath& p, double* row) { row[0] = p.index % 2000 == 0 ? NAN : 1.0; };
  const auto r = run_paths(s, 1, few);
  CHECK(r.excluded == 5);
  CHECK(r.table.rows() == 9995);
  Assembler many = [](const FramePath& p, double* row) { row[0] = p.index % 500 == 0 ? INFINITY : 1.0; };
  CHECK_THROWS_AS(run_paths(s, 1, many), NonFiniteError);
}

TEST_CASE("noise check") {
  const auto s = make_setup(ManifoldModel::euclidean(2), 1.0, 20, 20000, 7);
  const auto r = check_noise(s);
  CHECK(r.passed());
  CHECK(r.get("E[W_T W_T^T]", "h_11").est.value == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("integration by parts: euclidean coordinate functional has exact lhs 1") {
  const auto M = ManifoldModel::euclidean(2);
  const auto s = make_setup(M, 1.0, 100, 20000, 8);
  const CylinderFunction F({0.5}, pathfunc::coordinate_linear(vec({1.0, 0.0})));
  const CylinderFunction G({1.0}, pathfunc::constant(1.0));
  const auto r = check_ibp(s, F, G, PhiProfile::ramp(s.grid, 0.5), VecN::Unit(2, 0));
  CHECK(r.get("lhs").est.value == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.get("lhs").est.se < 1e-12);
  CHECK(std::abs(r.get("rhs").est.value - 1.0) < 3.0 * r.get("rhs").est.se);
  CHECK(r.passed());
}

TEST_CASE("harnack of a constant is (n/2)||phi||^2 exactly on flat space") {
  const auto s = make_setup(ManifoldModel::flat_torus({1.0, 1.0}), 1.0, 100, 500, 9);
  const auto phi = PhiProfile::sine(s.grid);
  const auto rep = differential_harnack(s, CylinderFunction({0.5, 1.0}, pathfunc::product_of_two(
                                                                          pathfunc::constant(2.0), pathfunc::constant(0.5))),
                                        phi);
  CHECK(rep.combined.value == doctest::Approx(phi.norm2()).epsilon(1e-12));
  CHECK(rep.recompute() == doctest::Approx(rep.combined.value).epsilon(1e-12));
  CHECK(rep.verdict == Verdict::kHolds);
  CHECK(rep.moment_ratio.value == doctest::Approx(1.0));
}

TEST_CASE("halfway forms for a constant functional") {
  const auto s = make_setup(ManifoldModel::euclidean(2), 1.0, 100, 20000, 10);
  const auto phi = PhiProfile::ramp(s.grid, 0.5);
  const auto r = halfway_harnack(s, CylinderFunction({1.0}, pathfunc::constant(1.0)), phi, VecN::Unit(2, 0));
  const auto q4 = r.get("Q_F four-term").est, qv = r.get("Q_F variance").est;
  CHECK(q4.value == doctest::Approx(0.5 * phi.norm2()).epsilon(1e-12));
  CHECK(std::abs(qv.value - 0.5 * phi.norm2()) < 3.0 * qv.se + 1e-12);
  CHECK(r.passed());
}

TEST_CASE("cameron-martin with h = 0 and with a constant functional") {
  const auto s = make_setup(ManifoldModel::euclidean(2), 1.0, 100, 20000, 11);
  const auto zero = malliavin::deterministic_process(PhiProfile::ramp(s.grid, 1.0), VecN::Zero(2));
  const CylinderFunction F({0.5}, pathfunc::gaussian_bump(vec({0.5, 0.0}), 1.0));
  const auto r0 = check_cameron_martin(s, F, zero);
  CHECK(r0.get("lhs-rhs").est.value == 0.0);
  const auto h = malliavin::deterministic_process(PhiProfile::sine(s.grid), VecN::Unit(2, 1));
  const auto r1 = check_cameron_martin(s, CylinderFunction({1.0}, pathfunc::constant(1.0)), h);
  CHECK(std::abs(r1.get("E[F weight]").est.value - 1.0) < 3.0 * r1.get("E[F weight]").est.se);
  CHECK(r1.passed());
}

TEST_CASE("convexity defect of a constant functional") {
  const auto s = make_setup(ManifoldModel::euclidean(2), 1.0, 100, 200, 12);
  const auto h1 = malliavin::deterministic_process(PhiProfile::sine(s.grid), VecN::Unit(2, 0));
  const auto h2 = malliavin::deterministic_process(PhiProfile::ramp(s.grid, 0.5), VecN::Unit(2, 1));
  const auto r = check_convexity(s, CylinderFunction({1.0}, pathfunc::constant(1.0)), h1, h2);
  const double d2 = (h1 + h2.scaled(-1.0)).h_norm2();
  CHECK(r.get("midpoint defect").est.value == doctest::Approx(-d2 / 16.0).epsilon(1e-12));
}

TEST_CASE("li-yau recovery on a small run") {
  const auto M = ManifoldModel::euclidean(2);
  const auto s = make_setup(M, 1.0, 100, 20000, 13);
  const auto r = liyau_recovery(s, pathfunc::heat_kernel_at(M, vec({0, 0}), 1.0), 1.0);
  CHECK(r.get("li-yau lhs oracle").est.value == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.passed());
}

TEST_CASE("csv layout") {
  std::ostringstream out;
  write_csv_header(out);
  CHECK(out.str() == "experiment,label,component,estimate,stderr,N,seed,dt,T,model,verdict\n");
  CheckResult r;
  r.experiment = "ibp";
  r.add("lhs", {0.1, 0.25});
  r.add("lhs-rhs", {0.0, 0.5}, Verdict::kHolds);
  std::ostringstream rows;
  write_csv_rows(rows, r, {100, 7, 0.001, 1.0, "euclidean(2)"}, std::string("4"));
  CHECK(rows.str() ==
        "4,ibp,lhs,value,0.10000000000000001,0.25,100,7,0.001,1,euclidean(2),-\n"
        "4,ibp,lhs-rhs,value,0,0.5,100,7,0.001,1,euclidean(2),holds\n");
}

}  // TEST_SUITE
