#include "pathlab/estimators/checks.hpp"

#include <cmath>
#include <stdexcept>

#include "pathlab/malliavin/connections.hpp"

namespace pathlab::estimators {

using malliavin::deterministic_process;
using malliavin::divergence;
using malliavin::half_ito;
using malliavin::hat;
using pathfunc::CylinderJet;
using pathfunc::CurvatureSums;
using pathfunc::JetOrder;
using sde::PathContext;
using Eigen::VectorXd;

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::kInfo: return "-";
    case Verdict::kHolds: return "holds";
    case Verdict::kHoldsWithinCI: return "holds-within-CI";
    case Verdict::kViolated: return "violated";
    case Verdict::kUnasserted: return "unasserted";
  }
  return "?";
}

bool acceptable(Verdict v) { return v != Verdict::kViolated; }

Verdict lower_bound_verdict(const Estimate& e, double k) {
  if (e.value >= 0.0) return Verdict::kHolds;
  if (e.value >= -k * e.se) return Verdict::kHoldsWithinCI;
  return Verdict::kViolated;
}

Verdict upper_bound_verdict(const Estimate& e, double k) { return lower_bound_verdict({-e.value, e.se}, k); }

Verdict zero_verdict(const Estimate& d, double k, double tol) {
  if (std::abs(d.value) <= tol) return Verdict::kHolds;
  if (std::abs(d.value) <= k * d.se) return Verdict::kHoldsWithinCI;
  return Verdict::kViolated;
}

const Entry& CheckResult::get(const std::string& label, const std::string& component) const {
  for (const Entry& e : entries)
    if (e.label == label && e.component == component) return e;
  throw std::out_of_range("no entry " + label + "/" + component + " in " + experiment);
}

bool CheckResult::passed() const {
  for (const Entry& e : entries)
    if (!acceptable(e.verdict)) return false;
  return true;
}

void CheckResult::add(std::string label, Estimate e, Verdict v, std::string component) {
  entries.push_back({std::move(label), std::move(component), e, v});
}

std::string vector_component(int a) { return "v_" + std::to_string(a + 1); }
std::string matrix_component(int a, int b) { return "h_" + std::to_string(a + 1) + std::to_string(b + 1); }

namespace {

CheckResult start(std::string name, const PathRun& run) {
  CheckResult r;
  r.experiment = std::move(name);
  r.paths = run.table.rows();
  r.excluded = run.excluded;
  r.wall_seconds = run.wall_seconds;
  return r;
}

Estimate difference(const SampleTable& t, int a, int b) {
  return t.delta([a, b](const VectorXd& m) { return m[a] - m[b]; });
}

// Within max(k se, rel |reference|) of a reference value.
Verdict near_verdict(const Estimate& e, double reference, double k, double rel) {
  const double d = std::abs(e.value - reference);
  if (d <= 1e-12) return Verdict::kHolds;
  if (d <= std::max(k * e.se, rel * std::abs(reference))) return Verdict::kHoldsWithinCI;
  return Verdict::kViolated;
}

bool is_euclidean(const ManifoldModel& M) {
  for (const auto& f : M.factors())
    if (f.kind != geometry::FactorKind::kEuclidean) return false;
  return true;
}

void require_positive_mean(const Estimate& mean_f) {
  if (!(mean_f.value > 0.0))
    throw std::domain_error("E[F] estimate is " + std::to_string(mean_f.value) +
                            "; the Harnack quotients need a positive mean");
}

}  // namespace

CheckResult check_noise(const MCSetup& setup, double k) {
  const int n = setup.model->dim();
  const int m = setup.grid.steps();
  const int p = n + n * n;
  const PathRun run = run_paths(setup, p, [&](const FramePath& path, double* row) {
    const VecN w = path.noise_sum(m);
    for (int a = 0; a < n; ++a) row[a] = w[a];
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) row[n + a * n + b] = w[a] * w[b];
  });
  CheckResult r = start("simulate", run);
  const double T = setup.grid.horizon();
  for (int a = 0; a < n; ++a) {
    const Estimate e = run.table.mean(a);
    r.add("E[W_T]", e, zero_verdict(e, k), vector_component(a));
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const Estimate e = run.table.mean(n + a * n + b);
      const double target = a == b ? 2.0 * T : 0.0;
      r.add("E[W_T W_T^T]", e, zero_verdict({e.value - target, e.se}, k), matrix_component(a, b));
    }
  return r;
}

CheckResult check_heat_flow(const MCSetup& setup, const BasePtr& f, double t, double k, double rel) {
  const ManifoldModel& M = *setup.model;
  const auto g = [&f](const VecA& y) { return f->value(std::span<const VecA>(&y, 1)); };
  double oracle = 0.0;
  if (M.is_flat()) {
    oracle = heat_flow_oracle(M, g, setup.base, t).value;
  } else if (M.factors().size() == 1 && M.factors()[0].kind == geometry::FactorKind::kSphere && M.dim() == 2) {
    oracle = sphere_heat_expectation(M.factors()[0].scale, setup.base, t, g);
  } else {
    throw UnsupportedOracle("no heat-flow oracle for " + M.name());
  }
  const CylinderFunction F({t}, f);
  F.knots(setup.grid);
  const PathRun run =
      run_paths(setup, 1, [&](const FramePath& path, double* row) { row[0] = pathfunc::evaluate(F, path); });
  CheckResult r = start("heat-flow", run);
  const Estimate e = run.table.mean(0);
  r.add("E[f(gamma_t)]", e);
  r.add("oracle f_t(x)", {oracle, 0.0});
  r.add("difference", {e.value - oracle, e.se}, near_verdict(e, oracle, k, rel));
  return r;
}

CheckResult check_ibp(const MCSetup& setup, const CylinderFunction& F, const CylinderFunction& G,
                      const PhiProfile& phi, const VecN& direction, double k) {
  F.knots(setup.grid);
  G.knots(setup.grid);
  const AdaptedProcess v = deterministic_process(phi, direction);
  const PathRun run = run_paths(setup, 2, [&](const FramePath& path, double* row) {
    const CylinderJet jf = make_jet(F, path, JetOrder::kGradient);
    const CylinderJet jg = make_jet(G, path, JetOrder::kGradient);
    const PathContext ctx(path);
    const double df = directional_derivative(jf, v.values());
    const double dg = directional_derivative(jg, v.values());
    row[0] = df * jg.value;
    row[1] = -jf.value * dg + jf.value * jg.value * divergence(v, ctx);
  });
  CheckResult r = start("ibp", run);
  r.add("lhs", run.table.mean(0));
  r.add("rhs", run.table.mean(1));
  const Estimate d = difference(run.table, 0, 1);
  r.add("lhs-rhs", d, zero_verdict(d, k));
  return r;
}

CheckResult halfway_harnack(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi,
                            const VecN& direction, double k) {
  F.knots(setup.grid);
  const AdaptedProcess v = deterministic_process(phi, direction);
  // Columns: F, D_V F, D_V D_V F, F delta(mod nabla_V V), F ||hat v||^2, F delta, F delta^2.
  const PathRun run = run_paths(setup, 7, [&](const FramePath& path, double* row) {
    const CylinderJet jet = make_jet(F, path);
    const PathContext ctx(path);
    const CurvatureSums sums(ctx, phi, jet.knots);
    const AdaptedProcess vh = hat(v, ctx);
    const double delta = half_ito(vh, path);
    const double conn = ctx.flat() ? 0.0 : half_ito(malliavin::connection_of_hat(v, v, ctx), path);
    const double f = jet.value;
    row[0] = f;
    row[1] = directional_derivative(jet, v.values());
    row[2] = second_derivative(jet, sums, phi, direction, direction);
    row[3] = f * conn;
    row[4] = f * vh.h_norm2();
    row[5] = f * delta;
    row[6] = f * delta * delta;
  });
  CheckResult r = start("halfway", run);
  const Estimate mf = run.table.mean(0);
  require_positive_mean(mf);
  const auto four = [](const VectorXd& m) {
    const double df = m[1] / m[0];
    return m[2] / m[0] - df * df + m[3] / m[0] + 0.5 * m[4] / m[0];
  };
  const auto var = [](const VectorXd& m) {
    const double a = m[5] / m[0];
    return m[6] / m[0] - a * a;
  };
  const Estimate q4 = run.table.delta(four);
  const Estimate qv = run.table.delta(var);
  const Estimate d = run.table.delta([&](const VectorXd& m) { return four(m) - var(m); });
  r.add("E[F]", mf);
  r.add("E[D_V F]", run.table.mean(1));
  r.add("E[D_V D_V F]", run.table.mean(2));
  r.add("E[F delta(nabla_V V)]", run.table.mean(3));
  r.add("E[F |V|^2]", run.table.mean(4));
  r.add("Q_F four-term", q4, lower_bound_verdict(q4, k));
  r.add("Q_F variance", qv, lower_bound_verdict(qv, k));
  r.add("four-term - variance", d, zero_verdict(d, k));
  return r;
}

CheckResult check_commutator(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi_v,
                             const VecN& dir_v, const PhiProfile& phi_w, const VecN& dir_w, double k) {
  F.knots(setup.grid);
  const AdaptedProcess v = deterministic_process(phi_v, dir_v);
  const AdaptedProcess w = deterministic_process(phi_w, dir_w);
  const PathRun run = run_paths(setup, 2, [&](const FramePath& path, double* row) {
    const CylinderJet jet = make_jet(F, path, JetOrder::kGradient);
    const PathContext ctx(path);
    const AdaptedProcess vh = hat(v, ctx);
    const AdaptedProcess wh = hat(w, ctx);
    const double dv = half_ito(vh, path);
    const double dw = half_ito(wh, path);
    const double conn = ctx.flat() ? 0.0 : half_ito(malliavin::connection_of_hat(v, w, ctx), path);
    const double f = jet.value;
    row[0] = f * dw * dv - directional_derivative(jet, v.values()) * dw;
    row[1] = f * conn + 0.5 * f * malliavin::h_inner(vh, wh);
  });
  CheckResult r = start("commutator", run);
  r.add("lhs", run.table.mean(0));
  r.add("rhs", run.table.mean(1));
  const Estimate d = difference(run.table, 0, 1);
  r.add("lhs-rhs", d, zero_verdict(d, k));
  return r;
}

double HarnackReport::recompute() const {
  double g2 = 0.0;
  for (const Estimate& g : gradient) g2 += g.value * g.value;
  return laplacian.value / mean_f.value - g2 / (mean_f.value * mean_f.value) + 0.5 * dim * phi_norm2;
}

HarnackReport differential_harnack(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi, double k) {
  F.knots(setup.grid);
  const int n = setup.model->dim();
  // Columns: F, grad_phi F (n), Lap_phi F, F^2.
  const PathRun run = run_paths(setup, n + 3, [&](const FramePath& path, double* row) {
    const CylinderJet jet = make_jet(F, path);
    const PathContext ctx(path);
    const CurvatureSums sums(ctx, phi, jet.knots);
    row[0] = jet.value;
    const VecN g = phi_gradient(jet, phi);
    for (int a = 0; a < n; ++a) row[1 + a] = g[a];
    row[n + 1] = phi_laplacian(jet, sums, phi);
    row[n + 2] = jet.value * jet.value;
  });
  HarnackReport h;
  h.dim = n;
  h.paths = run.table.rows();
  h.excluded = run.excluded;
  h.mean_f = run.table.mean(0);
  require_positive_mean(h.mean_f);
  for (int a = 0; a < n; ++a) h.gradient.push_back(run.table.mean(1 + a));
  h.laplacian = run.table.mean(n + 1);
  h.mean_f2 = run.table.mean(n + 2);
  h.phi_norm2 = phi.norm2();
  const double half_n_phi = 0.5 * n * h.phi_norm2;
  h.combined = run.table.delta([&](const VectorXd& m) {
    double g2 = 0.0;
    for (int a = 0; a < n; ++a) g2 += m[1 + a] * m[1 + a];
    return m[n + 1] / m[0] - g2 / (m[0] * m[0]) + half_n_phi;
  });
  h.combined.value = h.recompute();
  h.moment_ratio = run.table.delta([&](const VectorXd& m) { return std::sqrt(m[n + 2]) / m[0]; });
  h.verdict = setup.model->is_ricci_flat() ? lower_bound_verdict(h.combined, k) : Verdict::kUnasserted;
  return h;
}

CheckResult to_result(const HarnackReport& h) {
  CheckResult r;
  r.experiment = "harnack";
  r.paths = h.paths;
  r.excluded = h.excluded;
  r.add("E[Lap_phi F]", h.laplacian);
  for (int a = 0; a < h.dim; ++a) r.add("E[grad_phi F]", h.gradient[a], Verdict::kInfo, vector_component(a));
  r.add("E[F]", h.mean_f);
  r.add("E[F^2]", h.mean_f2);
  r.add("|phi|^2", {h.phi_norm2, 0.0});
  r.add("E[F^2]^(1/2)/E[F]", h.moment_ratio);
  r.add("harnack lhs", h.combined, h.verdict);
  return r;
}

MatrixHarnackReport matrix_harnack(const MCSetup& setup, const CylinderFunction& F, const PhiProfile& phi, double k) {
  F.knots(setup.grid);
  const int n = setup.model->dim();
  // Columns: F, grad (n), Hess (n*n row-major), F^2.
  const int p = 2 + n + n * n;
  const PathRun run = run_paths(setup, p, [&](const FramePath& path, double* row) {
    const CylinderJet jet = make_jet(F, path);
    const PathContext ctx(path);
    const CurvatureSums sums(ctx, phi, jet.knots);
    row[0] = jet.value;
    const VecN g = phi_gradient(jet, phi);
    for (int a = 0; a < n; ++a) row[1 + a] = g[a];
    const MatN h = phi_hessian_matrix(jet, sums, phi);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) row[1 + n + a * n + b] = h(a, b);
    row[p - 1] = jet.value * jet.value;
  });
  MatrixHarnackReport rep;
  rep.dim = n;
  rep.paths = run.table.rows();
  rep.excluded = run.excluded;
  rep.mean_f = run.table.mean(0);
  require_positive_mean(rep.mean_f);
  rep.phi_norm2 = phi.norm2();
  const double half_phi = 0.5 * rep.phi_norm2;
  const auto assemble = [=](const VectorXd& m) {
    Eigen::MatrixXd q(n, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        q(a, b) = m[1 + n + a * n + b] / m[0] - m[1 + a] * m[1 + b] / (m[0] * m[0]) + (a == b ? half_phi : 0.0);
    return Eigen::MatrixXd(0.5 * (q + q.transpose()));
  };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      rep.matrix.push_back(run.table.delta([&, a, b](const VectorXd& m) { return assemble(m)(a, b); }));
  rep.min_eigenvalue = run.table.delta([&](const VectorXd& m) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(assemble(m), Eigen::EigenvaluesOnly).eigenvalues()[0];
  });
  rep.moment_ratio = run.table.delta([&](const VectorXd& m) { return std::sqrt(m[p - 1]) / m[0]; });
  rep.verdict = setup.model->is_ricci_flat() ? lower_bound_verdict(rep.min_eigenvalue, k) : Verdict::kUnasserted;
  return rep;
}

CheckResult to_result(const MatrixHarnackReport& rep) {
  CheckResult r;
  r.experiment = "matrix-harnack";
  r.paths = rep.paths;
  r.excluded = rep.excluded;
  for (int a = 0; a < rep.dim; ++a)
    for (int b = 0; b < rep.dim; ++b)
      r.add("harnack matrix", rep.matrix[a * rep.dim + b], Verdict::kInfo, matrix_component(a, b));
  r.add("E[F]", rep.mean_f);
  r.add("|phi|^2", {rep.phi_norm2, 0.0});
  r.add("E[F^2]^(1/2)/E[F]", rep.moment_ratio);
  r.add("min eigenvalue", rep.min_eigenvalue, rep.verdict);
  return r;
}

CheckResult liyau_recovery(const MCSetup& setup, const BasePtr& f, double t0, double k, double value_rel,
                           double lhs_rel) {
  const ManifoldModel& M = *setup.model;
  if (!M.is_flat()) throw UnsupportedOracle("Li-Yau recovery needs a flat model with a heat-flow oracle");
  const int n = M.dim();
  const CylinderFunction F({t0}, f);
  F.knots(setup.grid);
  const PhiProfile phi = PhiProfile::ramp(setup.grid, t0);
  const FlowJet oracle = heat_flow_oracle(
      M, [&f](const VecA& y) { return f->value(std::span<const VecA>(&y, 1)); }, setup.base, t0);

  const PathRun run = run_paths(setup, n + 2, [&](const FramePath& path, double* row) {
    const CylinderJet jet = make_jet(F, path);
    row[0] = jet.value;
    const VecN g = phi_gradient(jet, phi);
    for (int a = 0; a < n; ++a) row[1 + a] = g[a];
    row[n + 1] = pathfunc::l2_phi_laplacian(jet, phi);
  });
  CheckResult r = start("liyau", run);
  const Estimate mf = run.table.mean(0);
  require_positive_mean(mf);
  const double half_n_phi = 0.5 * n * phi.norm2();
  r.add("E[F]", mf);
  r.add("oracle f_t(x)", {oracle.value, 0.0});
  r.add("E[F]-oracle", {mf.value - oracle.value, mf.se}, near_verdict(mf, oracle.value, k, value_rel));
  for (int a = 0; a < n; ++a) {
    const Estimate g = run.table.mean(1 + a);
    r.add("E[grad_phi F]", g, Verdict::kInfo, vector_component(a));
    r.add("oracle grad f_t(x)", {oracle.grad[a], 0.0}, Verdict::kInfo, vector_component(a));
    r.add("E[grad_phi F]-oracle", {g.value - oracle.grad[a], g.se}, zero_verdict({g.value - oracle.grad[a], g.se}, k),
          vector_component(a));
  }
  r.add("E[Lap_phi F]", run.table.mean(n + 1));
  r.add("oracle Lap f_t(x)", {oracle.laplacian(), 0.0});
  const Estimate lhs = run.table.delta([&](const VectorXd& m) {
    double g2 = 0.0;
    for (int a = 0; a < n; ++a) g2 += m[1 + a] * m[1 + a];
    return m[n + 1] / m[0] - g2 / (m[0] * m[0]) + half_n_phi;
  });
  const double lhs_oracle =
      oracle.laplacian() / oracle.value - oracle.grad.squaredNorm() / (oracle.value * oracle.value) + half_n_phi;
  r.add("li-yau lhs path space", lhs, lower_bound_verdict(lhs, k));
  r.add("li-yau lhs oracle", {lhs_oracle, 0.0});
  r.add("li-yau lhs difference", {lhs.value - lhs_oracle, lhs.se}, near_verdict(lhs, lhs_oracle, k, lhs_rel));
  return r;
}

CheckResult check_cameron_martin(const MCSetup& setup, const CylinderFunction& F, const AdaptedProcess& h, double k) {
  if (!is_euclidean(*setup.model)) throw std::invalid_argument("the shift formula is checked on Euclidean space only");
  F.knots(setup.grid);
  const double hn2 = h.h_norm2();
  const PathRun run = run_paths(setup, 2, [&](const FramePath& path, double* row) {
    row[0] = make_shifted_jet(F, path, h.values()).value;
    const double pairing = sde::ito_integral(path, h.rates());
    row[1] = evaluate(F, path) * std::exp(0.5 * pairing - 0.25 * hn2);
  });
  CheckResult r = start("cameron-martin", run);
  r.add("E[F(gamma+h)]", run.table.mean(0));
  r.add("E[F weight]", run.table.mean(1));
  const Estimate d = difference(run.table, 0, 1);
  r.add("lhs-rhs", d, zero_verdict(d, k));
  return r;
}

namespace {

AdaptedProcess midpoint(const AdaptedProcess& a, const AdaptedProcess& b) { return (a + b).scaled(0.5); }

}  // namespace

CheckResult check_convexity(const MCSetup& setup, const CylinderFunction& F, const AdaptedProcess& h1,
                            const AdaptedProcess& h2, double k) {
  if (!is_euclidean(*setup.model)) throw std::invalid_argument("convexity is checked on Euclidean space only");
  F.knots(setup.grid);
  const AdaptedProcess hm = midpoint(h1, h2);
  const PathRun run = run_paths(setup, 3, [&](const FramePath& path, double* row) {
    row[0] = make_shifted_jet(F, path, h1.values()).value;
    row[1] = make_shifted_jet(F, path, h2.values()).value;
    row[2] = make_shifted_jet(F, path, hm.values()).value;
  });
  CheckResult r = start("convexity", run);
  const double q1 = 0.25 * h1.h_norm2(), q2 = 0.25 * h2.h_norm2(), qm = 0.25 * hm.h_norm2();
  r.add("Phi(h1)", run.table.delta([&](const VectorXd& m) { return std::log(m[0]) + q1; }));
  r.add("Phi(h2)", run.table.delta([&](const VectorXd& m) { return std::log(m[1]) + q2; }));
  r.add("Phi(mid)", run.table.delta([&](const VectorXd& m) { return std::log(m[2]) + qm; }));
  const Estimate defect = run.table.delta([&](const VectorXd& m) {
    return std::log(m[2]) + qm - 0.5 * (std::log(m[0]) + q1) - 0.5 * (std::log(m[1]) + q2);
  });
  r.add("midpoint defect", defect, upper_bound_verdict(defect, k));
  return r;
}

Estimate convexity_second_difference(const MCSetup& setup, const CylinderFunction& F, const AdaptedProcess& h,
                                     const AdaptedProcess& u, double eps) {
  if (!is_euclidean(*setup.model)) throw std::invalid_argument("convexity is checked on Euclidean space only");
  F.knots(setup.grid);
  const AdaptedProcess up = h + u.scaled(eps);
  const AdaptedProcess dn = h + u.scaled(-eps);
  const PathRun run = run_paths(setup, 3, [&](const FramePath& path, double* row) {
    row[0] = make_shifted_jet(F, path, up.values()).value;
    row[1] = make_shifted_jet(F, path, h.values()).value;
    row[2] = make_shifted_jet(F, path, dn.values()).value;
  });
  const double quad = 0.25 * (up.h_norm2() - 2.0 * h.h_norm2() + dn.h_norm2());
  return run.table.delta([&](const VectorXd& m) {
    return (std::log(m[0]) - 2.0 * std::log(m[1]) + std::log(m[2]) + quad) / (eps * eps);
  });
}

CheckResult error_norm_experiment(const MCSetup& setup, const PhiProfile& phi) {
  const PathRun run = run_paths(setup, 2, [&](const FramePath& path, double* row) {
    const PathContext ctx(path);
    const auto [a, b] = malliavin::error_norms(phi, ctx);
    row[0] = a;
    row[1] = b;
  });
  CheckResult r = start("error-norms", run);
  r.add("E|sum_a nabla_Va Va|^2", run.table.mean(0));
  r.add("E|sum_a nabla_Va hat Va|^2", run.table.mean(1));
  return r;
}

}  // namespace pathlab::estimators
