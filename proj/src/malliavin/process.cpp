#include "pathlab/malliavin/process.hpp"

#include <stdexcept>

namespace pathlab::malliavin {

AdaptedProcess::AdaptedProcess(int dim, int steps, double dt, Provenance provenance)
    : n_(dim), dt_(dt), provenance_(provenance), values_(steps + 1, VecN::Zero(dim)), rates_(steps, VecN::Zero(dim)) {
  if (steps < 1) throw std::invalid_argument("process needs at least one step");
  if (!(dt > 0.0)) throw std::invalid_argument("process step must be positive");
}

AdaptedProcess AdaptedProcess::from_rates(std::vector<VecN> rates, double dt, Provenance provenance) {
  if (rates.empty()) throw std::invalid_argument("process needs at least one step");
  AdaptedProcess p(rates.front().size(), static_cast<int>(rates.size()), dt, provenance);
  for (std::size_t k = 0; k < rates.size(); ++k) p.values_[k + 1] = p.values_[k] + dt * rates[k];
  p.rates_ = std::move(rates);
  return p;
}

AdaptedProcess AdaptedProcess::from_values(std::vector<VecN> values, double dt, Provenance provenance) {
  if (values.size() < 2) throw std::invalid_argument("process needs at least one step");
  if (!values.front().isZero(0.0)) throw std::invalid_argument("process must vanish at time 0");
  AdaptedProcess p(values.front().size(), static_cast<int>(values.size()) - 1, dt, provenance);
  for (std::size_t k = 0; k + 1 < values.size(); ++k) p.rates_[k] = (values[k + 1] - values[k]) / dt;
  p.values_ = std::move(values);
  return p;
}

double AdaptedProcess::h_norm2() const {
  double s = 0.0;
  for (const VecN& r : rates_) s += r.squaredNorm();
  return s * dt_;
}

AdaptedProcess AdaptedProcess::scaled(double c) const {
  AdaptedProcess p(*this);
  for (VecN& v : p.values_) v *= c;
  for (VecN& r : p.rates_) r *= c;
  return p;
}

double h_inner(const AdaptedProcess& a, const AdaptedProcess& b) {
  if (a.steps() != b.steps()) throw std::invalid_argument("processes live on different grids");
  double s = 0.0;
  for (int k = 0; k < a.steps(); ++k) s += a.rate(k).dot(b.rate(k));
  return s * a.dt();
}

AdaptedProcess operator+(const AdaptedProcess& a, const AdaptedProcess& b) {
  if (a.steps() != b.steps()) throw std::invalid_argument("processes live on different grids");
  std::vector<VecN> r(a.steps());
  for (int k = 0; k < a.steps(); ++k) r[k] = a.rate(k) + b.rate(k);
  const Provenance p =
      a.deterministic() && b.deterministic() ? Provenance::kDeterministic : Provenance::kPathwise;
  return AdaptedProcess::from_rates(std::move(r), a.dt(), p);
}

AdaptedProcess deterministic_process(const PhiProfile& phi, const VecN& direction) {
  std::vector<VecN> v(phi.steps() + 1);
  for (int i = 0; i <= phi.steps(); ++i) v[i] = phi[i] * direction;
  return AdaptedProcess::from_values(std::move(v), phi.dt(), Provenance::kDeterministic);
}

VecA realize(const AdaptedProcess& v, const FramePath& path, int i) { return path.frame(i) * v.value(i); }

namespace {

void check_grid(const AdaptedProcess& v, const PathContext& ctx) {
  if (v.steps() != ctx.steps() || v.dim() != ctx.dim())
    throw std::invalid_argument("process and path have different shapes");
}

}  // namespace

AdaptedProcess hat(const AdaptedProcess& v, const PathContext& ctx) {
  check_grid(v, ctx);
  if (ctx.flat()) return v;
  std::vector<VecN> r(v.steps());
  for (int k = 0; k < v.steps(); ++k) r[k] = v.rate(k) + ctx.ricci(k) * (0.5 * (v.value(k) + v.value(k + 1)));
  double lambda = 0.0;
  const bool stays = v.deterministic() && ctx.model().is_einstein(&lambda);
  return AdaptedProcess::from_rates(std::move(r), v.dt(), stays ? Provenance::kDeterministic : Provenance::kPathwise);
}

AdaptedProcess hat_inverse(const AdaptedProcess& w, const PathContext& ctx) {
  check_grid(w, ctx);
  if (ctx.flat()) return w;
  const int n = w.dim();
  const double h = 0.5 * w.dt();
  const MatN id = MatN::Identity(n, n);
  std::vector<VecN> v(w.steps() + 1, VecN::Zero(n));
  for (int k = 0; k < w.steps(); ++k) {
    const MatN& ric = ctx.ricci(k);
    const VecN rhs = (id - h * ric) * v[k] + w.dt() * w.rate(k);
    v[k + 1] = (id + h * ric).partialPivLu().solve(rhs);
  }
  double lambda = 0.0;
  const bool stays = w.deterministic() && ctx.model().is_einstein(&lambda);
  return AdaptedProcess::from_values(std::move(v), w.dt(), stays ? Provenance::kDeterministic : Provenance::kPathwise);
}

double half_ito(const AdaptedProcess& hatted, const FramePath& path) {
  return 0.5 * sde::ito_integral(path, hatted.rates());
}

double divergence(const AdaptedProcess& v, const PathContext& ctx) { return half_ito(hat(v, ctx), ctx.path()); }

}  // namespace pathlab::malliavin
