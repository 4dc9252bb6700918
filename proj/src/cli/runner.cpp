#include "pathlab/cli/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include "pathlab/estimators/report.hpp"

namespace pathlab::cli {

namespace fs = std::filesystem;
using estimators::CheckResult;
using estimators::Verdict;

namespace {

bool euclidean_only(const geometry::ManifoldModel& M) {
  for (const auto& f : M.factors())
    if (f.kind != geometry::FactorKind::kEuclidean) return false;
  return true;
}

bool sphere_two(const geometry::ManifoldModel& M) {
  return M.factors().size() == 1 && M.factors()[0].kind == geometry::FactorKind::kSphere && M.dim() == 2;
}

CheckResult simulate(const ExperimentConfig& c, const estimators::MCSetup& s, const geometry::ManifoldModel& M) {
  CheckResult r = estimators::check_noise(s, c.threshold);
  const auto F = build_function(c.F, M, s.base, c.T);
  if (F.k() == 1 && (M.is_flat() || sphere_two(M))) {
    const CheckResult h = estimators::check_heat_flow(s, F.base_ptr(), F.times()[0], c.threshold);
    for (const auto& e : h.entries) r.entries.push_back(e);
  } else {
    const estimators::MCReport rep = estimators::mc_expect(s, F);
    r.add("E[F]", {rep.estimate[0], rep.se[0]});
  }
  return r;
}

CheckResult run_one(const std::string& kind, const ExperimentConfig& c) {
  const estimators::MCSetup s = build_setup(c);
  const geometry::ManifoldModel& M = *s.model;
  const int n = M.dim();
  const double k = c.threshold;
  if (kind == "simulate") return simulate(c, s, M);
  const auto F = build_function(c.F, M, s.base, c.T);
  if (kind == "ibp") {
    const auto G = build_function(c.G, M, s.base, c.T);
    return estimators::check_ibp(s, F, G, build_profile(c.phi, s.grid), build_direction(c.phi, n), k);
  }
  if (kind == "halfway")
    return estimators::halfway_harnack(s, F, build_profile(c.phi, s.grid), build_direction(c.phi, n), k);
  if (kind == "harnack") return to_result(estimators::differential_harnack(s, F, build_profile(c.phi, s.grid), k));
  if (kind == "matrix-harnack")
    return to_result(estimators::matrix_harnack(s, F, build_profile(c.phi, s.grid), k));
  if (kind == "liyau") {
    if (F.k() != 1) throw ConfigError("liyau needs a one-time function F");
    return estimators::liyau_recovery(s, F.base_ptr(), c.t0, k);
  }
  if (kind == "cameron-martin") return estimators::check_cameron_martin(s, F, build_process(c.h, s.grid, n), k);
  if (kind == "convexity") {
    CheckResult r =
        estimators::check_convexity(s, F, build_process(c.h1, s.grid, n), build_process(c.h2, s.grid, n), k);
    const auto zero = malliavin::AdaptedProcess(n, c.m, s.grid.dt(), malliavin::Provenance::kDeterministic);
    const estimators::Estimate d2 =
        estimators::convexity_second_difference(s, F, zero, build_process(c.phi, s.grid, n));
    r.add("second difference", d2, estimators::lower_bound_verdict(d2, k));
    return r;
  }
  if (kind == "commutator")
    return estimators::check_commutator(s, F, build_profile(c.phi, s.grid), build_direction(c.phi, n),
                                        build_profile(c.w, s.grid), build_direction(c.w, n), k);
  if (kind == "error-norms") return estimators::error_norm_experiment(s, build_profile(c.phi, s.grid));
  throw ConfigError("unknown experiment '" + kind + "'");
}

int exit_code(const std::vector<CheckResult>& results) {
  for (const auto& r : results)
    if (!r.passed()) return kViolated;
  return kOk;
}

estimators::RunInfo info_of(const ExperimentConfig& c) {
  return {c.N, c.seed, c.T / c.m, c.T, c.model};
}

void write_summary(std::ostream& out, const nlohmann::json& effective,
                   const std::vector<std::pair<std::string, CheckResult>>& results, int code) {
  out << "effective config:\n" << effective.dump(2) << "\n\n";
  for (const auto& [tag, r] : results) {
    out << "[" << r.experiment << "]" << (tag.empty() ? "" : " " + tag) << "  paths=" << r.paths;
    if (r.excluded) out << " (excluded " << r.excluded << " non-finite)";
    out << "\n";
    for (const auto& e : r.entries) {
      out << "  " << std::left << std::setw(34) << e.label << std::setw(6) << (e.component == "value" ? "" : e.component)
          << std::right << std::setw(16) << std::setprecision(8) << e.est.value << " +/- " << std::setw(12)
          << std::setprecision(3) << e.est.se;
      if (e.verdict != Verdict::kInfo) out << "  " << estimators::to_string(e.verdict);
      out << "\n";
    }
  }
  out << "\nstatus: " << (code == kOk ? "all verdicts hold" : "VIOLATED") << " (exit " << code << ")\n";
}

void prepare(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace

std::vector<std::string> planned_experiments(const ExperimentConfig& c) {
  if (c.experiment != "all") return {c.experiment};
  const geometry::ManifoldModel M = build_model(c);
  std::vector<std::string> out{"simulate", "ibp", "halfway", "harnack", "matrix-harnack", "commutator", "error-norms"};
  if (M.is_flat() && c.F.times.size() == 1 && c.F.name != "product-of-two") out.push_back("liyau");
  if (euclidean_only(M)) {
    out.push_back("cameron-martin");
    out.push_back("convexity");
  }
  return out;
}

void validate(const ExperimentConfig& c) {
  const estimators::MCSetup s = build_setup(c);
  build_function(c.F, *s.model, s.base, c.T).knots(s.grid);
  build_function(c.G, *s.model, s.base, c.T).knots(s.grid);
  for (const ProfileSpec* p : {&c.phi, &c.w, &c.h, &c.h1, &c.h2}) build_profile(*p, s.grid);
  s.grid.index_of(c.t0);
}

std::vector<CheckResult> run_experiments(const ExperimentConfig& c) {
  validate(c);
  std::vector<CheckResult> out;
  for (const auto& kind : planned_experiments(c)) out.push_back(run_one(kind, c));
  return out;
}

int run(const ExperimentConfig& c, std::ostream& log) {
  prepare(c.output);
  const auto results = run_experiments(c);
  const int code = exit_code(results);
  const nlohmann::json effective = to_json(c);
  {
    std::ofstream csv(fs::path(c.output) / "results.csv");
    estimators::write_csv_header(csv);
    for (const auto& r : results) estimators::write_csv_rows(csv, r, info_of(c));
  }
  std::vector<std::pair<std::string, CheckResult>> tagged;
  for (const auto& r : results) tagged.emplace_back("", r);
  {
    std::ofstream sum(fs::path(c.output) / "summary.txt");
    write_summary(sum, effective, tagged, code);
  }
  std::ofstream(fs::path(c.output) / "effective_config.json") << effective.dump(2) << "\n";
  write_summary(log, effective, tagged, code);
  return code;
}

namespace {

ExperimentConfig apply(const ExperimentConfig& base, const std::string& param, const std::string& value) {
  double x = 0.0;
  try {
    std::size_t used = 0;
    x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
  } catch (const std::exception&) {
    throw ConfigError("sweep value '" + value + "' is not a number");
  }
  nlohmann::json j = to_json(base);
  if (param == "radius" || param == "r") {
    j["model"] = with_radius(base.model, x);
    j["base"] = std::vector<double>{};
    j["F"]["center"] = std::vector<double>{};
    j["F"]["center2"] = std::vector<double>{};
  } else if (param == "dt") {
    const double m = std::round(base.T / x);
    if (m < 2 || std::abs(m * x - base.T) > 1e-9 * base.T) throw ConfigError("dt does not divide T");
    j["m"] = static_cast<int>(m);
  } else if (param == "m") {
    j["m"] = static_cast<int>(x);
  } else if (param == "T") {
    j["T"] = x;
  } else if (param == "N") {
    j["N"] = static_cast<std::size_t>(x);
  } else if (param == "seed") {
    j["seed"] = static_cast<std::uint64_t>(x);
  } else if (param == "t0") {
    j["t0"] = x;
  } else if (param == "sigma") {
    j["F"]["sigma"] = x;
  } else if (param == "threshold") {
    j["threshold"] = x;
  } else {
    throw ConfigError("cannot sweep parameter '" + param + "'");
  }
  return parse_config(j);
}

}  // namespace

int sweep(const ExperimentConfig& c, const std::string& param, const std::vector<std::string>& values,
          std::ostream& log) {
  if (values.empty()) throw ConfigError("sweep needs at least one value");
  prepare(c.output);
  std::vector<std::pair<std::string, CheckResult>> tagged;
  std::vector<std::pair<std::string, ExperimentConfig>> runs;
  for (const auto& v : values) {
    ExperimentConfig cv = apply(c, param, v);
    for (auto& r : run_experiments(cv)) tagged.emplace_back(param + "=" + v, std::move(r));
    runs.emplace_back(v, std::move(cv));
  }

  // Aggregate rows: monotone error norms in radius, pass rate over seeds.
  CheckResult agg;
  agg.experiment = "sweep";
  if (param == "radius" || param == "r") {
    std::map<std::string, std::vector<std::pair<double, double>>> series;
    for (const auto& [tag, r] : tagged)
      if (r.experiment == "error-norms")
        for (const auto& e : r.entries) series[e.label].emplace_back(std::stod(tag.substr(tag.find('=') + 1)), e.est.value);
    for (auto& [label, pts] : series) {
      std::sort(pts.begin(), pts.end());
      bool dec = true;
      for (std::size_t i = 1; i < pts.size(); ++i) dec = dec && pts[i].second < pts[i - 1].second;
      agg.add("decreasing in radius: " + label, {dec ? 1.0 : 0.0, 0.0}, dec ? Verdict::kHolds : Verdict::kViolated);
    }
  }
  const bool battery = param == "seed";
  if (battery) {
    std::map<std::pair<std::string, std::string>, std::pair<int, int>> counts;
    std::vector<std::pair<std::string, std::string>> order;
    for (const auto& [tag, r] : tagged)
      for (const auto& e : r.entries) {
        if (e.verdict == Verdict::kInfo || e.verdict == Verdict::kUnasserted) continue;
        const auto key = std::make_pair(r.experiment + ": " + e.label, e.component);
        if (!counts.count(key)) order.push_back(key);
        auto& [ok, total] = counts[key];
        ok += estimators::acceptable(e.verdict) ? 1 : 0;
        total += 1;
      }
    for (const auto& key : order) {
      const auto [ok, total] = counts[key];
      const double rate = static_cast<double>(ok) / total;
      agg.add("pass rate " + key.first, {rate, 0.0}, rate >= 0.95 ? Verdict::kHolds : Verdict::kViolated, key.second);
    }
  }

  int code = kOk;
  if (battery) {
    code = agg.passed() ? kOk : kViolated;
  } else {
    for (const auto& [tag, r] : tagged)
      if (!r.passed()) code = kViolated;
    if (!agg.passed()) code = kViolated;
  }

  const nlohmann::json base_config = to_json(c);
  nlohmann::json effective = base_config;
  effective["sweep"] = {{"param", param}, {"values", values}};
  {
    std::ofstream csv(fs::path(c.output) / "sweep.csv");
    estimators::write_csv_header(csv, true);
    std::size_t i = 0;
    for (const auto& [v, cv] : runs) {
      const std::string tag = param + "=" + v;
      for (; i < tagged.size() && tagged[i].first == tag; ++i)
        estimators::write_csv_rows(csv, tagged[i].second, info_of(cv), v);
    }
    if (!agg.entries.empty()) estimators::write_csv_rows(csv, agg, info_of(c), std::string("all"));
  }
  if (!agg.entries.empty()) tagged.emplace_back("aggregate", agg);
  {
    std::ofstream sum(fs::path(c.output) / "summary.txt");
    write_summary(sum, effective, tagged, code);
  }
  std::ofstream(fs::path(c.output) / "effective_config.json") << base_config.dump(2) << "\n";
  write_summary(log, effective, tagged, code);
  return code;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const sde::OffGridTime& e) {
    err << "error: " << e.what() << "\n";
  } catch (const estimators::UnsupportedOracle& e) {
    err << "error: unsupported oracle: " << e.what() << "\n";
  } catch (const estimators::NonFiniteError& e) {
    err << "error: aborted: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kUsageError;
}

}  // namespace pathlab::cli
