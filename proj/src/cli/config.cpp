#include "pathlab/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

namespace pathlab::cli {

using nlohmann::json;

namespace {

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

FunctionSpec parse_function(const json& j, const std::string& where) {
  only_keys(j,
            {"name", "times", "center", "sigma", "amplitude", "center2", "sigma2", "s0", "value", "coefficients",
             "matrix", "offset"},
            where);
  FunctionSpec f;
  read(j, "name", f.name);
  read(j, "times", f.times);
  read(j, "center", f.center);
  read(j, "sigma", f.sigma);
  read(j, "amplitude", f.amplitude);
  read(j, "center2", f.center2);
  read(j, "sigma2", f.sigma2);
  read(j, "s0", f.s0);
  read(j, "value", f.value);
  read(j, "coefficients", f.coefficients);
  read(j, "matrix", f.matrix);
  read(j, "offset", f.offset);
  return f;
}

ProfileSpec parse_profile(const json& j, const std::string& where) {
  only_keys(j, {"kind", "t0", "times", "values", "direction", "scale"}, where);
  ProfileSpec p;
  read(j, "kind", p.kind);
  read(j, "t0", p.t0);
  read(j, "times", p.times);
  read(j, "values", p.values);
  read(j, "direction", p.direction);
  read(j, "scale", p.scale);
  if (p.kind != "ramp" && p.kind != "sine" && p.kind != "piecewise")
    throw ConfigError("unknown profile kind '" + p.kind + "' in " + where);
  if (p.kind == "piecewise" && (p.times.empty() || p.times.size() != p.values.size()))
    throw ConfigError("piecewise profile in " + where + " needs matching non-empty times and values");
  if (p.t0 < 0.0) throw ConfigError("negative t0 in " + where);
  return p;
}

std::string parse_model(const json& j) {
  if (j.is_string()) return geometry::ManifoldModel::parse(j.get<std::string>()).name();
  only_keys(j, {"kind", "dim", "radius", "scale", "sides"}, "model");
  std::string kind = "euclidean";
  int dim = 2;
  double radius = 1.0, scale = 1.0;
  std::vector<double> sides;
  read(j, "kind", kind);
  read(j, "dim", dim);
  read(j, "radius", radius);
  read(j, "scale", scale);
  read(j, "sides", sides);
  using geometry::ManifoldModel;
  if (kind == "euclidean") return ManifoldModel::euclidean(dim).name();
  if (kind == "torus" || kind == "flat-torus") {
    if (sides.empty()) sides.assign(dim, 1.0);
    return ManifoldModel::flat_torus(sides).name();
  }
  if (kind == "sphere") return ManifoldModel::sphere(dim, radius).name();
  if (kind == "hyperbolic") return ManifoldModel::hyperbolic(dim, scale).name();
  throw ConfigError("unknown model kind '" + kind + "'");
}

json function_json(const FunctionSpec& f) {
  return json{{"name", f.name},   {"times", f.times},   {"center", f.center},
              {"sigma", f.sigma}, {"amplitude", f.amplitude}, {"center2", f.center2},
              {"sigma2", f.sigma2}, {"s0", f.s0},         {"value", f.value},
              {"coefficients", f.coefficients}, {"matrix", f.matrix}, {"offset", f.offset}};
}

json profile_json(const ProfileSpec& p) {
  return json{{"kind", p.kind},     {"t0", p.t0},           {"times", p.times},
              {"values", p.values}, {"direction", p.direction}, {"scale", p.scale}};
}

VecA to_vec(const std::vector<double>& v) {
  VecA x(static_cast<int>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) x[static_cast<int>(i)] = v[i];
  return x;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
  only_keys(j,
            {"experiment", "model", "base", "T", "m", "N", "seed", "threshold", "F", "G", "phi", "w", "h", "h1", "h2",
             "t0", "output"},
            "config");
  ExperimentConfig c;
  read(j, "experiment", c.experiment);
  if (std::find(experiment_kinds().begin(), experiment_kinds().end(), c.experiment) == experiment_kinds().end())
    throw ConfigError("unknown experiment '" + c.experiment + "'");
  try {
    if (j.contains("model")) c.model = parse_model(j.at("model"));
  } catch (const geometry::ModelError& e) {
    throw ConfigError(e.what());
  }
  read(j, "base", c.base);
  read(j, "T", c.T);
  read(j, "m", c.m);
  read(j, "N", c.N);
  read(j, "seed", c.seed);
  read(j, "threshold", c.threshold);
  read(j, "t0", c.t0);
  read(j, "output", c.output);
  if (j.contains("F")) c.F = parse_function(j.at("F"), "F");
  if (j.contains("G")) c.G = parse_function(j.at("G"), "G");
  else c.G.name = "constant";
  if (j.contains("phi")) c.phi = parse_profile(j.at("phi"), "phi");
  c.w = c.phi;
  if (j.contains("w")) c.w = parse_profile(j.at("w"), "w");
  if (j.contains("h")) c.h = parse_profile(j.at("h"), "h");
  c.h2.kind = "sine";
  c.h2.direction = {0.0, 1.0};
  if (j.contains("h1")) c.h1 = parse_profile(j.at("h1"), "h1");
  if (j.contains("h2")) c.h2 = parse_profile(j.at("h2"), "h2");

  if (!(c.T > 0.0)) throw ConfigError("T must be positive");
  if (c.m < 2) throw ConfigError("m must be at least 2");
  if (c.experiment != "simulate" && c.N < 100) throw ConfigError("N must be at least 100 for verification runs");
  if (c.N < 2) throw ConfigError("N must be at least 2");
  if (!(c.threshold > 0.0)) throw ConfigError("threshold must be positive");
  const geometry::ManifoldModel M = build_model(c);
  if (!c.base.empty() && !M.contains(to_vec(c.base), 1e-8)) throw ConfigError("base point is not on the model");
  if (c.F.times.empty()) c.F.times = {c.T};
  if (c.G.times.empty()) c.G.times = c.F.name == "product-of-two" ? std::vector<double>{c.T} : c.F.times;
  if (c.G.name == "product-of-two" && c.G.times.size() == 1) c.G.times = {0.5 * c.T, c.T};
  if (c.F.name == "product-of-two" && c.F.times.size() == 1) c.F.times = {0.5 * c.T, c.T};
  for (ProfileSpec* p : {&c.phi, &c.w, &c.h, &c.h1, &c.h2}) {
    if (p->t0 == 0.0) p->t0 = c.T;
    if (p->direction.empty()) {
      p->direction.assign(M.dim(), 0.0);
      p->direction[0] = 1.0;
    }
    if (static_cast<int>(p->direction.size()) != M.dim()) {
      // Pad or truncate the default e_2 of h2 to the model's dimension.
      p->direction.resize(M.dim(), 0.0);
      if (std::all_of(p->direction.begin(), p->direction.end(), [](double x) { return x == 0.0; }))
        p->direction[0] = 1.0;
    }
  }
  if (c.t0 == 0.0) c.t0 = c.F.times.front();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

json to_json(const ExperimentConfig& c) {
  return json{{"experiment", c.experiment},
              {"model", c.model},
              {"base", c.base},
              {"T", c.T},
              {"m", c.m},
              {"N", c.N},
              {"seed", c.seed},
              {"threshold", c.threshold},
              {"F", function_json(c.F)},
              {"G", function_json(c.G)},
              {"phi", profile_json(c.phi)},
              {"w", profile_json(c.w)},
              {"h", profile_json(c.h)},
              {"h1", profile_json(c.h1)},
              {"h2", profile_json(c.h2)},
              {"t0", c.t0},
              {"output", c.output}};
}

geometry::ManifoldModel build_model(const ExperimentConfig& c) {
  try {
    return geometry::ManifoldModel::parse(c.model);
  } catch (const geometry::ModelError& e) {
    throw ConfigError(e.what());
  }
}

estimators::MCSetup build_setup(const ExperimentConfig& c) {
  const geometry::ManifoldModel M = build_model(c);
  estimators::MCSetup s = estimators::make_setup(M, c.T, c.m, c.N, c.seed);
  if (!c.base.empty()) s.base = to_vec(c.base);
  return s;
}

pathfunc::BasePtr build_base(const FunctionSpec& f, const geometry::ManifoldModel& model, const VecA& base) {
  const int amb = model.ambient_dim();
  auto point = [&](const std::vector<double>& v) {
    if (v.empty()) return base;
    if (static_cast<int>(v.size()) != amb)
      throw ConfigError("function '" + f.name + "' needs " + std::to_string(amb) + " ambient coordinates");
    return to_vec(v);
  };
  if (f.name == "constant") return pathfunc::constant(f.value);
  if (f.name == "gaussian-bump") {
    if (!(f.sigma > 0.0)) throw ConfigError("sigma must be positive");
    return pathfunc::gaussian_bump(point(f.center), f.sigma, f.amplitude, pathfunc::model_periods(model));
  }
  if (f.name == "coordinate-linear") {
    VecA a = VecA::Zero(amb);
    if (f.coefficients.empty()) a[0] = 1.0;
    else a = point(f.coefficients);
    return pathfunc::coordinate_linear(a, f.offset);
  }
  if (f.name == "coordinate-quadratic") {
    if (static_cast<int>(f.matrix.size()) != amb * amb)
      throw ConfigError("coordinate-quadratic needs a row-major " + std::to_string(amb) + "x" + std::to_string(amb) +
                        " matrix");
    MatA q(amb, amb);
    for (int a = 0; a < amb; ++a)
      for (int b = 0; b < amb; ++b) q(a, b) = f.matrix[a * amb + b];
    const VecA b = f.coefficients.empty() ? VecA(VecA::Zero(amb)) : point(f.coefficients);
    return pathfunc::coordinate_quadratic(q, b, f.offset);
  }
  if (f.name == "heat-kernel") {
    if (!(f.s0 > 0.0)) throw ConfigError("s0 must be positive");
    return pathfunc::heat_kernel_at(model, point(f.center), f.s0);
  }
  if (f.name == "product-of-two") {
    const auto periods = pathfunc::model_periods(model);
    return pathfunc::product_of_two(pathfunc::gaussian_bump(point(f.center), f.sigma, f.amplitude, periods),
                                    pathfunc::gaussian_bump(point(f.center2), f.sigma2, 1.0, periods));
  }
  throw ConfigError("unknown function '" + f.name + "' (see --list-catalog)");
}

pathfunc::CylinderFunction build_function(const FunctionSpec& f, const geometry::ManifoldModel& model,
                                          const VecA& base, double T) {
  std::vector<double> times = f.times.empty() ? std::vector<double>{T} : f.times;
  for (double t : times)
    if (t > T * (1.0 + 1e-12)) throw ConfigError("function time " + std::to_string(t) + " is beyond T");
  try {
    return pathfunc::CylinderFunction(std::move(times), build_base(f, model, base));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

pathfunc::PhiProfile build_profile(const ProfileSpec& p, const sde::TimeGrid& grid) {
  const double t0 = p.t0 > 0.0 ? p.t0 : grid.horizon();
  pathfunc::PhiProfile phi = p.kind == "sine"        ? pathfunc::PhiProfile::sine(grid)
                             : p.kind == "piecewise" ? pathfunc::PhiProfile::piecewise(grid, p.times, p.values)
                                                     : pathfunc::PhiProfile::ramp(grid, t0);
  return p.scale == 1.0 ? phi : phi.scaled(p.scale);
}

VecN build_direction(const ProfileSpec& p, int n) {
  VecN d = VecN::Zero(n);
  if (p.direction.empty()) {
    d[0] = 1.0;
    return d;
  }
  if (static_cast<int>(p.direction.size()) != n) throw ConfigError("profile direction has the wrong dimension");
  for (int a = 0; a < n; ++a) d[a] = p.direction[a];
  return d;
}

malliavin::AdaptedProcess build_process(const ProfileSpec& p, const sde::TimeGrid& grid, int n) {
  return malliavin::deterministic_process(build_profile(p, grid), build_direction(p, n));
}

std::string with_radius(const std::string& model, double r) {
  const geometry::ManifoldModel M = geometry::ManifoldModel::parse(model);
  std::vector<geometry::ManifoldModel> parts;
  for (const auto& f : M.factors()) {
    switch (f.kind) {
      case geometry::FactorKind::kEuclidean: parts.push_back(geometry::ManifoldModel::euclidean(f.dim)); break;
      case geometry::FactorKind::kTorus: parts.push_back(geometry::ManifoldModel::flat_torus(f.sides)); break;
      case geometry::FactorKind::kSphere: parts.push_back(geometry::ManifoldModel::sphere(f.dim, r)); break;
      case geometry::FactorKind::kHyperbolic: parts.push_back(geometry::ManifoldModel::hyperbolic(f.dim, r)); break;
    }
  }
  return parts.size() == 1 ? parts.front().name() : geometry::ManifoldModel::product(parts).name();
}

}  // namespace pathlab::cli
