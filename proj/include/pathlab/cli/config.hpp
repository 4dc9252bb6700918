#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pathlab/estimators/monte_carlo.hpp"
#include "pathlab/malliavin/process.hpp"

namespace pathlab::cli {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Catalog function: {"name": "gaussian-bump", "times": [1], "center": [...], ...}.
struct FunctionSpec {
  std::string name = "gaussian-bump";
  std::vector<double> times;
  std::vector<double> center;
  double sigma = 1.0;
  double amplitude = 1.0;
  std::vector<double> center2;
  double sigma2 = 1.0;
  double s0 = 1.0;
  double value = 1.0;
  std::vector<double> coefficients;
  std::vector<double> matrix;
  double offset = 0.0;
};

// Test function or Cameron-Martin direction: {"kind": "ramp", "t0": 1,
// "direction": [1, 0], "scale": 1}.
struct ProfileSpec {
  std::string kind = "ramp";
  double t0 = 0.0;                // ramp time; 0 means T
  std::vector<double> times;      // piecewise
  std::vector<double> values;     // piecewise
  std::vector<double> direction;  // empty means e_1
  double scale = 1.0;
};

inline const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> k{"simulate",       "ibp",       "halfway",    "harnack",
                                          "matrix-harnack", "liyau",     "cameron-martin",
                                          "convexity",      "commutator", "error-norms", "all"};
  return k;
}

struct ExperimentConfig {
  std::string experiment = "all";
  std::string model = "euclidean(2)";
  std::vector<double> base;   // empty means the model's default base point
  double T = 1.0;
  int m = 1000;
  std::size_t N = 100000;
  std::uint64_t seed = 1;
  double threshold = 3.0;
  FunctionSpec F;
  FunctionSpec G;
  ProfileSpec phi;
  ProfileSpec w;
  ProfileSpec h;
  ProfileSpec h1;
  ProfileSpec h2;
  double t0 = 0.0;            // Li-Yau time; 0 means the first time of F
  std::string output = "pathlab_out";
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
// Every field with its default resolved.
nlohmann::json to_json(const ExperimentConfig& c);

// Resolved objects built from a config.
geometry::ManifoldModel build_model(const ExperimentConfig& c);
estimators::MCSetup build_setup(const ExperimentConfig& c);
pathfunc::BasePtr build_base(const FunctionSpec& f, const geometry::ManifoldModel& model, const VecA& base);
pathfunc::CylinderFunction build_function(const FunctionSpec& f, const geometry::ManifoldModel& model,
                                          const VecA& base, double T);
pathfunc::PhiProfile build_profile(const ProfileSpec& p, const sde::TimeGrid& grid);
VecN build_direction(const ProfileSpec& p, int n);
malliavin::AdaptedProcess build_process(const ProfileSpec& p, const sde::TimeGrid& grid, int n);

// Sphere/hyperbolic scale replaced by r in every curved factor.
std::string with_radius(const std::string& model, double r);

}  // namespace pathlab::cli
