#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "pathlab/estimators/statistics.hpp"
#include "pathlab/pathfunc/cylinder.hpp"

namespace pathlab::estimators {

using geometry::ManifoldModel;
using sde::FramePath;
using sde::TimeGrid;

struct MCSetup {
  std::shared_ptr<const ManifoldModel> model;
  VecA base;
  TimeGrid grid;
  std::size_t paths = 100000;
  std::uint64_t seed = 1;
};

MCSetup make_setup(const ManifoldModel& model, double T, int steps, std::size_t paths, std::uint64_t seed);

class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Worker threads: PATHLAB_WORKERS if set and positive, else the hardware count.
int worker_count();

// Fills one row of the sample table from one path.
using Assembler = std::function<void(const FramePath&, double* row)>;

struct PathRun {
  SampleTable table;
  std::size_t excluded = 0;
  double wall_seconds = 0.0;
};

/* Simulates paths 0..N-1 of the setup's seed and assembles one row each.
   Row i depends only on path i, so the table is identical for any worker
   count.  Rows with a non-finite entry are dropped and counted; more than
   0.1% of them raises NonFiniteError. */
PathRun run_paths(const MCSetup& setup, int cols, const Assembler& assemble);

struct MCReport {
  std::string label;
  Eigen::VectorXd estimate;
  Eigen::VectorXd se;
  int rows = 1;
  int cols = 1;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;
  std::size_t excluded = 0;
};

MCReport mc_expect(const MCSetup& setup, const pathfunc::CylinderFunction& F, std::string label = "E[F]");
// Vector or matrix valued expectation; `rows * cols` entries per path,
// row-major.
MCReport mc_expect(const MCSetup& setup, int rows, int cols, const Assembler& assemble, std::string label);

}  // namespace pathlab::estimators
