#include "pathlab/estimators/monte_carlo.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace pathlab::estimators {

MCSetup make_setup(const ManifoldModel& model, double T, int steps, std::size_t paths, std::uint64_t seed) {
  return MCSetup{std::make_shared<const ManifoldModel>(model), model.default_base(), TimeGrid(T, steps), paths, seed};
}

int worker_count() {
  if (const char* env = std::getenv("PATHLAB_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

PathRun run_paths(const MCSetup& setup, int cols, const Assembler& assemble) {
  if (setup.paths < 2) throw std::invalid_argument("need at least two paths");
  const auto start = std::chrono::steady_clock::now();
  PathRun run{SampleTable(setup.paths, cols), 0, 0.0};
  std::vector<char> keep(setup.paths, 1);
  constexpr std::size_t kChunk = 32;
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_lock;
  std::atomic<bool> stop{false};

  auto work = [&] {
    try {
      for (;;) {
        const std::size_t lo = next.fetch_add(kChunk);
        if (lo >= setup.paths || stop.load()) return;
        const std::size_t hi = std::min(lo + kChunk, setup.paths);
        for (std::size_t i = lo; i < hi; ++i) {
          const FramePath path = sde::simulate_path(setup.model, setup.base, setup.grid, setup.seed, i);
          double* row = run.table.row(i);
          assemble(path, row);
          for (int c = 0; c < cols; ++c)
            if (!std::isfinite(row[c])) keep[i] = 0;
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> g(failure_lock);
      if (!failure) failure = std::current_exception();
      stop = true;
    }
  };

  const int workers = std::max(1, std::min<int>(worker_count(), static_cast<int>(setup.paths / kChunk) + 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (char k : keep) run.excluded += k ? 0 : 1;
  if (run.excluded * 1000 > setup.paths)
    throw NonFiniteError(std::to_string(run.excluded) + " of " + std::to_string(setup.paths) +
                         " paths produced non-finite samples");
  if (run.excluded) run.table.compact(keep);
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

MCReport mc_expect(const MCSetup& setup, int rows, int cols, const Assembler& assemble, std::string label) {
  const int p = rows * cols;
  PathRun run = run_paths(setup, p, assemble);
  MCReport r;
  r.label = std::move(label);
  r.rows = rows;
  r.cols = cols;
  r.estimate.resize(p);
  r.se.resize(p);
  for (int c = 0; c < p; ++c) {
    const Estimate e = run.table.mean(c);
    r.estimate[c] = e.value;
    r.se[c] = e.se;
  }
  r.paths = run.table.rows();
  r.seed = setup.seed;
  r.wall_seconds = run.wall_seconds;
  r.excluded = run.excluded;
  return r;
}

MCReport mc_expect(const MCSetup& setup, const pathfunc::CylinderFunction& F, std::string label) {
  F.knots(setup.grid);
  return mc_expect(
      setup, 1, 1, [&](const FramePath& path, double* row) { row[0] = pathfunc::evaluate(F, path); },
      std::move(label));
}

}  // namespace pathlab::estimators
