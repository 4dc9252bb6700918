#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "pathlab/cli/runner.hpp"

using namespace pathlab;

namespace {

std::vector<std::string> split_values(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void list_catalog() {
  std::cout << "base functions (\"F\": {\"name\": ..., \"times\": [...], ...}):\n";
  for (const auto& e : pathfunc::catalog())
    std::cout << "  " << std::left << std::setw(22) << e.name << e.description << "\n"
              << "  " << std::setw(22) << "" << "parameters: " << e.parameters << "\n";
  std::cout << "\nmodels: euclidean(n), torus(L1,...,Ln), sphere(n,r), hyperbolic(n,s), products joined by '*'\n";
  std::cout << "profiles: {\"kind\": \"ramp\", \"t0\": t}, {\"kind\": \"sine\"}, "
               "{\"kind\": \"piecewise\", \"times\": [...], \"values\": [...]}\n";
  std::cout << "experiments:";
  for (const auto& k : cli::experiment_kinds()) std::cout << " " << k;
  std::cout << "\nworkers: PATHLAB_WORKERS (default: hardware threads)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pathlab: Monte Carlo checks of path-space identities and Harnack inequalities"};
  app.require_subcommand(0, 1);
  bool show_catalog = false;
  app.add_flag("--list-catalog", show_catalog, "List base functions, models and experiments");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> paths;
  std::optional<std::string> out;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed, "Master seed");
    sub->add_option("--paths", paths, "Number of paths N");
    sub->add_option("--out", out, "Output directory");
  };

  CLI::App* run = app.add_subcommand("run", "Run the configured experiment");
  add_common(run);
  CLI::App* sweep = app.add_subcommand("sweep", "Run the experiment over a list of parameter values");
  add_common(sweep);
  std::string param, values;
  sweep->add_option("--param", param, "radius, dt, m, T, N, seed, t0, sigma or threshold")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kUsageError;
  }

  if (show_catalog) {
    list_catalog();
    return 0;
  }
  if (!run->parsed() && !sweep->parsed()) {
    std::cerr << app.help();
    return cli::kUsageError;
  }

  return cli::guarded(std::cerr, [&] {
    cli::ExperimentConfig c = cli::load_config(config_path);
    nlohmann::json j = cli::to_json(c);
    if (seed) j["seed"] = *seed;
    if (paths) j["N"] = *paths;
    if (out) j["output"] = *out;
    c = cli::parse_config(j);
    if (run->parsed()) return cli::run(c, std::cout);
    return cli::sweep(c, param, split_values(values), std::cout);
  });
}
