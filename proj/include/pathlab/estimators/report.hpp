#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "pathlab/estimators/checks.hpp"

namespace pathlab::estimators {

struct RunInfo {
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  double dt = 0.0;
  double T = 0.0;
  std::string model;
};

// Shortest round-trip decimal form ("%.17g").
std::string format_number(double x);

// experiment,label,component,estimate,stderr,N,seed,dt,T,model,verdict
// (with a leading "sweep" column for sweeps).
void write_csv_header(std::ostream& out, bool sweep = false);
void write_csv_rows(std::ostream& out, const CheckResult& result, const RunInfo& info,
                    const std::optional<std::string>& sweep_value = std::nullopt);
void write_csv_rows(std::ostream& out, const MCReport& report, const RunInfo& info, const std::string& experiment);

}  // namespace pathlab::estimators
