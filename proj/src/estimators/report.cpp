#include "pathlab/estimators/report.hpp"

#include <cstdio>
#include <ostream>

namespace pathlab::estimators {

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

// Quote a field when it contains a comma or a quote.
std::string field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void row(std::ostream& out, const std::optional<std::string>& sweep, const std::string& experiment,
         const std::string& label, const std::string& component, double estimate, double se, std::size_t paths,
         const RunInfo& info, const std::string& verdict) {
  if (sweep) out << field(*sweep) << ',';
  out << field(experiment) << ',' << field(label) << ',' << field(component) << ',' << format_number(estimate) << ','
      << format_number(se) << ',' << paths << ',' << info.seed << ',' << format_number(info.dt) << ','
      << format_number(info.T) << ',' << field(info.model) << ',' << verdict << '\n';
}

}  // namespace

void write_csv_header(std::ostream& out, bool sweep) {
  if (sweep) out << "sweep,";
  out << "experiment,label,component,estimate,stderr,N,seed,dt,T,model,verdict\n";
}

void write_csv_rows(std::ostream& out, const CheckResult& result, const RunInfo& info,
                    const std::optional<std::string>& sweep_value) {
  const std::size_t paths = result.paths ? result.paths : info.paths;
  for (const Entry& e : result.entries)
    row(out, sweep_value, result.experiment, e.label, e.component, e.est.value, e.est.se, paths, info,
        to_string(e.verdict));
}

void write_csv_rows(std::ostream& out, const MCReport& report, const RunInfo& info, const std::string& experiment) {
  for (int a = 0; a < report.rows; ++a)
    for (int b = 0; b < report.cols; ++b) {
      const int c = a * report.cols + b;
      std::string comp = "value";
      if (report.rows > 1 && report.cols > 1) comp = matrix_component(a, b);
      else if (report.rows * report.cols > 1) comp = vector_component(c);
      row(out, std::nullopt, experiment, report.label, comp, report.estimate[c], report.se[c], report.paths, info,
          to_string(Verdict::kInfo));
    }
}

}  // namespace pathlab::estimators
