#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "waggle/scenario.hpp"

namespace waggle::cli {

// Line-delimited trace: a header line carrying the fully resolved scenario,
// then one record per instant with positions printed at 12 significant
// digits. A trace file is self-contained: reading it back reconstructs the
// run context, so the monitor suite reproduces the in-process verdicts.
void write_trace(std::ostream& os, const Scenario& resolved, const model::Trace& trace);

struct TraceFile {
  Scenario scenario;
  model::Trace trace;
};
TraceFile read_trace(std::istream& is);
TraceFile load_trace(const std::string& path);

void write_verdicts(std::ostream& os, const harness::MonitorReport& report);
void write_summary(std::ostream& os, const harness::Summary& summary, bool all_pass);
void write_explore(std::ostream& os, const harness::ExploreOutcome& outcome);

struct CliOptions {
  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<long> horizon;
  std::string out_dir = ".";
  bool explore = false;
  long explore_budget = 1 << 22;
  bool quiet = false;
};

// Exit codes: 0 all verdicts pass, 1 property violation, 2 usage/validation.
int run_scenario_cli(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace waggle::cli
