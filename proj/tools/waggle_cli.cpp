#include <iostream>

#include "CLI11.hpp"
#include "waggle/trace_io.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "waggle: deaf-and-dumb robots exchanging messages purely by moving.\n"
      "Runs a scenario, writes trace.jsonl / verdicts.json / summary.json, and\n"
      "exits 0 only when every runtime property holds."};

  waggle::cli::CliOptions options;
  std::uint64_t seed = 0;
  long horizon = 0;
  app.add_option("scenario", options.scenario_path, "scenario file (JSON)")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the schedule seed");
  auto* horizon_opt = app.add_option("--horizon", horizon, "override the horizon");
  app.add_option("--out", options.out_dir, "output directory (default: .)");
  app.add_flag("--explore", options.explore,
               "enumerate every activation schedule of the given horizon (n <= 3)");
  app.add_option("--explore-budget", options.explore_budget,
                 "max schedules to enumerate before reporting a partial verdict");
  app.add_flag("--quiet", options.quiet, "suppress per-verdict output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp") return app.exit(e);
    app.exit(e);
    return 2;
  }
  if (*seed_opt) options.seed = seed;
  if (*horizon_opt) options.horizon = horizon;

  return waggle::cli::run_scenario_cli(options, std::cout, std::cerr);
}
