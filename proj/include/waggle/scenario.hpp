#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "waggle/harness.hpp"

namespace waggle::cli {

// A scenario file: protocol, robots, schedule, horizon, and the message
// script. Frames are either pinned per robot in the file or derived from
// frame_seed when the scenario is finalized.
struct Scenario {
  int format_version = 1;
  harness::RunContext ctx;
  std::uint64_t frame_seed = 0;
  bool frames_pinned = false;
};

Scenario scenario_from_json_text(const std::string& text);
Scenario load_scenario(const std::string& path);

// Serialized scenario; with pinned frames it reproduces the exact run.
std::string scenario_to_json_text(const Scenario& s, bool pin_frames, int indent = -1);

// Apply command-line overrides and resolve frames.
void finalize(Scenario& s, std::optional<std::uint64_t> seed_override,
              std::optional<long> horizon_override);

}  // namespace waggle::cli
