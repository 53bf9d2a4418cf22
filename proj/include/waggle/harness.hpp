#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "waggle/model.hpp"
#include "waggle/protocols/common.hpp"
#include "waggle/protocols/decoders.hpp"

namespace waggle::harness {

using geom::Vec2;

struct RobotSetup {
  Vec2 position;  // global position at t0
  double sigma = 1.0;
  std::optional<int> visible_id;
  double frame_rotation = 0.0;
  double frame_scale = 1.0;
};

struct ScriptMessage {
  int sender = 0;
  int recipient = 0;  // robot index (ground truth); translated to the sender's label
  std::vector<int> bits;
  long enqueue = 0;
};

struct RunContext {
  proto::ProtocolKind protocol = proto::ProtocolKind::Sync2;
  std::vector<RobotSetup> robots;
  model::ActivationSchedule schedule;
  long horizon = 0;
  std::vector<ScriptMessage> script;
  bool mutant_skip_resync = false;  // test hook: async2 without the resync walk

  int robot_count() const { return static_cast<int>(robots.size()); }
};

// Thrown when a context violates a protocol assumption (exit code 2 at the CLI).
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void validate(const RunContext& ctx);

// Fill frame rotations/scales from a seed. Protocols with sense of direction
// keep rotation 0; all frames keep the shared handedness.
void resolve_frames(RunContext& ctx, std::uint64_t frame_seed);

// The sender's label for a recipient robot under the active naming, computed
// from the ground-truth t0 configuration (the namings are similarity
// invariant, so this matches the label the robot derives in its own frame).
int recipient_label(const RunContext& ctx, int sender, int recipient);

struct Verdict {
  std::string property;
  bool pass = true;
  long first_violation = -1;
  std::string evidence;
};

struct MonitorReport {
  std::vector<Verdict> verdicts;
  bool all_pass() const;
  const Verdict* find(const std::string& property) const;
};

struct MonitorOptions {
  // Liveness verdicts (emission/receipt/fifo/redundancy/lemma3) assume the
  // horizon leaves room to finish; schedule exploration turns them off and
  // relies on receipt_progress.
  bool include_liveness = true;
};

MonitorReport monitor_suite(const model::Trace& trace, const RunContext& ctx,
                            const MonitorOptions& options = {});

struct BitRecord {
  int sender = 0;
  int recipient = 0;
  int recipient_label = 0;
  int bit = 0;
  long seq = 0;  // per-sender bit sequence number
  long enqueue = -1;
  long encode = -1;                    // step at which the bit's excursion began
  std::map<int, long> decode_instants;  // observer -> activation instant
};

struct Summary {
  long instants = 0;
  long bits_expected = 0;
  long bits_delivered = 0;  // decoded by their addressees
  long decode_faults = 0;
  std::vector<double> distance_traveled;
};

struct RunOutput {
  model::Trace trace;
  MonitorReport report;
  std::vector<BitRecord> records;
  Summary summary;
};

// Build automata, translate the script, drive the engine, monitor the trace.
RunOutput run_protocol(const RunContext& ctx);

struct ExploreOutcome {
  long enumerated = 0;
  long total = 0;           // (2^n - 1)^horizon, saturated at LLONG_MAX
  bool exhaustive = true;   // false when the budget pruned the enumeration
  long first_failing_schedule = -1;
  std::vector<std::vector<int>> failing_active_sets;
  std::vector<Verdict> failing_verdicts;
};

// Run every activation-set sequence of the given horizon (or the first
// `budget` in lexicographic order) through the monitors.
ExploreOutcome explore_schedules(const RunContext& base, long budget = 1 << 22,
                                 int threads = 0);

}  // namespace waggle::harness
