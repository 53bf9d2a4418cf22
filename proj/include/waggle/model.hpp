#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "waggle/geometry.hpp"

namespace waggle::model {

using geom::Vec2;

// A robot's private coordinate system. Axes are unit and orthogonal with
// y = x rotated counterclockwise for every robot (shared handedness). The
// frame is anchored at the robot's start position and does not move with it,
// so the robot observes its own displacement like everyone else's.
struct LocalFrame {
  Vec2 origin;
  Vec2 x_axis{1.0, 0.0};
  Vec2 y_axis{0.0, 1.0};
  double unit_scale = 1.0;

  Vec2 to_local(const Vec2& q) const {
    const Vec2 d = q - origin;
    return {geom::dot(d, x_axis) / unit_scale, geom::dot(d, y_axis) / unit_scale};
  }
  Vec2 to_global(const Vec2& v) const {
    return origin + (x_axis * v.x + y_axis * v.y) * unit_scale;
  }

  static LocalFrame make(const Vec2& origin, double rotation, double scale);
};

// The multiset of robot positions at one instant.
struct Configuration {
  std::vector<Vec2> positions;
  long time = 0;
};

// What an active robot sees: every position mapped into its own frame, plus
// which entry is itself. Visible identifiers are present only in identified
// systems; anonymous protocols must not consult them.
struct View {
  std::vector<Vec2> positions;
  int self = -1;
  const std::vector<int>* visible_ids = nullptr;
};

// A protocol automaton: maps (memory, view) to a destination in the robot's
// local coordinates. decide() is called exactly once per activation.
class Robot {
 public:
  virtual ~Robot() = default;
  virtual Vec2 decide(const View& view) = 0;
  // Short stable tag of the current automaton phase, recorded in traces.
  virtual std::string phase() const { return "-"; }
};

struct RobotSpec {
  int id = 0;
  std::optional<int> visible_id;
  double sigma = 1.0;  // max distance covered in one activation
  LocalFrame frame;
};

struct ActivationSchedule {
  enum class Kind { Synchronous, RandomFair, Explicit };
  Kind kind = Kind::Synchronous;
  std::uint64_t seed = 0;
  int window = 8;  // RandomFair: every robot active within any `window` instants
  std::vector<std::vector<int>> active_sets;  // Explicit only

  static ActivationSchedule synchronous();
  static ActivationSchedule random_fair(std::uint64_t seed, int window);
  static ActivationSchedule explicit_sets(std::vector<std::vector<int>> sets);
};

// Materialize the active set for each of `horizon` instants. Deterministic
// given (schedule, robots, horizon).
std::vector<std::vector<int>> generate_schedule(const ActivationSchedule& schedule,
                                                int robots, int horizon);

struct Trace {
  std::vector<std::vector<Vec2>> configs;           // horizon + 1 entries
  std::vector<std::vector<int>> active_sets;        // horizon entries
  std::vector<std::vector<Vec2>> destinations;      // computed global targets, pre-clamp
  std::vector<std::vector<std::string>> phases;     // horizon + 1 entries

  long horizon() const { return static_cast<long>(active_sets.size()); }
};

class EngineFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Map a configuration into one robot's frame.
View observe(const Configuration& config, const LocalFrame& frame, int self,
             const std::vector<int>* visible_ids = nullptr);

// One SSM step: every active robot observes the same pre-step configuration,
// decides, and moves toward its destination, clamped at sigma. Inactive
// robots keep position and memory. `destinations_out`, when given, receives
// the computed (unclamped) global targets.
Configuration step(const Configuration& config, const std::vector<int>& active,
                   const std::vector<RobotSpec>& specs,
                   const std::vector<std::unique_ptr<Robot>>& automata,
                   const std::vector<int>* visible_ids = nullptr,
                   std::vector<Vec2>* destinations_out = nullptr,
                   bool reverse_processing_order = false);

// Drive a full run over a materialized schedule. `before_step(t)` runs before
// instant t's step (the harness uses it to enqueue scripted messages).
Trace run(const Configuration& initial, const std::vector<RobotSpec>& specs,
          const std::vector<std::unique_ptr<Robot>>& automata,
          const std::vector<std::vector<int>>& schedule,
          const std::function<void(long)>& before_step = {},
          bool reverse_processing_order = false);

}  // namespace waggle::model
