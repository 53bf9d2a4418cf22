#include "waggle/model.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace waggle::model {

LocalFrame LocalFrame::make(const Vec2& origin, double rotation, double scale) {
  if (!(scale > 0.0)) throw std::domain_error("frame scale must be positive");
  LocalFrame f;
  f.origin = origin;
  f.x_axis = {std::cos(rotation), std::sin(rotation)};
  f.y_axis = f.x_axis.rotated_cw(-geom::kPi / 2.0);  // counterclockwise quarter turn
  f.unit_scale = scale;
  return f;
}

ActivationSchedule ActivationSchedule::synchronous() { return {}; }

ActivationSchedule ActivationSchedule::random_fair(std::uint64_t seed, int window) {
  ActivationSchedule s;
  s.kind = Kind::RandomFair;
  s.seed = seed;
  s.window = window;
  return s;
}

ActivationSchedule ActivationSchedule::explicit_sets(std::vector<std::vector<int>> sets) {
  ActivationSchedule s;
  s.kind = Kind::Explicit;
  s.active_sets = std::move(sets);
  return s;
}

std::vector<std::vector<int>> generate_schedule(const ActivationSchedule& schedule,
                                                int robots, int horizon) {
  if (robots <= 0) throw std::domain_error("schedule needs at least one robot");
  if (horizon < 0) throw std::domain_error("schedule horizon must be nonnegative");
  std::vector<std::vector<int>> out;
  out.reserve(static_cast<size_t>(horizon));
  switch (schedule.kind) {
    case ActivationSchedule::Kind::Synchronous: {
      std::vector<int> all(static_cast<size_t>(robots));
      for (int i = 0; i < robots; ++i) all[static_cast<size_t>(i)] = i;
      out.assign(static_cast<size_t>(horizon), all);
      break;
    }
    case ActivationSchedule::Kind::Explicit: {
      if (static_cast<long>(schedule.active_sets.size()) < horizon)
        throw std::domain_error("explicit schedule shorter than horizon");
      for (long t = 0; t < horizon; ++t) {
        const auto& s = schedule.active_sets[static_cast<size_t>(t)];
        if (s.empty()) throw std::domain_error("explicit schedule has an empty active set");
        for (int r : s)
          if (r < 0 || r >= robots)
            throw std::domain_error("explicit schedule names an unknown robot");
        out.push_back(s);
      }
      break;
    }
    case ActivationSchedule::Kind::RandomFair: {
      if (schedule.window < 1) throw std::domain_error("fairness window must be >= 1");
      std::mt19937_64 rng(schedule.seed);
      std::vector<int> idle(static_cast<size_t>(robots), 0);
      for (long t = 0; t < horizon; ++t) {
        const std::uint64_t word = rng();
        std::vector<int> active;
        for (int i = 0; i < robots; ++i) {
          const bool drawn = (word >> (i % 64)) & 1u;
          const bool forced = idle[static_cast<size_t>(i)] >= schedule.window - 1;
          if (drawn || forced) active.push_back(i);
        }
        if (active.empty()) active.push_back(static_cast<int>(rng() % robots));
        size_t k = 0;
        for (int i = 0; i < robots; ++i) {
          if (k < active.size() && active[k] == i) {
            idle[static_cast<size_t>(i)] = 0;
            ++k;
          } else {
            ++idle[static_cast<size_t>(i)];
          }
        }
        out.push_back(std::move(active));
      }
      break;
    }
  }
  return out;
}

View observe(const Configuration& config, const LocalFrame& frame, int self,
             const std::vector<int>* visible_ids) {
  View v;
  v.positions.reserve(config.positions.size());
  for (const Vec2& p : config.positions) v.positions.push_back(frame.to_local(p));
  v.self = self;
  v.visible_ids = visible_ids;
  return v;
}

Configuration step(const Configuration& config, const std::vector<int>& active,
                   const std::vector<RobotSpec>& specs,
                   const std::vector<std::unique_ptr<Robot>>& automata,
                   const std::vector<int>* visible_ids,
                   std::vector<Vec2>* destinations_out, bool reverse_processing_order) {
  if (active.empty()) throw std::domain_error("step: active set must be nonempty");
  Configuration next = config;
  next.time = config.time + 1;
  if (destinations_out) *destinations_out = config.positions;
  std::vector<int> order = active;
  if (reverse_processing_order) std::reverse(order.begin(), order.end());
  for (int r : order) {
    const auto& spec = specs[static_cast<size_t>(r)];
    const View view = observe(config, spec.frame, r, visible_ids);
    const Vec2 local_dest = automata[static_cast<size_t>(r)]->decide(view);
    if (!local_dest.finite())
      throw EngineFault("robot " + std::to_string(r) + " computed a non-finite destination");
    const Vec2 global_dest = spec.frame.to_global(local_dest);
    if (destinations_out) (*destinations_out)[static_cast<size_t>(r)] = global_dest;
    const Vec2 from = config.positions[static_cast<size_t>(r)];
    const Vec2 d = global_dest - from;
    const double len = d.norm();
    next.positions[static_cast<size_t>(r)] =
        len <= spec.sigma ? global_dest : from + d * (spec.sigma / len);
  }
  return next;
}

Trace run(const Configuration& initial, const std::vector<RobotSpec>& specs,
          const std::vector<std::unique_ptr<Robot>>& automata,
          const std::vector<std::vector<int>>& schedule,
          const std::function<void(long)>& before_step, bool reverse_processing_order) {
  const size_t n = specs.size();
  std::vector<int> ids;
  bool identified = true;
  for (const auto& s : specs) identified = identified && s.visible_id.has_value();
  if (identified)
    for (const auto& s : specs) ids.push_back(*s.visible_id);

  Trace trace;
  auto snapshot_phases = [&]() {
    std::vector<std::string> ph(n);
    for (size_t i = 0; i < n; ++i) ph[i] = automata[i]->phase();
    trace.phases.push_back(std::move(ph));
  };

  Configuration config = initial;
  config.time = 0;
  trace.configs.push_back(config.positions);
  snapshot_phases();
  for (size_t t = 0; t < schedule.size(); ++t) {
    if (before_step) before_step(static_cast<long>(t));
    std::vector<Vec2> dests;
    config = step(config, schedule[t], specs, automata, identified ? &ids : nullptr, &dests,
                  reverse_processing_order);
    trace.active_sets.push_back(schedule[t]);
    trace.destinations.push_back(std::move(dests));
    trace.configs.push_back(config.positions);
    snapshot_phases();
  }
  return trace;
}

}  // namespace waggle::model
