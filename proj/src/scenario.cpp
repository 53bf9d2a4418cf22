#include "waggle/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace waggle::cli {

using harness::ValidationError;
using json = nlohmann::ordered_json;

namespace {

const json& require(const json& obj, const char* key, const char* where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ValidationError(std::string("scenario: missing field '") + key + "' in " + where);
  return *it;
}

model::ActivationSchedule parse_schedule(const json& j) {
  model::ActivationSchedule s;
  const std::string kind = require(j, "kind", "schedule").get<std::string>();
  if (kind == "synchronous") {
    s.kind = model::ActivationSchedule::Kind::Synchronous;
  } else if (kind == "random_fair") {
    s.kind = model::ActivationSchedule::Kind::RandomFair;
    s.seed = j.value("seed", 0ull);
    s.window = j.value("window", 8);
  } else if (kind == "explicit") {
    s.kind = model::ActivationSchedule::Kind::Explicit;
    for (const json& set : require(j, "active_sets", "schedule"))
      s.active_sets.push_back(set.get<std::vector<int>>());
  } else {
    throw ValidationError("scenario: unknown schedule kind '" + kind + "'");
  }
  return s;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("scenario: not valid JSON: ") + e.what());
  }
  Scenario s;
  s.format_version = require(j, "format_version", "scenario").get<int>();
  if (s.format_version != 1)
    throw ValidationError("scenario: unsupported format_version " +
                          std::to_string(s.format_version));
  const std::string name = require(j, "protocol", "scenario").get<std::string>();
  const auto kind = proto::protocol_from_name(name);
  if (!kind) throw ValidationError("scenario: unknown protocol '" + name + "'");
  s.ctx.protocol = *kind;

  size_t pinned = 0;
  for (const json& rj : require(j, "robots", "scenario")) {
    harness::RobotSetup r;
    const json& pos = require(rj, "position", "robot");
    if (!pos.is_array() || pos.size() != 2)
      throw ValidationError("scenario: robot position must be [x, y]");
    r.position = {pos[0].get<double>(), pos[1].get<double>()};
    r.sigma = rj.value("sigma", 1.0);
    if (rj.contains("visible_id") && !rj["visible_id"].is_null())
      r.visible_id = rj["visible_id"].get<int>();
    if (rj.contains("frame")) {
      r.frame_rotation = require(rj["frame"], "rotation", "frame").get<double>();
      r.frame_scale = require(rj["frame"], "scale", "frame").get<double>();
      ++pinned;
    }
    s.ctx.robots.push_back(r);
  }
  if (pinned != 0 && pinned != s.ctx.robots.size())
    throw ValidationError("scenario: either every robot pins its frame or none does");
  s.frames_pinned = pinned == s.ctx.robots.size() && pinned > 0;

  s.frame_seed = j.value("frame_seed", 0ull);
  s.ctx.schedule = j.contains("schedule") ? parse_schedule(j["schedule"])
                                          : model::ActivationSchedule::synchronous();
  s.ctx.horizon = require(j, "horizon", "scenario").get<long>();
  if (j.contains("messages")) {
    for (const json& mj : j["messages"]) {
      harness::ScriptMessage m;
      m.sender = require(mj, "sender", "message").get<int>();
      m.recipient = require(mj, "recipient", "message").get<int>();
      m.bits = require(mj, "bits", "message").get<std::vector<int>>();
      m.enqueue = mj.value("enqueue", 0L);
      s.ctx.script.push_back(std::move(m));
    }
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return scenario_from_json_text(buf.str());
}

std::string scenario_to_json_text(const Scenario& s, bool pin_frames, int indent) {
  json j;
  j["format_version"] = s.format_version;
  j["protocol"] = proto::protocol_name(s.ctx.protocol);
  json robots = json::array();
  for (const harness::RobotSetup& r : s.ctx.robots) {
    json rj;
    rj["position"] = {r.position.x, r.position.y};
    rj["sigma"] = r.sigma;
    if (r.visible_id) rj["visible_id"] = *r.visible_id;
    if (pin_frames) rj["frame"] = {{"rotation", r.frame_rotation}, {"scale", r.frame_scale}};
    robots.push_back(rj);
  }
  j["robots"] = robots;
  j["frame_seed"] = s.frame_seed;
  json sched;
  switch (s.ctx.schedule.kind) {
    case model::ActivationSchedule::Kind::Synchronous: sched["kind"] = "synchronous"; break;
    case model::ActivationSchedule::Kind::RandomFair:
      sched["kind"] = "random_fair";
      sched["seed"] = s.ctx.schedule.seed;
      sched["window"] = s.ctx.schedule.window;
      break;
    case model::ActivationSchedule::Kind::Explicit:
      sched["kind"] = "explicit";
      sched["active_sets"] = s.ctx.schedule.active_sets;
      break;
  }
  j["schedule"] = sched;
  j["horizon"] = s.ctx.horizon;
  json msgs = json::array();
  for (const harness::ScriptMessage& m : s.ctx.script) {
    json mj;
    mj["sender"] = m.sender;
    mj["recipient"] = m.recipient;
    mj["bits"] = m.bits;
    mj["enqueue"] = m.enqueue;
    msgs.push_back(mj);
  }
  j["messages"] = msgs;
  return j.dump(indent);
}

void finalize(Scenario& s, std::optional<std::uint64_t> seed_override,
              std::optional<long> horizon_override) {
  if (seed_override) s.ctx.schedule.seed = *seed_override;
  if (horizon_override) s.ctx.horizon = *horizon_override;
  if (!s.frames_pinned) {
    harness::resolve_frames(s.ctx, s.frame_seed);
    s.frames_pinned = true;
  }
}

}  // namespace waggle::cli
