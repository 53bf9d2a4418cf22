#include "waggle/harness.hpp"

#include <algorithm>
#include <atomic>
#include <climits>
#include <cmath>
#include <random>
#include <sstream>
#include <thread>

#include "waggle/protocols/async2.hpp"
#include "waggle/protocols/async_n.hpp"
#include "waggle/protocols/sync2.hpp"
#include "waggle/protocols/sync_n.hpp"

namespace waggle::harness {

namespace {

using proto::NamingMode;
using proto::ProtocolKind;

// Empirical bound for the bounded-window fairness proxy: under RandomFair(B)
// an observer registers a fresh change for every peer well within 10*B
// instants (its own activation gap is < B, every peer moves at least once per
// B instants, and position aliasing across a full excursion costs a few more
// sightings). Calibrated over the acceptance seeds with ample margin.
constexpr long kLemma3WindowFactor = 10;

// Directions closer than this (in terms of 1 - cos) count as "the same
// direction" when the Lemma 1 monitor segments a robot's walk; protocol
// direction changes are quarter- to half-turns, far beyond it.
constexpr double kSameDirSlack = 1e-6;

constexpr double kTinyDist = 1e-12;

bool uses_granulars(ProtocolKind p) {
  return p == ProtocolKind::SyncNId || p == ProtocolKind::SyncNSoD ||
         p == ProtocolKind::SyncNChirality || p == ProtocolKind::AsyncN;
}

NamingMode mode_of(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::SyncNId: return NamingMode::Identified;
    case ProtocolKind::SyncNSoD: return NamingMode::AnonSoD;
    default: return NamingMode::AnonChirality;
  }
}

std::vector<Vec2> positions_of(const RunContext& ctx) {
  std::vector<Vec2> p;
  p.reserve(ctx.robots.size());
  for (const auto& r : ctx.robots) p.push_back(r.position);
  return p;
}

std::vector<int> ids_of(const RunContext& ctx) {
  std::vector<int> ids;
  for (const auto& r : ctx.robots) ids.push_back(r.visible_id.value_or(-1));
  return ids;
}

struct ExpectedBit {
  int recipient;
  int recipient_label;
  int bit;
  long enqueue;
};

// Per-sender flattened bit streams in enqueue order.
std::vector<std::vector<ExpectedBit>> expected_streams(const RunContext& ctx) {
  std::vector<std::vector<ExpectedBit>> out(ctx.robots.size());
  std::vector<ScriptMessage> script = ctx.script;
  std::stable_sort(script.begin(), script.end(),
                   [](const ScriptMessage& a, const ScriptMessage& b) {
                     return a.enqueue < b.enqueue;
                   });
  for (const ScriptMessage& m : script) {
    const int label = recipient_label(ctx, m.sender, m.recipient);
    for (int b : m.bits)
      out[static_cast<size_t>(m.sender)].push_back({m.recipient, label, b, m.enqueue});
  }
  return out;
}

struct PhaseSegment {
  std::string phase;
  long first = 0;  // instant range [first, last], inclusive
  long last = 0;
};

std::vector<PhaseSegment> phase_segments(const model::Trace& trace, int robot) {
  std::vector<PhaseSegment> segs;
  for (long i = 0; i < static_cast<long>(trace.phases.size()); ++i) {
    const std::string& p = trace.phases[static_cast<size_t>(i)][static_cast<size_t>(robot)];
    if (segs.empty() || segs.back().phase != p) segs.push_back({p, i, i});
    else segs.back().last = i;
  }
  return segs;
}

struct SendSegment {
  long seq;
  int label;
  int bit;
  long encode_step;  // step index of the first move of the excursion
  long first;
  long last;
};

bool parse_tagged(const std::string& phase, const std::string& tag, std::vector<long>& fields) {
  if (phase.compare(0, tag.size(), tag) != 0) return false;
  fields.clear();
  size_t pos = tag.size();
  while (pos < phase.size() && phase[pos] == ':') {
    size_t end = phase.find(':', pos + 1);
    if (end == std::string::npos) end = phase.size();
    fields.push_back(std::stol(phase.substr(pos + 1, end - pos - 1)));
    pos = end;
  }
  return true;
}

std::vector<SendSegment> send_segments(const std::vector<PhaseSegment>& segs) {
  std::vector<SendSegment> out;
  std::vector<long> f;
  for (const PhaseSegment& s : segs) {
    if (parse_tagged(s.phase, "send", f) && f.size() == 3)
      out.push_back({f[2], static_cast<int>(f[0]), static_cast<int>(f[1]), s.first - 1, s.first,
                     s.last});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Trace analysis shared by the monitors, the records, and the summary.

struct Analysis {
  const model::Trace& trace;
  const RunContext& ctx;
  int n;
  long horizon;
  bool synchronous;
  std::vector<model::RobotSpec> specs;
  std::vector<int> ids;
  bool identified;

  std::vector<std::vector<ExpectedBit>> expected;
  std::vector<std::vector<PhaseSegment>> segments;        // per robot
  std::vector<std::vector<SendSegment>> sends;            // per robot
  std::vector<std::vector<proto::DecodedBit>> decoded;    // per observer
  std::vector<long> decode_faults;
  std::vector<double> granular_radius_of;                 // global units (granular protocols)
  std::vector<std::vector<std::vector<long>>> change_events;  // [x][y] -> instants
};

std::vector<model::RobotSpec> build_specs(const RunContext& ctx) {
  std::vector<model::RobotSpec> specs;
  const bool keep_ids = ctx.protocol == ProtocolKind::SyncNId;
  for (size_t i = 0; i < ctx.robots.size(); ++i) {
    const RobotSetup& r = ctx.robots[i];
    model::RobotSpec s;
    s.id = static_cast<int>(i);
    s.visible_id = keep_ids ? r.visible_id : std::nullopt;
    s.sigma = r.sigma;
    s.frame = model::LocalFrame::make(r.position, r.frame_rotation, r.frame_scale);
    specs.push_back(s);
  }
  return specs;
}

std::unique_ptr<proto::Decoder> make_decoder(const RunContext& ctx, int observer,
                                             const std::vector<model::RobotSpec>& specs,
                                             const std::vector<Vec2>& t0_global,
                                             const std::vector<int>* ids) {
  switch (ctx.protocol) {
    case ProtocolKind::Sync2: return std::make_unique<proto::Sync2Decoder>();
    case ProtocolKind::SyncNId:
    case ProtocolKind::SyncNSoD:
    case ProtocolKind::SyncNChirality:
      return std::make_unique<proto::SyncNDecoder>(mode_of(ctx.protocol));
    case ProtocolKind::Async2: return std::make_unique<proto::Async2Decoder>();
    case ProtocolKind::AsyncN: {
      std::vector<Vec2> t0_local;
      t0_local.reserve(t0_global.size());
      for (const Vec2& p : t0_global)
        t0_local.push_back(specs[static_cast<size_t>(observer)].frame.to_local(p));
      return std::make_unique<proto::AsyncNDecoder>(observer, t0_local, mode_of(ctx.protocol),
                                                    ids);
    }
  }
  throw std::logic_error("unknown protocol");
}

Analysis analyze(const model::Trace& trace, const RunContext& ctx) {
  Analysis a{trace, ctx, ctx.robot_count(), trace.horizon(),
             proto::is_synchronous(ctx.protocol), build_specs(ctx), ids_of(ctx),
             ctx.protocol == ProtocolKind::SyncNId,
             {}, {}, {}, {}, {}, {}, {}};
  a.expected = expected_streams(ctx);
  a.segments.reserve(static_cast<size_t>(a.n));
  a.sends.reserve(static_cast<size_t>(a.n));
  for (int r = 0; r < a.n; ++r) {
    a.segments.push_back(phase_segments(trace, r));
    a.sends.push_back(send_segments(a.segments.back()));
  }

  // Replay every observer's decoder over its activation instants.
  const std::vector<Vec2>& t0 = trace.configs.front();
  const std::vector<int>* ids = a.identified ? &a.ids : nullptr;
  for (int o = 0; o < a.n; ++o) {
    auto decoder = make_decoder(ctx, o, a.specs, t0, ids);
    for (long t = 0; t < a.horizon; ++t) {
      const auto& active = trace.active_sets[static_cast<size_t>(t)];
      if (std::find(active.begin(), active.end(), o) == active.end()) continue;
      model::Configuration cfg{trace.configs[static_cast<size_t>(t)], t};
      const model::View view = model::observe(cfg, a.specs[static_cast<size_t>(o)].frame, o, ids);
      decoder->feed(t, view);
    }
    a.decoded.push_back(decoder->decoded());
    a.decode_faults.push_back(decoder->faults());
  }

  if (uses_granulars(ctx.protocol)) {
    for (int r = 0; r < a.n; ++r) {
      std::vector<Vec2> others;
      for (int j = 0; j < a.n; ++j)
        if (j != r) others.push_back(t0[static_cast<size_t>(j)]);
      a.granular_radius_of.push_back(geom::granular_radius(t0[static_cast<size_t>(r)], others));
    }
  }

  // Per-pair position-change events, primed with the t0 configuration.
  a.change_events.assign(static_cast<size_t>(a.n),
                         std::vector<std::vector<long>>(static_cast<size_t>(a.n)));
  std::vector<std::vector<Vec2>> last_seen(static_cast<size_t>(a.n), t0);
  for (long t = 0; t < a.horizon; ++t) {
    for (int x : trace.active_sets[static_cast<size_t>(t)]) {
      for (int y = 0; y < a.n; ++y) {
        if (y == x) continue;
        const Vec2& now = trace.configs[static_cast<size_t>(t)][static_cast<size_t>(y)];
        Vec2& seen = last_seen[static_cast<size_t>(x)][static_cast<size_t>(y)];
        if (geom::dist(now, seen) > geom::kEps) {
          seen = now;
          a.change_events[static_cast<size_t>(x)][static_cast<size_t>(y)].push_back(t);
        }
      }
    }
  }
  return a;
}

long count_in(const std::vector<long>& sorted, long lo_exclusive, long hi_inclusive) {
  auto lo = std::upper_bound(sorted.begin(), sorted.end(), lo_exclusive);
  auto hi = std::upper_bound(sorted.begin(), sorted.end(), hi_inclusive);
  return static_cast<long>(hi - lo);
}

std::string fmt(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// ---------------------------------------------------------------------------
// Individual verdicts.

Verdict check_schedule(const Analysis& a) {
  Verdict v{"schedule_valid", true, -1, ""};
  for (long t = 0; t < a.horizon; ++t) {
    const auto& act = a.trace.active_sets[static_cast<size_t>(t)];
    if (act.empty()) return {v.property, false, t, "empty active set"};
    if (a.synchronous && static_cast<int>(act.size()) != a.n)
      return {v.property, false, t, "synchronous schedule with inactive robots"};
  }
  if (a.ctx.schedule.kind == model::ActivationSchedule::Kind::RandomFair) {
    const int window = a.ctx.schedule.window;
    std::vector<long> idle(static_cast<size_t>(a.n), 0);
    for (long t = 0; t < a.horizon; ++t) {
      const auto& act = a.trace.active_sets[static_cast<size_t>(t)];
      for (int r = 0; r < a.n; ++r) {
        if (std::find(act.begin(), act.end(), r) != act.end()) {
          idle[static_cast<size_t>(r)] = 0;
        } else if (++idle[static_cast<size_t>(r)] >= window) {
          return {v.property, false, t,
                  "robot " + std::to_string(r) + " idle for " + std::to_string(window) +
                      " consecutive instants"};
        }
      }
    }
  }
  return v;
}

Verdict check_collisions(const Analysis& a) {
  Verdict v{"collision_freedom", true, -1, ""};
  for (long t = 0; t <= a.horizon; ++t) {
    const auto& cfg = a.trace.configs[static_cast<size_t>(t)];
    for (int i = 0; i < a.n; ++i)
      for (int j = i + 1; j < a.n; ++j)
        if (geom::dist(cfg[static_cast<size_t>(i)], cfg[static_cast<size_t>(j)]) <= kTinyDist)
          return {v.property, false, t,
                  "robots " + std::to_string(i) + " and " + std::to_string(j) + " collide"};
  }
  return v;
}

Verdict check_sigma(const Analysis& a) {
  Verdict v{"sigma_clamp", true, -1, ""};
  for (long t = 0; t < a.horizon; ++t) {
    const auto& from = a.trace.configs[static_cast<size_t>(t)];
    const auto& to = a.trace.configs[static_cast<size_t>(t + 1)];
    const auto& act = a.trace.active_sets[static_cast<size_t>(t)];
    for (int r = 0; r < a.n; ++r) {
      const double d = geom::dist(from[static_cast<size_t>(r)], to[static_cast<size_t>(r)]);
      const bool active = std::find(act.begin(), act.end(), r) != act.end();
      if (!active && d > kTinyDist)
        return {v.property, false, t, "inactive robot " + std::to_string(r) + " moved"};
      if (active && d > a.ctx.robots[static_cast<size_t>(r)].sigma + geom::kEps)
        return {v.property, false, t,
                "robot " + std::to_string(r) + " covered " + fmt(d) + " > sigma"};
    }
  }
  return v;
}

Verdict check_containment(const Analysis& a) {
  Verdict v{"granular_containment", true, -1, ""};
  const auto& t0 = a.trace.configs.front();
  for (long t = 0; t <= a.horizon; ++t) {
    const auto& cfg = a.trace.configs[static_cast<size_t>(t)];
    for (int r = 0; r < a.n; ++r) {
      const double d = geom::dist(cfg[static_cast<size_t>(r)], t0[static_cast<size_t>(r)]);
      if (d >= a.granular_radius_of[static_cast<size_t>(r)] - geom::kEps)
        return {v.property, false, t,
                "robot " + std::to_string(r) + " at distance " + fmt(d) +
                    " of its center, granular radius " +
                    fmt(a.granular_radius_of[static_cast<size_t>(r)])};
    }
  }
  return v;
}

Verdict check_disjoint(const Analysis& a) {
  Verdict v{"granular_disjoint", true, -1, ""};
  const auto& t0 = a.trace.configs.front();
  for (int i = 0; i < a.n; ++i)
    for (int j = i + 1; j < a.n; ++j) {
      const double d = geom::dist(t0[static_cast<size_t>(i)], t0[static_cast<size_t>(j)]);
      const double sum = a.granular_radius_of[static_cast<size_t>(i)] +
                         a.granular_radius_of[static_cast<size_t>(j)];
      if (d < sum - geom::kEps)
        return {v.property, false, 0,
                "granulars of robots " + std::to_string(i) + " and " + std::to_string(j) +
                    " overlap"};
    }
  return v;
}

Verdict check_remark6(const Analysis& a) {
  Verdict v{"remark6", true, -1, ""};
  for (long t = 0; t < a.horizon; ++t) {
    const auto& from = a.trace.configs[static_cast<size_t>(t)];
    const auto& to = a.trace.configs[static_cast<size_t>(t + 1)];
    for (int r : a.trace.active_sets[static_cast<size_t>(t)]) {
      if (geom::dist(from[static_cast<size_t>(r)], to[static_cast<size_t>(r)]) <= 0.0)
        return {v.property, false, t,
                "active robot " + std::to_string(r) + " did not move"};
    }
  }
  return v;
}

Verdict check_silence(const Analysis& a) {
  Verdict v{"silence", true, -1, ""};
  std::vector<bool> is_sender(static_cast<size_t>(a.n), false);
  for (const auto& m : a.ctx.script) is_sender[static_cast<size_t>(m.sender)] = true;
  const auto& t0 = a.trace.configs.front();
  for (long t = 1; t <= a.horizon; ++t) {
    const auto& cfg = a.trace.configs[static_cast<size_t>(t)];
    for (int r = 0; r < a.n; ++r) {
      if (is_sender[static_cast<size_t>(r)]) continue;
      if (geom::dist(cfg[static_cast<size_t>(r)], t0[static_cast<size_t>(r)]) > geom::kEps)
        return {v.property, false, t,
                "robot " + std::to_string(r) + " moved with an empty outbox"};
    }
  }
  return v;
}

// When a robot holding one direction since its last turn has seen a peer
// change twice, the peer must have observed the robot since that turn. The
// observation is checked against the robot's position AT the turn: the peer's
// stored last-seen position may alias with pre-turn positions when a return
// walk retraces an excursion (the out-and-back ambiguity the model permits),
// but a sighting displaced from the turn point along the held direction is
// guaranteed, and it is what lets the peer recover the line and direction of
// motion. For a walk held since t=0 this is exactly the two-changes
// acknowledgment lemma.
Verdict check_lemma1(const Analysis& a) {
  Verdict v{"lemma1", true, -1, ""};
  std::vector<std::vector<long>> activations(static_cast<size_t>(a.n));
  for (long t = 0; t < a.horizon; ++t)
    for (int r : a.trace.active_sets[static_cast<size_t>(t)])
      activations[static_cast<size_t>(r)].push_back(t);

  // One witness-scan state per (walker x, observer y): each observer
  // activation is visited at most once per window.
  struct Scan {
    long window = -2;
    size_t next = 0;
    bool found = false;
  };
  std::vector<std::vector<Scan>> scans(static_cast<size_t>(a.n),
                                       std::vector<Scan>(static_cast<size_t>(a.n)));

  for (int x = 0; x < a.n && v.pass; ++x) {
    long window_start = -1;
    bool has_dir = false;
    Vec2 dir;
    for (long t : activations[static_cast<size_t>(x)]) {
      if (!v.pass) break;
      if (window_start >= 0) {
        const Vec2 turn_pos =
            a.trace.configs[static_cast<size_t>(window_start)][static_cast<size_t>(x)];
        for (int y = 0; y < a.n; ++y) {
          if (y == x) continue;
          if (count_in(a.change_events[static_cast<size_t>(x)][static_cast<size_t>(y)],
                       window_start, t) < 2)
            continue;
          Scan& scan = scans[static_cast<size_t>(x)][static_cast<size_t>(y)];
          const auto& obs = activations[static_cast<size_t>(y)];
          if (scan.window != window_start) {
            scan.window = window_start;
            scan.found = false;
            scan.next = static_cast<size_t>(
                std::upper_bound(obs.begin(), obs.end(), window_start) - obs.begin());
          }
          while (!scan.found && scan.next < obs.size() && obs[scan.next] <= t) {
            const Vec2 seen =
                a.trace.configs[static_cast<size_t>(obs[scan.next])][static_cast<size_t>(x)];
            if (geom::dist(seen, turn_pos) > geom::kEps) scan.found = true;
            ++scan.next;
          }
          if (!scan.found) {
            v = {v.property, false, t,
                 "robot " + std::to_string(x) + " saw robot " + std::to_string(y) +
                     " change twice since its direction change at t=" +
                     std::to_string(window_start) + " but robot " + std::to_string(y) +
                     " never observed it displaced along the new direction"};
            break;
          }
        }
      }
      const Vec2 d = a.trace.configs[static_cast<size_t>(t + 1)][static_cast<size_t>(x)] -
                     a.trace.configs[static_cast<size_t>(t)][static_cast<size_t>(x)];
      if (d.norm() <= geom::kEps) {
        window_start = -1;  // a non-move breaks the fixed-direction hypothesis
        has_dir = false;
      } else {
        const Vec2 u = d.normalized();
        if (!has_dir || geom::dot(u, dir) < 1.0 - kSameDirSlack) window_start = t;
        dir = u;
        has_dir = true;
      }
    }
  }
  return v;
}

Verdict check_lemma3(const Analysis& a) {
  Verdict v{"lemma3_window", true, -1, ""};
  const long bound = kLemma3WindowFactor * a.ctx.schedule.window;
  for (int x = 0; x < a.n; ++x)
    for (int y = 0; y < a.n; ++y) {
      if (x == y) continue;
      long prev = 0;
      for (long t : a.change_events[static_cast<size_t>(x)][static_cast<size_t>(y)]) {
        if (t - prev > bound)
          return {v.property, false, t,
                  "robot " + std::to_string(x) + " saw no change of robot " + std::to_string(y) +
                      " for " + std::to_string(t - prev) + " instants (bound " +
                      std::to_string(bound) + ")"};
        prev = t;
      }
      if (a.horizon - prev > bound)
        return {v.property, false, a.horizon,
                "robot " + std::to_string(x) + " saw no change of robot " + std::to_string(y) +
                    " in the last " + std::to_string(a.horizon - prev) + " instants"};
    }
  return v;
}

Verdict check_decay(const Analysis& a) {
  Verdict v{"decay_bound", true, -1, ""};
  for (int r = 0; r < a.n; ++r) {
    const double mu = std::min(a.ctx.robots[static_cast<size_t>(r)].sigma,
                               a.granular_radius_of[static_cast<size_t>(r)] / 4.0);
    for (const PhaseSegment& seg : a.segments[static_cast<size_t>(r)]) {
      if (seg.phase == "init") continue;
      double total = 0.0;
      for (long i = std::max<long>(seg.first, 1); i <= seg.last; ++i)
        total += geom::dist(a.trace.configs[static_cast<size_t>(i)][static_cast<size_t>(r)],
                            a.trace.configs[static_cast<size_t>(i - 1)][static_cast<size_t>(r)]);
      if (total >= 2.0 * mu + geom::kEps)
        return {v.property, false, seg.first,
                "robot " + std::to_string(r) + " covered " + fmt(total) + " in phase '" +
                    seg.phase + "', bound " + fmt(2.0 * mu)};
    }
  }
  return v;
}

Verdict check_emission(const Analysis& a) {
  Verdict v{"emission", true, -1, ""};
  for (int s = 0; s < a.n; ++s) {
    const auto& exp = a.expected[static_cast<size_t>(s)];
    const auto& sent = a.sends[static_cast<size_t>(s)];
    long prev_step = -1;
    for (size_t k = 0; k < exp.size(); ++k) {
      const SendSegment* seg = nullptr;
      for (const auto& cand : sent)
        if (cand.seq == static_cast<long>(k)) seg = &cand;
      if (!seg)
        return {v.property, false, a.horizon,
                "bit " + std::to_string(k) + " of robot " + std::to_string(s) +
                    " was never encoded"};
      if (seg->label != exp[k].recipient_label || seg->bit != exp[k].bit)
        return {v.property, false, seg->encode_step,
                "bit " + std::to_string(k) + " of robot " + std::to_string(s) +
                    " encoded with wrong label/value"};
      if (seg->encode_step < exp[k].enqueue || seg->encode_step <= prev_step)
        return {v.property, false, seg->encode_step,
                "bit " + std::to_string(k) + " of robot " + std::to_string(s) +
                    " encoded out of order"};
      prev_step = seg->encode_step;
    }
  }
  return v;
}

std::vector<proto::DecodedBit> stream_from(const Analysis& a, int observer, int sender) {
  std::vector<proto::DecodedBit> out;
  for (const auto& b : a.decoded[static_cast<size_t>(observer)])
    if (b.sender == sender) out.push_back(b);
  return out;
}

Verdict check_receipt(const Analysis& a) {
  Verdict v{"receipt", true, -1, ""};
  for (int o = 0; o < a.n; ++o)
    for (int s = 0; s < a.n; ++s) {
      if (s == o) continue;
      const auto& exp = a.expected[static_cast<size_t>(s)];
      const auto got = stream_from(a, o, s);
      if (got.size() != exp.size())
        return {v.property, false, got.empty() ? a.horizon : got.back().instant,
                "observer " + std::to_string(o) + " decoded " + std::to_string(got.size()) +
                    " bits from robot " + std::to_string(s) + ", expected " +
                    std::to_string(exp.size())};
      for (size_t k = 0; k < exp.size(); ++k)
        if (got[k].recipient_label != exp[k].recipient_label || got[k].bit != exp[k].bit)
          return {v.property, false, got[k].instant,
                  "observer " + std::to_string(o) + " decoded bit " + std::to_string(k) +
                      " of robot " + std::to_string(s) + " as (label " +
                      std::to_string(got[k].recipient_label) + ", bit " +
                      std::to_string(got[k].bit) + ")"};
    }
  return v;
}

Verdict check_fifo(const Analysis& a) {
  Verdict v{"fifo_order", true, -1, ""};
  for (int s = 0; s < a.n; ++s) {
    const auto& exp = a.expected[static_cast<size_t>(s)];
    for (int o = 0; o < a.n; ++o) {
      if (o == s) continue;
      const auto got = stream_from(a, o, s);
      // Compare the per-recipient-label subsequences.
      for (int label = 0; label < a.n; ++label) {
        std::vector<int> want, have;
        for (const auto& e : exp)
          if (e.recipient_label == label) want.push_back(e.bit);
        for (const auto& g : got)
          if (g.recipient_label == label) have.push_back(g.bit);
        const size_t len = std::min(want.size(), have.size());
        for (size_t k = 0; k < len; ++k)
          if (want[k] != have[k])
            return {v.property, false, -1,
                    "robot " + std::to_string(s) + " -> label " + std::to_string(label) +
                        " decoded out of FIFO order by observer " + std::to_string(o)};
      }
    }
  }
  return v;
}

Verdict check_redundancy(const Analysis& a) {
  Verdict v{"redundancy", true, -1, ""};
  for (int s = 0; s < a.n; ++s) {
    std::optional<std::vector<std::pair<int, int>>> reference;
    int ref_observer = -1;
    for (int o = 0; o < a.n; ++o) {
      if (o == s) continue;
      std::vector<std::pair<int, int>> seq;
      for (const auto& b : stream_from(a, o, s)) seq.emplace_back(b.recipient_label, b.bit);
      if (!reference) {
        reference = seq;
        ref_observer = o;
      } else if (seq != *reference) {
        return {v.property, false, -1,
                "observers " + std::to_string(ref_observer) + " and " + std::to_string(o) +
                    " reconstruct different logs for robot " + std::to_string(s)};
      }
    }
  }
  return v;
}

Verdict check_receipt_progress(const Analysis& a) {
  Verdict v{"receipt_progress", true, -1, ""};
  for (int s = 0; s < a.n; ++s) {
    // A bit is due once the sender completed its separation: its resync
    // segment ended, or the next bit's excursion already started.
    long due = 0;
    std::vector<long> f;
    for (const PhaseSegment& seg : a.segments[static_cast<size_t>(s)]) {
      if (parse_tagged(seg.phase, "resync", f) && f.size() == 1 && seg.last < a.horizon)
        due = std::max(due, f[0] + 1);
    }
    for (const SendSegment& seg : a.sends[static_cast<size_t>(s)])
      due = std::max(due, seg.seq);
    const auto& exp = a.expected[static_cast<size_t>(s)];
    due = std::min(due, static_cast<long>(exp.size()));
    if (due == 0) continue;
    for (int o = 0; o < a.n; ++o) {
      if (o == s) continue;
      const auto got = stream_from(a, o, s);
      if (static_cast<long>(got.size()) < due)
        return {v.property, false, a.horizon,
                "observer " + std::to_string(o) + " decoded " + std::to_string(got.size()) +
                    " bits from robot " + std::to_string(s) + " but " + std::to_string(due) +
                    " are due"};
      for (long k = 0; k < due; ++k)
        if (got[static_cast<size_t>(k)].recipient_label !=
                exp[static_cast<size_t>(k)].recipient_label ||
            got[static_cast<size_t>(k)].bit != exp[static_cast<size_t>(k)].bit)
          return {v.property, false, got[static_cast<size_t>(k)].instant,
                  "observer " + std::to_string(o) + " mis-decoded due bit " + std::to_string(k) +
                      " of robot " + std::to_string(s)};
    }
  }
  return v;
}

Verdict check_decode_faults(const Analysis& a) {
  Verdict v{"decode_faults", true, -1, ""};
  for (int o = 0; o < a.n; ++o)
    if (a.decode_faults[static_cast<size_t>(o)] > 0)
      return {v.property, false, -1,
              "observer " + std::to_string(o) + " recorded " +
                  std::to_string(a.decode_faults[static_cast<size_t>(o)]) + " decode faults"};
  return v;
}

// A compact slice of the instants leading into a violation, appended to the
// evidence of failing verdicts.
std::string trace_slice(const model::Trace& trace, long t) {
  std::ostringstream os;
  const long hi = std::min<long>(trace.horizon(), std::max<long>(t, 0));
  const long lo = std::max<long>(0, hi - 3);
  for (long i = lo; i <= hi; ++i) {
    os << (i == lo ? "trace " : " | ") << "t=" << i << ":";
    for (const auto& p : trace.configs[static_cast<size_t>(i)])
      os << " (" << p.x << "," << p.y << ")";
  }
  return os.str();
}

std::vector<Verdict> run_monitors(const Analysis& a, const MonitorOptions& options) {
  std::vector<Verdict> out;
  out.push_back(check_schedule(a));
  out.push_back(check_collisions(a));
  out.push_back(check_sigma(a));
  if (!a.granular_radius_of.empty()) {
    out.push_back(check_disjoint(a));
    out.push_back(check_containment(a));
  }
  out.push_back(check_lemma1(a));
  out.push_back(check_decode_faults(a));
  if (a.synchronous) {
    if (options.include_liveness) out.push_back(check_silence(a));
  } else {
    out.push_back(check_remark6(a));
    out.push_back(check_receipt_progress(a));
    if (a.ctx.protocol == ProtocolKind::AsyncN) out.push_back(check_decay(a));
    if (options.include_liveness &&
        a.ctx.schedule.kind == model::ActivationSchedule::Kind::RandomFair)
      out.push_back(check_lemma3(a));
  }
  if (options.include_liveness) {
    out.push_back(check_emission(a));
    out.push_back(check_receipt(a));
    out.push_back(check_fifo(a));
    out.push_back(check_redundancy(a));
  }
  for (Verdict& v : out)
    if (!v.pass) v.evidence += " ; " + trace_slice(a.trace, v.first_violation);
  return out;
}

}  // namespace

bool MonitorReport::all_pass() const {
  for (const Verdict& v : verdicts)
    if (!v.pass) return false;
  return true;
}

const Verdict* MonitorReport::find(const std::string& property) const {
  for (const Verdict& v : verdicts)
    if (v.property == property) return &v;
  return nullptr;
}

void validate(const RunContext& ctx) {
  const int n = ctx.robot_count();
  if (n < 2) throw ValidationError("at least 2 robots are required");
  if (ctx.horizon < 0) throw ValidationError("horizon must be nonnegative");
  const bool two_robot =
      ctx.protocol == ProtocolKind::Sync2 || ctx.protocol == ProtocolKind::Async2;
  if (two_robot && n != 2)
    throw ValidationError(proto::protocol_name(ctx.protocol) + " requires exactly 2 robots");
  if (proto::is_synchronous(ctx.protocol) &&
      ctx.schedule.kind != model::ActivationSchedule::Kind::Synchronous)
    throw ValidationError(proto::protocol_name(ctx.protocol) +
                          " requires the synchronous schedule");
  if (ctx.schedule.kind == model::ActivationSchedule::Kind::RandomFair &&
      ctx.schedule.window < 1)
    throw ValidationError("fairness window must be >= 1");

  double min_dist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const RobotSetup& r = ctx.robots[static_cast<size_t>(i)];
    if (!r.position.finite())
      throw ValidationError("robot " + std::to_string(i) + " has a non-finite position");
    if (!(r.sigma > 0.0) || !std::isfinite(r.sigma))
      throw ValidationError("robot " + std::to_string(i) + " needs a positive sigma");
    if (!(r.frame_scale > 0.0))
      throw ValidationError("robot " + std::to_string(i) + " needs a positive frame scale");
    for (int j = i + 1; j < n; ++j) {
      const double d = geom::dist(r.position, ctx.robots[static_cast<size_t>(j)].position);
      min_dist = std::min(min_dist, d);
      if (d <= geom::kEps)
        throw ValidationError("robots " + std::to_string(i) + " and " + std::to_string(j) +
                              " share the same position");
    }
  }
  // Keep every protocol step comfortably above the observation tolerance.
  const double floor = proto::is_synchronous(ctx.protocol) ? 1e-6 : 1e-3;
  if (min_dist < floor)
    throw ValidationError("robots closer than " + fmt(floor) +
                          " make movement signals unreadable at the fixed tolerances");

  if (ctx.protocol == ProtocolKind::SyncNId) {
    std::vector<int> seen;
    for (int i = 0; i < n; ++i) {
      const auto& id = ctx.robots[static_cast<size_t>(i)].visible_id;
      if (!id) throw ValidationError("identified protocol: robot " + std::to_string(i) +
                                     " has no visible id");
      if (std::find(seen.begin(), seen.end(), *id) != seen.end())
        throw ValidationError("identified protocol: duplicate visible id " + std::to_string(*id));
      seen.push_back(*id);
    }
  }
  if (ctx.protocol == ProtocolKind::SyncNId || ctx.protocol == ProtocolKind::SyncNSoD) {
    for (int i = 0; i < n; ++i)
      if (ctx.robots[static_cast<size_t>(i)].frame_rotation != 0.0)
        throw ValidationError("sense-of-direction protocol: robot " + std::to_string(i) +
                              " has a rotated frame");
  }
  if (ctx.protocol == ProtocolKind::SyncNChirality || ctx.protocol == ProtocolKind::AsyncN) {
    const geom::Circle sec = geom::smallest_enclosing_circle(positions_of(ctx));
    for (int i = 0; i < n; ++i)
      if (geom::dist(ctx.robots[static_cast<size_t>(i)].position, sec.center) < 1e-6)
        throw ValidationError("robot " + std::to_string(i) +
                              " sits at the SEC center and has no horizon ray");
  }
  for (const ScriptMessage& m : ctx.script) {
    if (m.sender < 0 || m.sender >= n || m.recipient < 0 || m.recipient >= n)
      throw ValidationError("message names an unknown robot");
    if (m.sender == m.recipient)
      throw ValidationError("robot " + std::to_string(m.sender) +
                            " cannot address itself (no diameter addresses the sender)");
    if (m.bits.empty()) throw ValidationError("message with an empty bit list");
    for (int b : m.bits)
      if (b != 0 && b != 1) throw ValidationError("message bits must be 0 or 1");
    if (m.enqueue < 0) throw ValidationError("message enqueue instant must be nonnegative");
  }
}

void resolve_frames(RunContext& ctx, std::uint64_t frame_seed) {
  std::mt19937_64 rng(frame_seed);
  auto u01 = [&rng]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const bool shared_y =
      ctx.protocol == ProtocolKind::SyncNId || ctx.protocol == ProtocolKind::SyncNSoD;
  for (RobotSetup& r : ctx.robots) {
    const double rotation = u01() * 2.0 * geom::kPi;
    const double scale = 0.5 + 1.5 * u01();
    r.frame_rotation = shared_y ? 0.0 : rotation;
    r.frame_scale = scale;
  }
}

int recipient_label(const RunContext& ctx, int sender, int recipient) {
  const int n = ctx.robot_count();
  if (sender < 0 || sender >= n || recipient < 0 || recipient >= n || sender == recipient)
    throw ValidationError("invalid sender/recipient pair");
  if (ctx.protocol == ProtocolKind::Sync2 || ctx.protocol == ProtocolKind::Async2) return 0;
  const NamingMode mode = mode_of(ctx.protocol);
  const std::vector<int> ids = ids_of(ctx);
  const bool async = ctx.protocol == ProtocolKind::AsyncN;
  const proto::SenderGeometry g = proto::sender_geometry(
      positions_of(ctx), sender, mode, async ? n + 1 : n,
      async || ctx.protocol == ProtocolKind::SyncNChirality ? proto::ZeroDirPolicy::HorizonRay
                                                            : proto::ZeroDirPolicy::SharedNorth,
      mode == NamingMode::Identified ? &ids : nullptr);
  return g.naming.label_of(recipient);
}

MonitorReport monitor_suite(const model::Trace& trace, const RunContext& ctx,
                            const MonitorOptions& options) {
  const Analysis a = analyze(trace, ctx);
  return MonitorReport{run_monitors(a, options)};
}

namespace {

// Validate, build the automata, translate the script, and drive the engine.
model::Trace run_trace(const RunContext& ctx) {
  validate(ctx);
  const int n = ctx.robot_count();
  std::vector<model::RobotSpec> specs = build_specs(ctx);
  const std::vector<int> ids = ids_of(ctx);
  const NamingMode mode = mode_of(ctx.protocol);

  std::vector<std::unique_ptr<model::Robot>> automata;
  std::vector<proto::CommRobot*> comm(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double sigma_local =
        ctx.robots[static_cast<size_t>(i)].sigma / specs[static_cast<size_t>(i)].frame.unit_scale;
    std::unique_ptr<proto::CommRobot> robot;
    switch (ctx.protocol) {
      case ProtocolKind::Sync2: robot = std::make_unique<proto::Sync2Robot>(sigma_local); break;
      case ProtocolKind::SyncNId:
      case ProtocolKind::SyncNSoD:
      case ProtocolKind::SyncNChirality:
        robot = std::make_unique<proto::SyncNRobot>(mode, sigma_local);
        break;
      case ProtocolKind::Async2:
        robot = std::make_unique<proto::Async2Robot>(sigma_local, ctx.mutant_skip_resync);
        break;
      case ProtocolKind::AsyncN: {
        std::vector<Vec2> t0_local;
        for (const RobotSetup& r : ctx.robots)
          t0_local.push_back(specs[static_cast<size_t>(i)].frame.to_local(r.position));
        robot = std::make_unique<proto::AsyncNRobot>(
            sigma_local, t0_local, i, mode,
            mode == NamingMode::Identified ? &ids : nullptr);
        break;
      }
    }
    comm[static_cast<size_t>(i)] = robot.get();
    automata.push_back(std::move(robot));
  }

  // Translate the script to (sender label, bits) and group by enqueue instant.
  std::vector<std::vector<std::pair<int, const ScriptMessage*>>> by_instant(
      static_cast<size_t>(ctx.horizon) + 1);
  for (const ScriptMessage& m : ctx.script) {
    const int label = recipient_label(ctx, m.sender, m.recipient);
    if (m.enqueue <= ctx.horizon)
      by_instant[static_cast<size_t>(m.enqueue)].emplace_back(label, &m);
  }
  auto before_step = [&](long t) {
    for (const auto& [label, msg] : by_instant[static_cast<size_t>(t)])
      comm[static_cast<size_t>(msg->sender)]->enqueue(label, msg->bits);
  };

  const auto schedule =
      model::generate_schedule(ctx.schedule, n, static_cast<int>(ctx.horizon));
  model::Configuration initial{positions_of(ctx), 0};
  return model::run(initial, specs, automata, schedule, before_step);
}

}  // namespace

RunOutput run_protocol(const RunContext& ctx) {
  const int n = ctx.robot_count();
  RunOutput out;
  out.trace = run_trace(ctx);

  const Analysis a = analyze(out.trace, ctx);
  out.report = MonitorReport{run_monitors(a, MonitorOptions{})};

  // Message records: encode instants from the sender's phase timeline,
  // decode instants from each observer's replay.
  for (int s = 0; s < n; ++s) {
    const auto& exp = a.expected[static_cast<size_t>(s)];
    std::vector<std::vector<proto::DecodedBit>> streams(static_cast<size_t>(n));
    for (int o = 0; o < n; ++o)
      if (o != s) streams[static_cast<size_t>(o)] = stream_from(a, o, s);
    for (size_t k = 0; k < exp.size(); ++k) {
      BitRecord rec;
      rec.sender = s;
      rec.recipient = exp[k].recipient;
      rec.recipient_label = exp[k].recipient_label;
      rec.bit = exp[k].bit;
      rec.seq = static_cast<long>(k);
      rec.enqueue = exp[k].enqueue;
      for (const auto& seg : a.sends[static_cast<size_t>(s)])
        if (seg.seq == static_cast<long>(k)) rec.encode = seg.encode_step;
      for (int o = 0; o < n; ++o) {
        if (o == s) continue;
        const auto& st = streams[static_cast<size_t>(o)];
        if (k < st.size() && st[k].recipient_label == exp[k].recipient_label &&
            st[k].bit == exp[k].bit)
          rec.decode_instants[o] = st[k].instant;
      }
      if (rec.decode_instants.count(rec.recipient)) ++out.summary.bits_delivered;
      ++out.summary.bits_expected;
      out.records.push_back(std::move(rec));
    }
  }
  out.summary.instants = a.horizon;
  for (long f : a.decode_faults) out.summary.decode_faults += f;
  out.summary.distance_traveled.assign(static_cast<size_t>(n), 0.0);
  for (long t = 0; t < a.horizon; ++t)
    for (int r = 0; r < n; ++r)
      out.summary.distance_traveled[static_cast<size_t>(r)] +=
          geom::dist(out.trace.configs[static_cast<size_t>(t)][static_cast<size_t>(r)],
                     out.trace.configs[static_cast<size_t>(t + 1)][static_cast<size_t>(r)]);
  return out;
}

ExploreOutcome explore_schedules(const RunContext& base, long budget, int threads) {
  const int n = base.robot_count();
  if (n > 3) throw ValidationError("schedule exploration supports at most 3 robots");
  if (base.horizon < 1) throw ValidationError("schedule exploration needs horizon >= 1");
  const long subsets = (1L << n) - 1;
  ExploreOutcome outcome;
  outcome.total = 1;
  for (long t = 0; t < base.horizon; ++t) {
    if (outcome.total > LLONG_MAX / subsets) {
      outcome.total = LLONG_MAX;
      break;
    }
    outcome.total *= subsets;
  }
  const long to_run = std::min(outcome.total, budget);
  outcome.exhaustive = to_run == outcome.total;
  outcome.enumerated = to_run;

  auto schedule_for = [&](long index) {
    std::vector<std::vector<int>> sets(static_cast<size_t>(base.horizon));
    long rem = index;
    for (long t = 0; t < base.horizon; ++t) {
      const long mask = rem % subsets + 1;
      rem /= subsets;
      for (int r = 0; r < n; ++r)
        if (mask & (1L << r)) sets[static_cast<size_t>(t)].push_back(r);
    }
    return sets;
  };

  auto run_one = [&](long index) {
    RunContext ctx = base;
    ctx.schedule = model::ActivationSchedule::explicit_sets(schedule_for(index));
    const model::Trace trace = run_trace(ctx);
    MonitorOptions opts;
    opts.include_liveness = false;
    return monitor_suite(trace, ctx, opts);
  };

  std::atomic<long> next_chunk{0};
  std::atomic<long> first_fail{LLONG_MAX};
  const long chunk_size = 1024;
  const long chunks = (to_run + chunk_size - 1) / chunk_size;
  int nthreads = threads > 0 ? threads
                             : static_cast<int>(std::min<unsigned>(
                                   std::max(1u, std::thread::hardware_concurrency()), 8u));
  nthreads = static_cast<int>(std::min<long>(nthreads, std::max<long>(chunks, 1)));

  auto worker = [&]() {
    for (;;) {
      const long c = next_chunk.fetch_add(1);
      if (c >= chunks) return;
      const long lo = c * chunk_size;
      if (lo > first_fail.load()) return;
      const long hi = std::min(lo + chunk_size, to_run);
      for (long i = lo; i < hi; ++i) {
        if (i > first_fail.load()) break;
        const MonitorReport report = run_one(i);
        if (!report.all_pass()) {
          long expected = first_fail.load();
          while (i < expected && !first_fail.compare_exchange_weak(expected, i)) {
          }
          break;
        }
      }
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  if (first_fail.load() != LLONG_MAX) {
    outcome.first_failing_schedule = first_fail.load();
    outcome.failing_active_sets = schedule_for(outcome.first_failing_schedule);
    const MonitorReport report = run_one(outcome.first_failing_schedule);
    for (const Verdict& v : report.verdicts)
      if (!v.pass) outcome.failing_verdicts.push_back(v);
  }
  return outcome;
}

}  // namespace waggle::harness
