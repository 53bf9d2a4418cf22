#include "waggle/trace_io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace waggle::cli {

using harness::ValidationError;
using json = nlohmann::ordered_json;

namespace {

void append_g12(std::string& s, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  s += buf;
}

void append_points(std::string& s, const std::vector<geom::Vec2>& points) {
  s += '[';
  for (size_t i = 0; i < points.size(); ++i) {
    if (i) s += ',';
    s += '[';
    append_g12(s, points[i].x);
    s += ',';
    append_g12(s, points[i].y);
    s += ']';
  }
  s += ']';
}

}  // namespace

void write_trace(std::ostream& os, const Scenario& resolved, const model::Trace& trace) {
  json header;
  header["format_version"] = 1;
  header["kind"] = "waggle-trace";
  header["scenario"] = json::parse(scenario_to_json_text(resolved, /*pin_frames=*/true));
  os << header.dump() << '\n';
  const long horizon = trace.horizon();
  for (long t = 0; t <= horizon; ++t) {
    std::string line = "{\"t\":" + std::to_string(t);
    if (t < horizon) {
      line += ",\"active\":[";
      const auto& act = trace.active_sets[static_cast<size_t>(t)];
      for (size_t k = 0; k < act.size(); ++k) {
        if (k) line += ',';
        line += std::to_string(act[k]);
      }
      line += ']';
    }
    line += ",\"pos\":";
    append_points(line, trace.configs[static_cast<size_t>(t)]);
    line += ",\"phase\":[";
    const auto& phases = trace.phases[static_cast<size_t>(t)];
    for (size_t r = 0; r < phases.size(); ++r) {
      if (r) line += ',';
      line += '"';
      line += phases[r];
      line += '"';
    }
    line += ']';
    if (t < horizon) {
      line += ",\"dest\":";
      append_points(line, trace.destinations[static_cast<size_t>(t)]);
    }
    line += '}';
    os << line << '\n';
  }
}

TraceFile read_trace(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("trace: empty file");
  json header;
  try {
    header = json::parse(line);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("trace: bad header: ") + e.what());
  }
  if (header.value("kind", "") != "waggle-trace")
    throw ValidationError("trace: not a waggle trace file");
  TraceFile out;
  out.scenario = scenario_from_json_text(header.at("scenario").dump());
  if (!out.scenario.frames_pinned)
    throw ValidationError("trace: header scenario does not pin the frames");
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    json rec = json::parse(line);
    std::vector<geom::Vec2> pos;
    for (const json& p : rec.at("pos")) pos.push_back({p[0].get<double>(), p[1].get<double>()});
    out.trace.configs.push_back(std::move(pos));
    out.trace.phases.push_back(rec.at("phase").get<std::vector<std::string>>());
    if (rec.contains("active")) {
      out.trace.active_sets.push_back(rec["active"].get<std::vector<int>>());
      std::vector<geom::Vec2> dest;
      for (const json& p : rec.at("dest")) dest.push_back({p[0].get<double>(), p[1].get<double>()});
      out.trace.destinations.push_back(std::move(dest));
    }
  }
  if (out.trace.configs.size() != out.trace.active_sets.size() + 1)
    throw ValidationError("trace: truncated file");
  return out;
}

TraceFile load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open trace file '" + path + "'");
  return read_trace(in);
}

void write_verdicts(std::ostream& os, const harness::MonitorReport& report) {
  json j;
  j["all_pass"] = report.all_pass();
  json list = json::array();
  for (const harness::Verdict& v : report.verdicts) {
    json vj;
    vj["property"] = v.property;
    vj["pass"] = v.pass;
    if (!v.pass) {
      vj["first_violation"] = v.first_violation;
      vj["evidence"] = v.evidence;
    }
    list.push_back(vj);
  }
  j["verdicts"] = list;
  os << j.dump(2) << '\n';
}

void write_summary(std::ostream& os, const harness::Summary& summary, bool all_pass) {
  json j;
  j["all_pass"] = all_pass;
  j["instants"] = summary.instants;
  j["bits_expected"] = summary.bits_expected;
  j["bits_delivered"] = summary.bits_delivered;
  j["decode_faults"] = summary.decode_faults;
  json dist = json::array();
  for (double d : summary.distance_traveled) {
    std::string s;
    append_g12(s, d);
    dist.push_back(json::parse(s));
  }
  j["distance_traveled"] = dist;
  os << j.dump(2) << '\n';
}

void write_explore(std::ostream& os, const harness::ExploreOutcome& outcome) {
  json j;
  j["enumerated"] = outcome.enumerated;
  j["total"] = outcome.total;
  j["exhaustive"] = outcome.exhaustive;
  j["found_failure"] = outcome.first_failing_schedule >= 0;
  if (outcome.first_failing_schedule >= 0) {
    j["first_failing_schedule"] = outcome.first_failing_schedule;
    j["failing_active_sets"] = outcome.failing_active_sets;
    json verdicts = json::array();
    for (const harness::Verdict& v : outcome.failing_verdicts) {
      json vj;
      vj["property"] = v.property;
      vj["first_violation"] = v.first_violation;
      vj["evidence"] = v.evidence;
      verdicts.push_back(vj);
    }
    j["failing_verdicts"] = verdicts;
  }
  os << j.dump(2) << '\n';
}

int run_scenario_cli(const CliOptions& options, std::ostream& out, std::ostream& err) {
  try {
    Scenario scenario = load_scenario(options.scenario_path);
    finalize(scenario, options.seed, options.horizon);
    std::filesystem::create_directories(options.out_dir);
    const auto path = [&](const char* name) {
      return (std::filesystem::path(options.out_dir) / name).string();
    };

    if (options.explore) {
      const harness::ExploreOutcome outcome =
          harness::explore_schedules(scenario.ctx, options.explore_budget);
      std::ofstream ef(path("explore.json"));
      write_explore(ef, outcome);
      if (!options.quiet) {
        out << "explored " << outcome.enumerated << " of " << outcome.total << " schedules"
            << (outcome.exhaustive ? "" : " (budget pruned)") << "\n";
        if (outcome.first_failing_schedule >= 0) {
          out << "[FAIL] schedule " << outcome.first_failing_schedule << ":";
          for (const harness::Verdict& v : outcome.failing_verdicts)
            out << ' ' << v.property;
          out << "\n";
        } else {
          out << "[PASS] all explored schedules satisfy the monitors\n";
        }
      }
      return outcome.first_failing_schedule >= 0 ? 1 : 0;
    }

    const harness::RunOutput result = harness::run_protocol(scenario.ctx);
    {
      std::ofstream tf(path("trace.jsonl"));
      write_trace(tf, scenario, result.trace);
      std::ofstream vf(path("verdicts.json"));
      write_verdicts(vf, result.report);
      std::ofstream sf(path("summary.json"));
      write_summary(sf, result.summary, result.report.all_pass());
    }
    if (!options.quiet) {
      for (const harness::Verdict& v : result.report.verdicts) {
        out << (v.pass ? "[PASS] " : "[FAIL] ") << v.property;
        if (!v.pass) out << " at t=" << v.first_violation << ": " << v.evidence;
        out << "\n";
      }
      out << "bits: " << result.summary.bits_delivered << "/" << result.summary.bits_expected
          << " delivered over " << result.summary.instants << " instants\n";
    }
    return result.report.all_pass() ? 0 : 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace waggle::cli
