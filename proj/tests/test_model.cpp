#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "waggle/model.hpp"

using namespace waggle;
using geom::Vec2;

namespace {

// Moves a fixed offset (local units) every activation.
class Drifter : public model::Robot {
 public:
  explicit Drifter(Vec2 step) : step_(step) {}
  Vec2 decide(const model::View& view) override {
    return view.positions[static_cast<size_t>(view.self)] + step_;
  }

 private:
  Vec2 step_;
};

class Stayer : public model::Robot {
 public:
  Vec2 decide(const model::View& view) override {
    return view.positions[static_cast<size_t>(view.self)];
  }
};

class NanRobot : public model::Robot {
 public:
  Vec2 decide(const model::View&) override {
    return {std::numeric_limits<double>::quiet_NaN(), 0.0};
  }
};

}  // namespace

TEST_CASE("observe maps into the local frame") {
  model::Configuration cfg{{{3, 4}}, 0};
  const model::LocalFrame identity;
  CHECK(model::observe(cfg, identity, 0).positions[0].x == doctest::Approx(3.0));
  CHECK(model::observe(cfg, identity, 0).positions[0].y == doctest::Approx(4.0));

  model::LocalFrame f = model::LocalFrame::make({1, 1}, 0.0, 2.0);
  model::Configuration cfg2{{{3, 5}}, 0};
  const auto v = model::observe(cfg2, f, 0);
  CHECK(v.positions[0].x == doctest::Approx(1.0));
  CHECK(v.positions[0].y == doctest::Approx(2.0));
}

TEST_CASE("frames share handedness and invert exactly") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    const model::LocalFrame f =
        model::LocalFrame::make({u(rng) * 10, -u(rng) * 10}, u(rng) * 2 * geom::kPi,
                                0.5 + 1.5 * u(rng));
    // y axis is the counterclockwise quarter turn of x: cross(x, y) = +1.
    CHECK(geom::cross(f.x_axis, f.y_axis) == doctest::Approx(1.0));
    const Vec2 q{u(rng) * 100 - 50, u(rng) * 100 - 50};
    const Vec2 rt = f.to_global(f.to_local(q));
    CHECK(geom::dist(rt, q) <= 1e-9);
  }
}

TEST_CASE("step leaves inactive robots and clamps at sigma") {
  std::vector<model::RobotSpec> specs(2);
  specs[0].id = 0;
  specs[0].sigma = 1.0;
  specs[0].frame = model::LocalFrame::make({0, 0}, 0.0, 1.0);
  specs[1].id = 1;
  specs[1].sigma = 5.0;
  specs[1].frame = model::LocalFrame::make({10, 0}, 0.0, 1.0);
  std::vector<std::unique_ptr<model::Robot>> automata;
  automata.push_back(std::make_unique<Drifter>(Vec2{3, 0}));  // wants 3, clamped to 1
  automata.push_back(std::make_unique<Drifter>(Vec2{0, 2}));

  model::Configuration cfg{{{0, 0}, {10, 0}}, 0};
  const auto next = model::step(cfg, {0}, specs, automata);
  CHECK(next.positions[0].x == doctest::Approx(1.0));  // sigma clamp, exact direction
  CHECK(next.positions[0].y == doctest::Approx(0.0));
  CHECK(next.positions[1].x == doctest::Approx(10.0));  // inactive: unchanged
  CHECK(next.positions[1].y == doctest::Approx(0.0));
  CHECK(next.time == 1);
}

TEST_CASE("step with stationary protocols is a fixed point") {
  std::vector<model::RobotSpec> specs(2);
  specs[0].frame = model::LocalFrame::make({0, 0}, 1.0, 2.0);
  specs[1].frame = model::LocalFrame::make({4, 4}, 2.0, 0.5);
  std::vector<std::unique_ptr<model::Robot>> automata;
  automata.push_back(std::make_unique<Stayer>());
  automata.push_back(std::make_unique<Stayer>());
  model::Configuration cfg{{{0, 0}, {4, 4}}, 0};
  const auto next = model::step(cfg, {0, 1}, specs, automata);
  CHECK(geom::dist(next.positions[0], cfg.positions[0]) <= 1e-12);
  CHECK(geom::dist(next.positions[1], cfg.positions[1]) <= 1e-12);
}

TEST_CASE("non-finite destinations are an engine fault") {
  std::vector<model::RobotSpec> specs(1);
  std::vector<std::unique_ptr<model::Robot>> automata;
  automata.push_back(std::make_unique<NanRobot>());
  model::Configuration cfg{{{0, 0}}, 0};
  CHECK_THROWS_AS(model::step(cfg, {0}, specs, automata), model::EngineFault);
}

TEST_CASE("snapshot semantics: processing order does not matter") {
  // Two drifters that would chase each other if the step were sequential.
  for (bool reverse : {false, true}) {
    std::vector<model::RobotSpec> specs(2);
    specs[0].frame = model::LocalFrame::make({0, 0}, 0.3, 1.0);
    specs[1].frame = model::LocalFrame::make({5, 0}, 4.0, 2.0);
    std::vector<std::unique_ptr<model::Robot>> automata;
    automata.push_back(std::make_unique<Drifter>(Vec2{1, 1}));
    automata.push_back(std::make_unique<Drifter>(Vec2{-1, 2}));
    model::Configuration cfg{{{0, 0}, {5, 0}}, 0};
    static std::vector<Vec2> reference;
    const auto next = model::step(cfg, {0, 1}, specs, automata, nullptr, nullptr, reverse);
    if (!reverse) {
      reference = next.positions;
    } else {
      CHECK(geom::dist(next.positions[0], reference[0]) == 0.0);
      CHECK(geom::dist(next.positions[1], reference[1]) == 0.0);
    }
  }
}

TEST_CASE("run with horizon 0 records the initial configuration only") {
  std::vector<model::RobotSpec> specs(1);
  std::vector<std::unique_ptr<model::Robot>> automata;
  automata.push_back(std::make_unique<Stayer>());
  model::Configuration cfg{{{1, 2}}, 0};
  const auto trace = model::run(cfg, specs, automata, {});
  CHECK(trace.configs.size() == 1);
  CHECK(trace.active_sets.empty());
}

TEST_CASE("schedule generation: synchronous and explicit") {
  const auto sync = model::generate_schedule(model::ActivationSchedule::synchronous(), 3, 4);
  REQUIRE(sync.size() == 4);
  for (const auto& s : sync) CHECK(s == std::vector<int>{0, 1, 2});

  CHECK_THROWS_AS(model::generate_schedule(
                      model::ActivationSchedule::explicit_sets({{0}, {}}), 2, 2),
                  std::domain_error);
}

TEST_CASE("random fair schedules are deterministic and window-fair") {
  const auto sched = model::ActivationSchedule::random_fair(42, 5);
  const auto a = model::generate_schedule(sched, 4, 100);
  const auto b = model::generate_schedule(sched, 4, 100);
  CHECK(a == b);

  std::vector<int> activity(4, 0);
  std::vector<int> idle(4, 0);
  for (const auto& s : a) {
    CHECK(!s.empty());
    for (int r = 0; r < 4; ++r) {
      if (std::find(s.begin(), s.end(), r) != s.end()) {
        ++activity[static_cast<size_t>(r)];
        idle[static_cast<size_t>(r)] = 0;
      } else {
        ++idle[static_cast<size_t>(r)];
        CHECK(idle[static_cast<size_t>(r)] < 5);
      }
    }
  }
  for (int r = 0; r < 4; ++r) CHECK(activity[static_cast<size_t>(r)] >= 20);

  const auto c = model::generate_schedule(model::ActivationSchedule::random_fair(43, 5), 4, 100);
  CHECK(a != c);
}
