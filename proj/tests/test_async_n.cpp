#include <cmath>

#include "doctest.h"
#include "test_support.hpp"
#include "waggle/protocols/async_n.hpp"
#include "waggle/protocols/decoders.hpp"

using namespace waggle;
using namespace testsupport;
using proto::ProtocolKind;

namespace {

std::vector<Vec2> triangle() { return {{0, 0}, {12, 0}, {6, 9}}; }

}  // namespace

TEST_CASE("async_n: an idle robot keeps all displacements on its kappa diameter") {
  auto ctx = make_context(ProtocolKind::AsyncN, triangle(), 300);
  ctx.schedule = model::ActivationSchedule::random_fair(11, 8);
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  const geom::Circle sec = geom::smallest_enclosing_circle(out.trace.configs[0]);
  for (int r = 0; r < 3; ++r) {
    const Vec2 center = out.trace.configs[0][static_cast<size_t>(r)];
    const Vec2 kappa = (center - sec.center).normalized();
    for (const auto& cfg : out.trace.configs) {
      const Vec2 v = cfg[static_cast<size_t>(r)] - center;
      // on the kappa line through the center: no perpendicular component
      CHECK(std::abs(geom::cross(v, kappa)) <= 1e-7);
    }
  }
}

TEST_CASE("async_n: per-phase walks are geometric and stay under 2*mu") {
  auto ctx = make_context(ProtocolKind::AsyncN, triangle(), 1500);
  ctx.schedule = model::ActivationSchedule::random_fair(4, 8);
  add_message(ctx, 0, 1, {1, 0});
  add_message(ctx, 2, 0, {0, 1});
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  const auto* decay = out.report.find("decay_bound");
  REQUIRE(decay != nullptr);
  CHECK(decay->pass);
  const auto* containment = out.report.find("granular_containment");
  REQUIRE(containment != nullptr);
  CHECK(containment->pass);
}

TEST_CASE("async_n: n=3 all-pairs 2-bit exchange under RandomFair(8)") {
  auto ctx = make_context(ProtocolKind::AsyncN, triangle(), 5000);
  ctx.schedule = model::ActivationSchedule::random_fair(21, 8);
  int seed = 0;
  for (int s = 0; s < 3; ++s)
    for (int r = 0; r < 3; ++r)
      if (s != r) add_message(ctx, s, r, random_bits(55 + seed++, 2));
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  CHECK(out.summary.bits_expected == 12);
  CHECK(out.summary.bits_delivered == 12);
}

TEST_CASE("async_n decoder: kappa oscillation decodes nothing; a diameter excursion decodes") {
  const auto pts = triangle();
  // Observe sender 1 from robot 0's viewpoint (identity frame here).
  proto::AsyncNDecoder decoder(0, pts);
  const auto& g = decoder.senders()[1].granular;
  REQUIRE(g.slice_count == 4);  // n+1 diameters
  const Vec2 center = pts[1];

  // Oscillation on kappa, both halves: nothing decoded.
  decoder.feed(0, make_view({pts[0], center + g.zero_direction * 0.2, pts[2]}, 0));
  decoder.feed(1, make_view({pts[0], center - g.zero_direction * 0.1, pts[2]}, 0));
  decoder.feed(2, make_view({pts[0], center, pts[2]}, 0));
  CHECK(decoder.decoded().empty());

  // Excursion on diameter 3 (recipient label 2), side Zero, then return.
  const Vec2 ray = geom::slice_direction(g, 3, geom::Side::Zero);
  decoder.feed(3, make_view({pts[0], center + ray * 0.3, pts[2]}, 0));
  decoder.feed(4, make_view({pts[0], center + ray * 0.45, pts[2]}, 0));
  decoder.feed(5, make_view({pts[0], center, pts[2]}, 0));
  REQUIRE(decoder.decoded().size() == 1);
  CHECK(decoder.decoded()[0].sender == 1);
  CHECK(decoder.decoded()[0].recipient_label == 2);
  CHECK(decoder.decoded()[0].bit == 0);
  CHECK(decoder.decoded()[0].instant == 5);
  CHECK(decoder.faults() == 0);
}

TEST_CASE("async_n: every observer reconstructs the same message log") {
  auto ctx = make_context(ProtocolKind::AsyncN, {{0, 0}, {14, 2}, {5, 11}, {-8, 7}}, 4000);
  ctx.schedule = model::ActivationSchedule::random_fair(8, 8);
  add_message(ctx, 0, 2, {1, 1});
  add_message(ctx, 3, 1, {0, 1});
  add_message(ctx, 1, 0, {1});
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  const auto* redundancy = out.report.find("redundancy");
  REQUIRE(redundancy != nullptr);
  CHECK(redundancy->pass);
  CHECK(out.summary.bits_delivered == 5);
}

TEST_CASE("async_n: n=2 works with three diameters") {
  auto ctx = make_context(ProtocolKind::AsyncN, {{0, 0}, {10, 0}}, 2500);
  ctx.schedule = model::ActivationSchedule::random_fair(2, 8);
  add_message(ctx, 0, 1, {1, 0, 0, 1});
  add_message(ctx, 1, 0, {0, 1});
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  CHECK(out.summary.bits_delivered == 6);
}

TEST_CASE("async_n: late wake-up still decodes everything (P(t0) known)") {
  auto ctx = make_context(ProtocolKind::AsyncN, triangle(), 4000);
  // Robot 2 sleeps for the first 40 instants; the explicit schedule then
  // hands control to a fair generator pattern.
  std::vector<std::vector<int>> sets;
  for (int t = 0; t < 40; ++t) sets.push_back(t % 2 == 0 ? std::vector<int>{0}
                                                         : std::vector<int>{1});
  const auto fair = model::generate_schedule(model::ActivationSchedule::random_fair(6, 8), 3,
                                             4000 - 40);
  sets.insert(sets.end(), fair.begin(), fair.end());
  ctx.schedule = model::ActivationSchedule::explicit_sets(sets);
  add_message(ctx, 0, 1, {1, 0});
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  CHECK(out.summary.bits_delivered == 2);
}
