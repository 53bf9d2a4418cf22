#include "doctest.h"
#include "test_support.hpp"
#include "waggle/protocols/decoders.hpp"
#include "waggle/protocols/sync2.hpp"

using namespace waggle;
using namespace testsupport;
using proto::ProtocolKind;

TEST_CASE("sync2: bit 0 with the peer due north moves east") {
  proto::Sync2Robot robot(1.0);
  robot.enqueue(0, {0});
  const auto view = make_view({{0, 0}, {0, 10}}, 0);
  const Vec2 dest = robot.decide(view);
  // delta = min(sigma, dist/4) = 1; right of "toward peer = north" is +x.
  CHECK(dest.x == doctest::Approx(1.0));
  CHECK(dest.y == doctest::Approx(0.0));
  // odd step returns home
  const Vec2 back = robot.decide(make_view({{1, 0}, {0, 10}}, 0));
  CHECK(back.x == doctest::Approx(0.0));
  CHECK(back.y == doctest::Approx(0.0));
}

TEST_CASE("sync2: bit 1 moves west and needs exactly two robots") {
  proto::Sync2Robot robot(1.0);
  robot.enqueue(0, {1});
  const Vec2 dest = robot.decide(make_view({{0, 0}, {0, 10}}, 0));
  CHECK(dest.x == doctest::Approx(-1.0));
  CHECK(dest.y == doctest::Approx(0.0));

  proto::Sync2Robot bad(1.0);
  CHECK_THROWS_AS(bad.decide(make_view({{0, 0}, {1, 1}, {2, 2}}, 0)), std::domain_error);
}

TEST_CASE("sync2: a robot with no messages never moves") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {8, 2}}, 20);
  add_message(ctx, 0, 1, {1, 0});
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  for (const auto& cfg : out.trace.configs)
    CHECK(geom::dist(cfg[1], out.trace.configs[0][1]) <= 1e-9);
  CHECK(out.report.find("silence") != nullptr);
}

TEST_CASE("sync2: bitstring 011 shows right, left, left displacements") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {10, 0}}, 6);
  add_message(ctx, 0, 1, {0, 1, 1});
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  // Sender 0 faces +x toward the peer; its right under the shared handedness
  // is the clockwise quarter turn of (1,0), which is (0,-1).
  const Vec2 right{0, -1};
  for (int k = 0; k < 3; ++k) {
    const Vec2 delta = out.trace.configs[static_cast<size_t>(2 * k + 1)][0] -
                       out.trace.configs[static_cast<size_t>(2 * k)][0];
    const double proj = geom::dot(delta, right);
    if (k == 0) {
      CHECK(proj > 1e-6);
    } else {
      CHECK(proj < -1e-6);
    }
    const Vec2 ret = out.trace.configs[static_cast<size_t>(2 * k + 2)][0] -
                     out.trace.configs[static_cast<size_t>(2 * k + 1)][0];
    CHECK(geom::dist(ret, -delta) <= 1e-9);
  }
}

TEST_CASE("sync2 decoder: one excursion decodes, stationary peers decode nothing") {
  proto::Sync2Decoder decoder;
  // Observer is robot 1 at (0,10). The peer's direction toward the observer
  // is (0,1); its right is the clockwise quarter turn (1,0).
  decoder.feed(0, make_view({{0, 0}, {0, 10}}, 1));
  decoder.feed(1, make_view({{1, 0}, {0, 10}}, 1));  // moved right
  decoder.feed(2, make_view({{0, 0}, {0, 10}}, 1));  // returned
  REQUIRE(decoder.decoded().size() == 1);
  CHECK(decoder.decoded()[0].bit == 0);
  CHECK(decoder.decoded()[0].sender == 0);
  CHECK(decoder.faults() == 0);

  proto::Sync2Decoder quiet;
  for (long t = 0; t < 6; ++t) quiet.feed(t, make_view({{0, 0}, {0, 10}}, 1));
  CHECK(quiet.decoded().empty());
}

TEST_CASE("sync2: random 64-bit messages decode exactly, one bit per step pair") {
  const auto bits = random_bits(1234, 64);
  auto ctx = make_context(ProtocolKind::Sync2, {{-3, 4}, {5, -1}}, 2 * 64);
  add_message(ctx, 0, 1, bits);
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  CHECK(out.summary.bits_delivered == 64);
  REQUIRE(out.records.size() == 64);
  for (size_t k = 0; k < out.records.size(); ++k) {
    CHECK(out.records[k].bit == bits[k]);
    CHECK(out.records[k].encode == static_cast<long>(2 * k));
    REQUIRE(out.records[k].decode_instants.count(1) == 1);
    CHECK(out.records[k].decode_instants.at(1) == static_cast<long>(2 * k + 1));
  }
}

TEST_CASE("sync2: both robots send simultaneously") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {6, 6}}, 16);
  add_message(ctx, 0, 1, {1, 1, 0, 1});
  add_message(ctx, 1, 0, {0, 0, 1});
  const auto out = harness::run_protocol(ctx);
  CHECK(out.report.all_pass());
  CHECK(out.summary.bits_delivered == 7);
}

TEST_CASE("sync2: late enqueue is sent at the next even step") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {6, 0}}, 12);
  add_message(ctx, 0, 1, {1}, 5);
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  REQUIRE(out.records.size() == 1);
  CHECK(out.records[0].encode == 6);
}
