#include "doctest.h"
#include "test_support.hpp"
#include "waggle/protocols/sync2.hpp"

using namespace waggle;
using namespace testsupport;
using proto::ProtocolKind;

TEST_CASE("outbox: enqueue grows the queue, bad messages are rejected") {
  proto::Outbox box;
  box.enqueue(1, {1, 0, 1});
  CHECK(box.pending_bits() == 3);
  CHECK(box.messages_enqueued() == 1);
  box.enqueue(0, {1});
  CHECK(box.pending_bits() == 4);
  CHECK_THROWS_AS(box.enqueue(1, {}), std::domain_error);
  CHECK_THROWS_AS(box.enqueue(1, {2}), std::domain_error);
  CHECK(box.pop().recipient_label == 1);
}

TEST_CASE("send: messages to one recipient are encoded strictly in order") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {8, 0}}, 20);
  add_message(ctx, 0, 1, {1, 0}, 0);
  add_message(ctx, 0, 1, {0, 0}, 1);
  const auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  REQUIRE(out.records.size() == 4);
  for (size_t k = 1; k < out.records.size(); ++k)
    CHECK(out.records[k].encode > out.records[k - 1].encode);
}

TEST_CASE("send: self-addressed messages are rejected") {
  auto ctx = make_context(ProtocolKind::SyncNSoD, {{0, 0}, {5, 0}, {0, 5}}, 10);
  add_message(ctx, 1, 1, {1});
  CHECK_THROWS_AS(harness::run_protocol(ctx), harness::ValidationError);
  CHECK_THROWS_AS(harness::recipient_label(ctx, 1, 1), harness::ValidationError);
}

TEST_CASE("monitor_suite: a seeded missed bit fails receipt with evidence") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {8, 0}}, 8);
  add_message(ctx, 0, 1, {1, 0, 1});
  auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  // Suppress the second bit's movement: the sender appears to stay home.
  model::Trace tampered = out.trace;
  tampered.configs[3][0] = tampered.configs[0][0];
  const auto report = harness::monitor_suite(tampered, ctx);
  const auto* receipt = report.find("receipt");
  REQUIRE(receipt != nullptr);
  CHECK(!receipt->pass);
  CHECK(!receipt->evidence.empty());
  CHECK(!report.all_pass());
}

TEST_CASE("monitor_suite: a granular exit fails containment at the first exit instant") {
  auto ctx = make_context(ProtocolKind::SyncNSoD, {{0, 0}, {6, 0}, {0, 7}}, 6);
  add_message(ctx, 0, 1, {1});
  auto out = harness::run_protocol(ctx);
  REQUIRE(out.report.all_pass());
  model::Trace tampered = out.trace;
  tampered.configs[4][2] = Vec2{2.9, 0.1};  // far outside robot 2's granular
  const auto report = harness::monitor_suite(tampered, ctx);
  const auto* containment = report.find("granular_containment");
  REQUIRE(containment != nullptr);
  CHECK(!containment->pass);
  CHECK(containment->first_violation == 4);
}

TEST_CASE("monitor_suite: verdicts are a pure function of the trace") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {8, 0}}, 12);
  add_message(ctx, 0, 1, {1, 1, 0});
  const auto out = harness::run_protocol(ctx);
  const auto a = harness::monitor_suite(out.trace, ctx);
  const auto b = harness::monitor_suite(out.trace, ctx);
  REQUIRE(a.verdicts.size() == b.verdicts.size());
  for (size_t i = 0; i < a.verdicts.size(); ++i) {
    CHECK(a.verdicts[i].property == b.verdicts[i].property);
    CHECK(a.verdicts[i].pass == b.verdicts[i].pass);
    CHECK(a.verdicts[i].first_violation == b.verdicts[i].first_violation);
    CHECK(a.verdicts[i].evidence == b.verdicts[i].evidence);
  }
}

TEST_CASE("explorer: n=2, horizon 1 enumerates exactly 3 schedules") {
  auto ctx = make_context(ProtocolKind::Async2, {{0, 0}, {8, 0}}, 1);
  const auto outcome = harness::explore_schedules(ctx);
  CHECK(outcome.total == 3);
  CHECK(outcome.enumerated == 3);
  CHECK(outcome.exhaustive);
  CHECK(outcome.first_failing_schedule == -1);
}

TEST_CASE("explorer: async2 with one bit each way passes every schedule, horizon 10") {
  auto ctx = make_context(ProtocolKind::Async2, {{0, 0}, {8, 0}}, 10);
  add_message(ctx, 0, 1, {1});
  add_message(ctx, 1, 0, {0});
  const auto outcome = harness::explore_schedules(ctx);
  CHECK(outcome.total == 59049);  // 3^10
  CHECK(outcome.exhaustive);
  CHECK(outcome.first_failing_schedule == -1);
}

TEST_CASE("explorer: the budget produces an explicit partial outcome") {
  auto ctx = make_context(ProtocolKind::Async2, {{0, 0}, {8, 0}}, 10);
  const auto outcome = harness::explore_schedules(ctx, 1000);
  CHECK(outcome.total == 59049);
  CHECK(outcome.enumerated == 1000);
  CHECK(!outcome.exhaustive);
}

TEST_CASE("explorer: removing the resync walk is caught on some schedule") {
  auto ctx = make_context(ProtocolKind::Async2, {{0, 0}, {8, 0}}, 14);
  ctx.mutant_skip_resync = true;
  add_message(ctx, 0, 1, {1, 1});  // two equal bits must stay distinguishable
  const auto outcome = harness::explore_schedules(ctx);
  REQUIRE(outcome.first_failing_schedule >= 0);
  bool receipt_related = false;
  for (const auto& v : outcome.failing_verdicts)
    if (v.property == "receipt_progress" || v.property == "decode_faults")
      receipt_related = true;
  CHECK(receipt_related);
}

TEST_CASE("explorer rejects more than 3 robots") {
  auto ctx = make_context(ProtocolKind::AsyncN, {{0, 0}, {8, 0}, {0, 8}, {8, 8}}, 4);
  CHECK_THROWS_AS(harness::explore_schedules(ctx), harness::ValidationError);
}

TEST_CASE("validation: duplicate positions are reported with the pair") {
  auto ctx = make_context(ProtocolKind::SyncNSoD, {{0, 0}, {5, 0}, {0, 0}}, 10);
  try {
    harness::validate(ctx);
    FAIL("expected a validation error");
  } catch (const harness::ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("0") != std::string::npos);
    CHECK(msg.find("2") != std::string::npos);
    CHECK(msg.find("same position") != std::string::npos);
  }
}

TEST_CASE("validation: sync protocols demand the synchronous scheduler") {
  auto ctx = make_context(ProtocolKind::Sync2, {{0, 0}, {5, 0}}, 10);
  ctx.schedule = model::ActivationSchedule::random_fair(1, 8);
  CHECK_THROWS_AS(harness::validate(ctx), harness::ValidationError);
}
