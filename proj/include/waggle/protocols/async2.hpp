#pragma once

#include <optional>

#include "waggle/protocols/common.hpp"

namespace waggle::proto {

// Two robots under any fair schedule. While idle, a robot walks away from its
// peer along the line H through the two start positions; it may only change
// direction once it has seen the peer's position change twice, which
// guarantees the peer has seen one of its own moves. Bits are sent as
// perpendicular excursions off H (bit 0 to the sender's east of H, bit 1 to
// the west), held until the peer was seen to change twice, then retraced to
// the departure point; a resync walk along H separates consecutive bits. The
// robot moves at every activation.
//
// `skip_resync` disables the separation walk (and the idle re-acknowledgment
// after the first handshake); it exists so tests can demonstrate that the
// monitors catch the resulting merged bits.
class Async2Robot : public CommRobot {
 public:
  explicit Async2Robot(double sigma_local, bool skip_resync = false);

  Vec2 decide(const model::View& view) override;
  std::string phase() const override { return phase_str_; }

 private:
  enum class Phase { IdleNorth, SendBit, ReturnToH, Resync };

  Vec2 start_send();
  Vec2 h_point() const { return anchor_ + north_ * progress_; }
  Vec2 north_move();

  double sigma_;
  bool skip_resync_;
  bool init_ = false;
  bool handshake_done_ = false;
  int peer_ = -1;
  Vec2 north_;
  Vec2 east_;
  // The walk is dead-reckoned from the start position: `progress_` along H,
  // `offset_` perpendicular during an excursion. Destinations derive from
  // these scalars, not from observed own positions, so no drift accumulates
  // over long runs and on-H positions stay on H to within one transform
  // round-trip.
  Vec2 anchor_;
  double progress_ = 0.0;
  double offset_ = 0.0;
  double mu_ = 0.0;
  ObservationTracker tracker_;
  ChangeAwait await_;
  Phase phase_ = Phase::IdleNorth;
  std::optional<Outbox::PendingBit> current_;
  long last_seq_ = -1;
  std::string phase_str_ = "init";
};

}  // namespace waggle::proto
