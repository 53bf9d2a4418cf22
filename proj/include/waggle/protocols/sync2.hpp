#pragma once

#include <optional>

#include "waggle/protocols/common.hpp"

namespace waggle::proto {

// Two synchronous robots. Even steps send one pending bit by moving off the
// home position: bit 0 goes to the robot's right of the direction toward the
// peer, bit 1 to its left. Odd steps return home. A robot with nothing to
// send never moves.
class Sync2Robot : public CommRobot {
 public:
  explicit Sync2Robot(double sigma_local);

  Vec2 decide(const model::View& view) override;
  std::string phase() const override { return phase_; }

 private:
  double sigma_;
  bool init_ = false;
  Vec2 home_;
  Vec2 peer_home_;
  double delta_ = 0.0;
  long activations_ = 0;
  std::optional<Outbox::PendingBit> in_flight_;
  std::string phase_ = "init";
};

}  // namespace waggle::proto
