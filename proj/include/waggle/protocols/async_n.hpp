#pragma once

#include <optional>
#include <vector>

#include "waggle/protocols/common.hpp"
#include "waggle/protocols/sync_n.hpp"

namespace waggle::proto {

// n robots under any fair schedule, P(t0) known to all. Each granular is cut
// by n+1 diameters; diameter 0 (kappa) lies on the robot's horizon ray from
// the SEC center and carries no bit, diameter k+1 addresses the robot labeled
// k. A robot moves at every activation: idle robots walk excursions on kappa
// (alternating halves), senders walk the recipient's diameter until every
// other robot was seen to change twice, return to the center, and resync on
// kappa before the next bit. Within each directed walk the step length halves
// move by move, so a walk covers less than 2*mu and never leaves the
// granular.
class AsyncNRobot : public CommRobot {
 public:
  AsyncNRobot(double sigma_local, const std::vector<Vec2>& t0_view, int self,
              NamingMode mode = NamingMode::AnonChirality,
              const std::vector<int>* visible_ids = nullptr);

  Vec2 decide(const model::View& view) override;
  std::string phase() const override { return phase_str_; }
  const geom::RelativeNaming* naming() const override { return &naming_; }
  const geom::Granular* granular() const { return &granular_; }
  double mu() const { return mu_; }

 private:
  enum class Phase { Oscillate, SendBit, Return, Resync };
  enum class Next { Send, Resync, OscFlip };

  void enter_send();
  void enter_return(Next next);
  void enter_resync();
  void enter_oscillate(int sign);
  Vec2 outbound_move();
  Vec2 inbound_move();

  int self_;
  int n_;
  double sigma_;
  geom::Granular granular_;
  geom::RelativeNaming naming_;
  double mu_ = 0.0;
  ObservationTracker tracker_;
  ChangeAwait await_;
  bool started_ = false;
  Phase phase_ = Phase::Oscillate;
  Next next_ = Next::OscFlip;
  int osc_sign_ = 1;
  Vec2 ray_;          // unit direction of the current walk, from the center
  double offset_ = 0.0;  // distance from the center along ray_
  int move_index_ = 0;   // per-phase decay exponent
  std::optional<Outbox::PendingBit> current_;
  long last_seq_ = -1;
  std::string phase_str_ = "init";
};

}  // namespace waggle::proto
