#include <algorithm>
#include <cmath>

#include "waggle/protocols/async2.hpp"
#include "waggle/protocols/async_n.hpp"

namespace waggle::proto {

namespace {

// Local-coordinate tolerance for "back on the departure point / center".
constexpr double kArriveEps = 1e-9;

std::string bit_phase(const Outbox::PendingBit& b) {
  return "send:" + std::to_string(b.recipient_label) + ":" + std::to_string(b.bit) + ":" +
         std::to_string(b.seq);
}

}  // namespace

Async2Robot::Async2Robot(double sigma_local, bool skip_resync)
    : sigma_(sigma_local), skip_resync_(skip_resync) {
  if (!(sigma_ > 0.0)) throw std::domain_error("async2: sigma must be positive");
}

Vec2 Async2Robot::north_move() {
  progress_ += mu_;
  return h_point();
}

Vec2 Async2Robot::start_send() {
  current_ = outbox_.pop();
  emit(ProtocolEvent::Kind::BitStarted, *current_);
  handshake_done_ = true;
  offset_ = mu_;
  phase_ = Phase::SendBit;
  await_.reset(tracker_);
  phase_str_ = bit_phase(*current_);
  return h_point() + (current_->bit == 0 ? east_ : -east_) * offset_;
}

Vec2 Async2Robot::decide(const model::View& view) {
  if (!init_) {
    if (view.positions.size() != 2)
      throw std::domain_error("async2: protocol requires exactly 2 robots");
    peer_ = 1 - view.self;
    tracker_ = ObservationTracker(2, view.self);
    tracker_.update(view.positions);
    const Vec2 me = view.positions[static_cast<size_t>(view.self)];
    const Vec2 other = view.positions[static_cast<size_t>(peer_)];
    north_ = (me - other).normalized();  // away from the peer, along H
    east_ = north_.perp_cw();
    anchor_ = me;
    mu_ = std::min(sigma_, geom::dist(me, other) / 4.0);
    phase_ = Phase::IdleNorth;
    await_.reset(tracker_);
    init_ = true;
    phase_str_ = "idleN";
    return north_move();
  }
  tracker_.update(view.positions);
  const Vec2 me = view.positions[static_cast<size_t>(view.self)];

  switch (phase_) {
    case Phase::IdleNorth:
    case Phase::Resync: {
      const bool acked = await_.pair_done(tracker_, peer_);
      if (phase_ == Phase::Resync && acked) {
        phase_ = Phase::IdleNorth;  // separation established, visible in the trace
        phase_str_ = "idleN";
        await_.reset(tracker_);
        if (!outbox_.empty()) return start_send();
        return north_move();
      }
      if (!outbox_.empty() && (acked || (skip_resync_ && handshake_done_)))
        return start_send();
      if (phase_ == Phase::IdleNorth) phase_str_ = "idleN";
      return north_move();
    }
    case Phase::SendBit: {
      if (await_.pair_done(tracker_, peer_)) {
        phase_ = Phase::ReturnToH;
        phase_str_ = "retH";
        return h_point();  // the engine paces the return at sigma per activation
      }
      offset_ += mu_;
      return h_point() + (current_->bit == 0 ? east_ : -east_) * offset_;
    }
    case Phase::ReturnToH: {
      if (geom::dist(me, h_point()) <= kArriveEps) {
        offset_ = 0.0;
        emit(ProtocolEvent::Kind::BitCompleted, *current_);
        last_seq_ = current_->seq;
        current_.reset();
        if (skip_resync_) {
          if (!outbox_.empty()) return start_send();
          phase_ = Phase::IdleNorth;
          phase_str_ = "idleN";
          return north_move();
        }
        phase_ = Phase::Resync;
        await_.reset(tracker_);
        phase_str_ = "resync:" + std::to_string(last_seq_);
        return north_move();
      }
      return h_point();
    }
  }
  return me;
}

AsyncNRobot::AsyncNRobot(double sigma_local, const std::vector<Vec2>& t0_view, int self,
                         NamingMode mode, const std::vector<int>* visible_ids)
    : self_(self), n_(static_cast<int>(t0_view.size())), sigma_(sigma_local) {
  if (n_ < 2) throw std::domain_error("async_n: protocol requires n >= 2 robots");
  if (!(sigma_ > 0.0)) throw std::domain_error("async_n: sigma must be positive");
  SenderGeometry g =
      sender_geometry(t0_view, self_, mode, n_ + 1, ZeroDirPolicy::HorizonRay, visible_ids);
  granular_ = g.granular;
  naming_ = g.naming;
  mu_ = std::min(sigma_, granular_.radius / 4.0);
  tracker_ = ObservationTracker(n_, self_);
  tracker_.prime(t0_view);
  ray_ = granular_.zero_direction;
}

void AsyncNRobot::enter_send() {
  current_ = outbox_.pop();
  emit(ProtocolEvent::Kind::BitStarted, *current_);
  const int label = current_->recipient_label;
  if (label < 0 || label >= n_) throw std::domain_error("async_n: recipient label out of range");
  if (label == naming_.label_of(self_))
    throw std::domain_error("async_n: no diameter addresses the sender itself");
  // Diameter 0 is kappa; the robot labeled k is addressed on diameter k+1.
  const geom::Side side = current_->bit == 0 ? geom::Side::Zero : geom::Side::One;
  ray_ = geom::slice_direction(granular_, label + 1, side);
  offset_ = 0.0;
  move_index_ = 0;
  await_.reset(tracker_);
  phase_ = Phase::SendBit;
  phase_str_ = bit_phase(*current_);
}

void AsyncNRobot::enter_return(Next next) {
  phase_ = Phase::Return;
  next_ = next;
  move_index_ = 0;
  phase_str_ = "ret";
}

void AsyncNRobot::enter_resync() {
  osc_sign_ = 1;
  ray_ = granular_.zero_direction;
  offset_ = 0.0;
  move_index_ = 0;
  await_.reset(tracker_);
  phase_ = Phase::Resync;
  phase_str_ = "resync:" + std::to_string(last_seq_);
}

void AsyncNRobot::enter_oscillate(int sign) {
  osc_sign_ = sign;
  ray_ = granular_.zero_direction * static_cast<double>(sign);
  offset_ = 0.0;
  move_index_ = 0;
  await_.reset(tracker_);
  phase_ = Phase::Oscillate;
  phase_str_ = sign > 0 ? "oscK+" : "oscK-";
}

Vec2 AsyncNRobot::outbound_move() {
  const double step = mu_ * std::ldexp(1.0, -move_index_);
  ++move_index_;
  offset_ += step;
  return granular_.center + ray_ * offset_;
}

Vec2 AsyncNRobot::inbound_move() {
  const double step = std::min(mu_ * std::ldexp(1.0, -move_index_), offset_);
  ++move_index_;
  offset_ -= step;
  return granular_.center + ray_ * offset_;
}

Vec2 AsyncNRobot::decide(const model::View& view) {
  tracker_.update(view.positions);
  if (!started_) {
    started_ = true;
    if (!outbox_.empty()) {
      enter_send();
    } else {
      enter_oscillate(1);
    }
    return outbound_move();
  }
  switch (phase_) {
    case Phase::Oscillate:
      if (!outbox_.empty()) {
        if (offset_ <= kArriveEps) {
          enter_send();
          return outbound_move();
        }
        enter_return(Next::Send);
        return inbound_move();
      }
      if (await_.all_done(tracker_)) {
        enter_return(Next::OscFlip);
        return inbound_move();
      }
      return outbound_move();
    case Phase::SendBit:
      if (await_.all_done(tracker_)) {
        emit(ProtocolEvent::Kind::BitCompleted, *current_);
        last_seq_ = current_->seq;
        current_.reset();
        enter_return(Next::Resync);
        return inbound_move();
      }
      return outbound_move();
    case Phase::Return:
      if (next_ == Next::OscFlip && !outbox_.empty()) next_ = Next::Send;
      if (offset_ <= kArriveEps) {
        offset_ = 0.0;
        switch (next_) {
          case Next::Send: enter_send(); break;
          case Next::Resync: enter_resync(); break;
          case Next::OscFlip: enter_oscillate(-osc_sign_); break;
        }
        return outbound_move();
      }
      return inbound_move();
    case Phase::Resync:
      if (await_.all_done(tracker_)) {
        enter_return(outbox_.empty() ? Next::OscFlip : Next::Send);
        return inbound_move();
      }
      return outbound_move();
  }
  return granular_.center;
}

}  // namespace waggle::proto
