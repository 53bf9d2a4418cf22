#include <algorithm>
#include <numeric>

#include "waggle/protocols/sync2.hpp"
#include "waggle/protocols/sync_n.hpp"

namespace waggle::proto {

namespace {

std::string bit_phase(const Outbox::PendingBit& b) {
  return "send:" + std::to_string(b.recipient_label) + ":" + std::to_string(b.bit) + ":" +
         std::to_string(b.seq);
}

}  // namespace

Sync2Robot::Sync2Robot(double sigma_local) : sigma_(sigma_local) {
  if (!(sigma_ > 0.0)) throw std::domain_error("sync2: sigma must be positive");
}

Vec2 Sync2Robot::decide(const model::View& view) {
  if (!init_) {
    if (view.positions.size() != 2)
      throw std::domain_error("sync2: protocol requires exactly 2 robots");
    home_ = view.positions[static_cast<size_t>(view.self)];
    peer_home_ = view.positions[static_cast<size_t>(1 - view.self)];
    // Granular radius of a 2-robot system is half the distance; keep bit
    // moves at half of that so positions stay well apart.
    delta_ = std::min(sigma_, geom::dist(home_, peer_home_) / 4.0);
    init_ = true;
  }
  const bool even = activations_ % 2 == 0;
  ++activations_;
  if (even) {
    if (!outbox_.empty()) {
      in_flight_ = outbox_.pop();
      emit(ProtocolEvent::Kind::BitStarted, *in_flight_);
      const Vec2 peer_now = view.positions[static_cast<size_t>(1 - view.self)];
      const Vec2 toward_peer = (peer_now - home_).normalized();
      const Vec2 right = toward_peer.perp_cw();
      phase_ = bit_phase(*in_flight_);
      return home_ + (in_flight_->bit == 0 ? right : -right) * delta_;
    }
    phase_ = "home";
    return home_;
  }
  if (in_flight_) {
    emit(ProtocolEvent::Kind::BitCompleted, *in_flight_);
    phase_ = "ret:" + std::to_string(in_flight_->seq);
    in_flight_.reset();
  } else {
    phase_ = "home";
  }
  return home_;
}

geom::RelativeNaming naming_by_ids(const std::vector<int>& ids) {
  std::vector<int> order(ids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return ids[static_cast<size_t>(a)] < ids[static_cast<size_t>(b)]; });
  geom::RelativeNaming naming;
  naming.observer = -1;
  naming.by_label = std::move(order);
  naming.labels.assign(ids.size(), -1);
  for (size_t k = 0; k < naming.by_label.size(); ++k)
    naming.labels[static_cast<size_t>(naming.by_label[k])] = static_cast<int>(k);
  return naming;
}

SenderGeometry sender_geometry(const std::vector<Vec2>& t0_positions, int sender,
                               NamingMode mode, int slice_count, ZeroDirPolicy zero_policy,
                               const std::vector<int>* visible_ids) {
  const size_t n = t0_positions.size();
  if (n < 2) throw std::domain_error("sender_geometry: need at least 2 robots");
  const Vec2 center = t0_positions[static_cast<size_t>(sender)];
  std::vector<Vec2> others;
  others.reserve(n - 1);
  for (size_t i = 0; i < n; ++i)
    if (static_cast<int>(i) != sender) others.push_back(t0_positions[i]);
  const double radius = geom::granular_radius(center, others);

  geom::Circle sec;
  if (zero_policy == ZeroDirPolicy::HorizonRay || mode == NamingMode::AnonChirality)
    sec = geom::smallest_enclosing_circle(t0_positions);

  Vec2 zero_dir{0.0, 1.0};
  if (zero_policy == ZeroDirPolicy::HorizonRay) {
    const Vec2 ray = center - sec.center;
    if (ray.norm() <= geom::kEps)
      throw std::domain_error("sender_geometry: robot at the SEC center has no horizon ray");
    zero_dir = ray.normalized();
  }

  SenderGeometry out{geom::Granular(center, radius, slice_count, zero_dir), {}};
  switch (mode) {
    case NamingMode::Identified:
      if (!visible_ids) throw std::domain_error("sender_geometry: identified mode needs ids");
      out.naming = naming_by_ids(*visible_ids);
      break;
    case NamingMode::AnonSoD: out.naming = geom::relative_naming_sod(t0_positions, sender); break;
    case NamingMode::AnonChirality:
      out.naming = geom::relative_naming_chirality(t0_positions, sender, sec);
      break;
  }
  return out;
}

SyncNRobot::SyncNRobot(NamingMode mode, double sigma_local) : mode_(mode), sigma_(sigma_local) {
  if (!(sigma_ > 0.0)) throw std::domain_error("sync_n: sigma must be positive");
}

Vec2 SyncNRobot::decide(const model::View& view) {
  if (!init_) {
    const int n = static_cast<int>(view.positions.size());
    if (n < 2) throw std::domain_error("sync_n: protocol requires n >= 2 robots");
    const ZeroDirPolicy policy = mode_ == NamingMode::AnonChirality ? ZeroDirPolicy::HorizonRay
                                                                    : ZeroDirPolicy::SharedNorth;
    SenderGeometry g = sender_geometry(view.positions, view.self, mode_, n, policy,
                                       view.visible_ids);
    granular_ = g.granular;
    naming_ = g.naming;
    delta_ = std::min(sigma_, granular_.radius / 2.0);
    init_ = true;
  }
  const bool even = activations_ % 2 == 0;
  ++activations_;
  if (even) {
    if (!outbox_.empty()) {
      in_flight_ = outbox_.pop();
      emit(ProtocolEvent::Kind::BitStarted, *in_flight_);
      const int label = in_flight_->recipient_label;
      if (label < 0 || label >= granular_.slice_count)
        throw std::domain_error("sync_n: recipient label out of range");
      if (label == naming_.label_of(view.self))
        throw std::domain_error("sync_n: no diameter addresses the sender itself");
      const geom::Side side = in_flight_->bit == 0 ? geom::Side::Zero : geom::Side::One;
      phase_ = bit_phase(*in_flight_);
      return granular_.center + geom::slice_direction(granular_, label, side) * delta_;
    }
    phase_ = "home";
    return granular_.center;
  }
  if (in_flight_) {
    emit(ProtocolEvent::Kind::BitCompleted, *in_flight_);
    phase_ = "ret:" + std::to_string(in_flight_->seq);
    in_flight_.reset();
  } else {
    phase_ = "home";
  }
  return granular_.center;
}

}  // namespace waggle::proto
