#include "waggle/protocols/decoders.hpp"

#include <cmath>

namespace waggle::proto {

namespace {
constexpr double kZoneEps = 1e-9;
}

void Sync2Decoder::feed(long t, const model::View& view) {
  const int peer = 1 - view.self;
  const Vec2 peer_pos = view.positions[static_cast<size_t>(peer)];
  if (!init_) {
    const Vec2 self_pos = view.positions[static_cast<size_t>(view.self)];
    right_ = (self_pos - peer_pos).normalized().perp_cw();
    prev_peer_ = peer_pos;
    init_ = true;
    return;
  }
  if (t % 2 == 1) {
    const Vec2 delta = peer_pos - prev_peer_;
    if (delta.norm() > geom::kEps) {
      const double proj = geom::dot(delta, right_);
      if (std::abs(proj) <= kZoneEps) {
        ++faults_;  // displacement without a readable perpendicular component
      } else {
        decoded_.push_back({peer, 0, proj > 0.0 ? 0 : 1, t});
      }
    }
  }
  prev_peer_ = peer_pos;
}

void SyncNDecoder::feed(long t, const model::View& view) {
  if (!init_) {
    self_ = view.self;
    const int n = static_cast<int>(view.positions.size());
    const ZeroDirPolicy policy = mode_ == NamingMode::AnonChirality ? ZeroDirPolicy::HorizonRay
                                                                    : ZeroDirPolicy::SharedNorth;
    senders_.reserve(static_cast<size_t>(n));
    for (int s = 0; s < n; ++s)
      senders_.push_back(sender_geometry(view.positions, s, mode_, n, policy, view.visible_ids));
    prev_ = view.positions;
    init_ = true;
    return;
  }
  if (t % 2 == 1) {
    for (size_t s = 0; s < view.positions.size(); ++s) {
      if (static_cast<int>(s) == self_) continue;
      const auto cls =
          geom::classify_displacement(senders_[s].granular, prev_[s], view.positions[s]);
      if (cls)
        decoded_.push_back({static_cast<int>(s), cls->label,
                            cls->side == geom::Side::Zero ? 0 : 1, t});
    }
  }
  prev_ = view.positions;
}

std::vector<DecodedBit> SyncNDecoder::addressed_to_me() const {
  std::vector<DecodedBit> mine;
  for (const DecodedBit& b : decoded_) {
    const auto& naming = senders_[static_cast<size_t>(b.sender)].naming;
    if (naming.label_of(self_) == b.recipient_label) mine.push_back(b);
  }
  return mine;
}

void Async2Decoder::feed(long t, const model::View& view) {
  const int peer = 1 - view.self;
  const Vec2 peer_pos = view.positions[static_cast<size_t>(peer)];
  if (!init_) {
    const Vec2 self_pos = view.positions[static_cast<size_t>(view.self)];
    // The peer's north points away from the observer; its east fixes bit 0.
    east_peer_ = (peer_pos - self_pos).normalized().perp_cw();
    anchor_ = peer_pos;
    peer_ = peer;
    prev_ = Zone::OnH;
    init_ = true;
    return;
  }
  const double off = geom::dot(peer_pos - anchor_, east_peer_);
  const Zone zone = std::abs(off) <= kZoneEps ? Zone::OnH : (off > 0.0 ? Zone::East : Zone::West);
  if (prev_ != zone) {
    if (prev_ == Zone::East) decoded_.push_back({peer_, 0, 0, t});
    if (prev_ == Zone::West) decoded_.push_back({peer_, 0, 1, t});
    if ((prev_ == Zone::East && zone == Zone::West) ||
        (prev_ == Zone::West && zone == Zone::East))
      ++faults_;  // excursions must be separated by a sighting on H
  }
  prev_ = zone;
}

AsyncNDecoder::AsyncNDecoder(int self, const std::vector<Vec2>& t0_view, NamingMode mode,
                             const std::vector<int>* visible_ids)
    : self_(self), n_(static_cast<int>(t0_view.size())) {
  senders_.reserve(static_cast<size_t>(n_));
  for (int s = 0; s < n_; ++s)
    senders_.push_back(
        sender_geometry(t0_view, s, mode, n_ + 1, ZeroDirPolicy::HorizonRay, visible_ids));
  prev_.assign(static_cast<size_t>(n_), Zone{});
}

AsyncNDecoder::Zone AsyncNDecoder::zone_of(int sender, const Vec2& pos) const {
  const auto& g = senders_[static_cast<size_t>(sender)].granular;
  const Vec2 v = pos - g.center;
  Zone z;
  if (v.norm() <= kZoneEps) {
    z.kind = Zone::Kind::Center;
    return z;
  }
  const double step = geom::kPi / g.slice_count;
  const double angle = geom::clockwise_angle(g.zero_direction, v);
  long idx = std::lround(angle / step) % (2 * g.slice_count);
  const int diameter = static_cast<int>(idx % g.slice_count);
  if (diameter == 0) {
    z.kind = Zone::Kind::Kappa;
    return z;
  }
  z.kind = Zone::Kind::Diameter;
  z.label = diameter - 1;  // diameter k+1 addresses the robot labeled k
  z.bit = idx < g.slice_count ? 0 : 1;
  return z;
}

void AsyncNDecoder::feed(long t, const model::View& view) {
  for (int s = 0; s < n_; ++s) {
    if (s == self_) continue;
    const Zone zone = zone_of(s, view.positions[static_cast<size_t>(s)]);
    const Zone& prev = prev_[static_cast<size_t>(s)];
    if (!(prev == zone)) {
      if (prev.kind == Zone::Kind::Diameter) {
        decoded_.push_back({s, prev.label, prev.bit, t});
        if (zone.kind == Zone::Kind::Diameter)
          ++faults_;  // two excursions with no kappa/center sighting between
      }
      prev_[static_cast<size_t>(s)] = zone;
    }
  }
}

}  // namespace waggle::proto
