#include "waggle/protocols/common.hpp"

namespace waggle::proto {

bool is_synchronous(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Sync2:
    case ProtocolKind::SyncNId:
    case ProtocolKind::SyncNSoD:
    case ProtocolKind::SyncNChirality: return true;
    case ProtocolKind::Async2:
    case ProtocolKind::AsyncN: return false;
  }
  return false;
}

std::string protocol_name(ProtocolKind kind) {
  switch (kind) {
    case ProtocolKind::Sync2: return "sync2";
    case ProtocolKind::SyncNId: return "sync_n_id";
    case ProtocolKind::SyncNSoD: return "sync_n_sod";
    case ProtocolKind::SyncNChirality: return "sync_n_chirality";
    case ProtocolKind::Async2: return "async2";
    case ProtocolKind::AsyncN: return "async_n";
  }
  return "?";
}

std::optional<ProtocolKind> protocol_from_name(const std::string& name) {
  for (ProtocolKind k :
       {ProtocolKind::Sync2, ProtocolKind::SyncNId, ProtocolKind::SyncNSoD,
        ProtocolKind::SyncNChirality, ProtocolKind::Async2, ProtocolKind::AsyncN})
    if (protocol_name(k) == name) return k;
  return std::nullopt;
}

ObservationTracker::ObservationTracker(int robots, int self, double eps)
    : logs_(static_cast<size_t>(robots)), self_(self), eps_(eps) {}

void ObservationTracker::prime(const std::vector<Vec2>& reference) {
  for (size_t i = 0; i < logs_.size(); ++i) logs_[i].last_seen = reference[i];
  primed_ = true;
}

void ObservationTracker::update(const std::vector<Vec2>& positions) {
  if (!primed_) {
    prime(positions);
    return;
  }
  for (size_t i = 0; i < logs_.size(); ++i) {
    if (static_cast<int>(i) == self_) continue;
    if (geom::dist(positions[i], logs_[i].last_seen) > eps_) {
      logs_[i].last_seen = positions[i];
      ++logs_[i].changes;
    }
  }
}

void ChangeAwait::reset(const ObservationTracker& tracker) {
  baseline.assign(static_cast<size_t>(tracker.robots()), 0);
  for (int i = 0; i < tracker.robots(); ++i)
    baseline[static_cast<size_t>(i)] = tracker.changes(i);
}

bool ChangeAwait::pair_done(const ObservationTracker& tracker, int peer) const {
  return tracker.changes(peer) >= baseline[static_cast<size_t>(peer)] + 2;
}

bool ChangeAwait::all_done(const ObservationTracker& tracker) const {
  for (int i = 0; i < tracker.robots(); ++i) {
    if (i == tracker.self()) continue;
    if (!pair_done(tracker, i)) return false;
  }
  return true;
}

void Outbox::enqueue(int recipient_label, const std::vector<int>& bits) {
  if (bits.empty()) throw std::domain_error("outbox: message must carry at least one bit");
  for (int b : bits) {
    if (b != 0 && b != 1) throw std::domain_error("outbox: bits must be 0 or 1");
    bits_.push_back({recipient_label, b, next_seq_++});
  }
  ++messages_;
}

Outbox::PendingBit Outbox::pop() {
  if (bits_.empty()) throw std::logic_error("outbox: pop from empty queue");
  PendingBit b = bits_.front();
  bits_.pop_front();
  return b;
}

void CommRobot::enqueue(int recipient_label, const std::vector<int>& bits) {
  outbox_.enqueue(recipient_label, bits);
}

std::vector<ProtocolEvent> CommRobot::take_events() {
  std::vector<ProtocolEvent> out;
  out.swap(events_);
  return out;
}

void CommRobot::emit(ProtocolEvent::Kind kind, const Outbox::PendingBit& bit) {
  events_.push_back({kind, bit.recipient_label, bit.bit, bit.seq});
}

}  // namespace waggle::proto
