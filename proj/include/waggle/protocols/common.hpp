#pragma once

#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "waggle/geometry.hpp"
#include "waggle/model.hpp"

namespace waggle::proto {

using geom::Vec2;

enum class NamingMode { Identified, AnonSoD, AnonChirality };

enum class ProtocolKind { Sync2, SyncNId, SyncNSoD, SyncNChirality, Async2, AsyncN };

bool is_synchronous(ProtocolKind kind);
std::string protocol_name(ProtocolKind kind);
std::optional<ProtocolKind> protocol_from_name(const std::string& name);

// Per-peer record of the last registered position and how often it was seen
// to change. An observer registers at most one change per own activation per
// peer: a change is recorded exactly when the peer's current position differs
// from the last registered one by more than eps.
class ObservationTracker {
 public:
  ObservationTracker() = default;
  ObservationTracker(int robots, int self, double eps = geom::kEps);

  // Seed the reference positions (the P(t0)-known-to-all case). Without
  // priming, the first update only registers positions.
  void prime(const std::vector<Vec2>& reference);
  void update(const std::vector<Vec2>& positions);

  bool primed() const { return primed_; }
  long changes(int peer) const { return logs_[static_cast<size_t>(peer)].changes; }
  const Vec2& last_seen(int peer) const { return logs_[static_cast<size_t>(peer)].last_seen; }
  int robots() const { return static_cast<int>(logs_.size()); }
  int self() const { return self_; }

 private:
  struct PeerLog {
    Vec2 last_seen;
    long changes = 0;
  };
  std::vector<PeerLog> logs_;
  int self_ = -1;
  double eps_ = geom::kEps;
  bool primed_ = false;
};

// Change counters relative to a baseline taken at a phase entry.
struct ChangeAwait {
  std::vector<long> baseline;

  void reset(const ObservationTracker& tracker);
  bool pair_done(const ObservationTracker& tracker, int peer) const;
  bool all_done(const ObservationTracker& tracker) const;
};

// FIFO queue of bits to transmit, flattened from enqueued messages. Each bit
// keeps its recipient label and a global sequence number.
class Outbox {
 public:
  struct PendingBit {
    int recipient_label;
    int bit;
    long seq;
  };

  void enqueue(int recipient_label, const std::vector<int>& bits);
  bool empty() const { return bits_.empty(); }
  PendingBit pop();
  size_t pending_bits() const { return bits_.size(); }
  long messages_enqueued() const { return messages_; }

 private:
  std::deque<PendingBit> bits_;
  long next_seq_ = 0;
  long messages_ = 0;
};

struct ProtocolEvent {
  enum class Kind { BitStarted, BitCompleted };
  Kind kind;
  int recipient_label;
  int bit;
  long seq;
};

// Base for all protocol automata: adds the outbox, the event drain used by
// the harness for bookkeeping, and access to the naming once preprocessing
// has run.
class CommRobot : public model::Robot {
 public:
  void enqueue(int recipient_label, const std::vector<int>& bits);
  std::vector<ProtocolEvent> take_events();
  virtual const geom::RelativeNaming* naming() const { return nullptr; }

 protected:
  void emit(ProtocolEvent::Kind kind, const Outbox::PendingBit& bit);

  Outbox outbox_;
  std::vector<ProtocolEvent> events_;
};

}  // namespace waggle::proto
