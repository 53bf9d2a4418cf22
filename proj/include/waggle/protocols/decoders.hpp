#pragma once

#include <memory>
#include <vector>

#include "waggle/protocols/common.hpp"
#include "waggle/protocols/sync_n.hpp"

namespace waggle::proto {

struct DecodedBit {
  int sender;
  int recipient_label;  // label under the sender's naming
  int bit;
  long instant;         // observer activation at which the bit was recognized
};

// An observer-side decoder. It is fed exactly at the observer's activation
// instants with the observer's local view, both during live runs and when
// replaying a recorded trace; the two uses share this code.
class Decoder {
 public:
  virtual ~Decoder() = default;
  virtual void feed(long t, const model::View& view) = 0;

  const std::vector<DecodedBit>& decoded() const { return decoded_; }
  long faults() const { return faults_; }

 protected:
  std::vector<DecodedBit> decoded_;
  long faults_ = 0;
};

// Synchronous 2-robot decoder: the peer's even-step displacement to the right
// of its direction toward the observer reads 0, to the left reads 1.
class Sync2Decoder : public Decoder {
 public:
  void feed(long t, const model::View& view) override;

 private:
  bool init_ = false;
  Vec2 right_;        // the peer's right of its direction toward the observer
  Vec2 prev_peer_;
};

// Synchronous n-robot decoder: recomputes every sender's granular and naming
// from the t0 view and classifies each even-step displacement against the
// sender's diameters.
class SyncNDecoder : public Decoder {
 public:
  explicit SyncNDecoder(NamingMode mode) : mode_(mode) {}

  void feed(long t, const model::View& view) override;
  // Decoded bits addressed to this observer under each sender's naming.
  std::vector<DecodedBit> addressed_to_me() const;

 private:
  NamingMode mode_;
  bool init_ = false;
  int self_ = -1;
  std::vector<SenderGeometry> senders_;
  std::vector<Vec2> prev_;
};

// Asynchronous 2-robot decoder: tracks the peer's signed offset from the
// line H through the two start positions. An excursion east of H (in the
// peer's orientation) closes as bit 0 when the peer is next seen on H, a west
// excursion closes as bit 1.
class Async2Decoder : public Decoder {
 public:
  void feed(long t, const model::View& view) override;

 private:
  enum class Zone { OnH, East, West };
  bool init_ = false;
  int peer_ = -1;
  Vec2 anchor_;
  Vec2 east_peer_;
  Zone prev_ = Zone::OnH;
};

// Asynchronous n-robot decoder: per sender, positions classify as center, on
// kappa, or on an addressed diameter side; a diameter episode closes as one
// bit at the next center/kappa sighting.
class AsyncNDecoder : public Decoder {
 public:
  AsyncNDecoder(int self, const std::vector<Vec2>& t0_view,
                NamingMode mode = NamingMode::AnonChirality,
                const std::vector<int>* visible_ids = nullptr);

  void feed(long t, const model::View& view) override;
  const std::vector<SenderGeometry>& senders() const { return senders_; }

 private:
  struct Zone {
    enum class Kind { Center, Kappa, Diameter } kind = Kind::Center;
    int label = -1;
    int bit = -1;
    bool operator==(const Zone&) const = default;
  };
  Zone zone_of(int sender, const Vec2& pos) const;

  int self_;
  int n_;
  std::vector<SenderGeometry> senders_;
  std::vector<Zone> prev_;
};

}  // namespace waggle::proto
