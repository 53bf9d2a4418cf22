#pragma once

#include <optional>
#include <vector>

#include "waggle/protocols/common.hpp"

namespace waggle::proto {

enum class ZeroDirPolicy { SharedNorth, HorizonRay };

// Geometry and naming one robot needs to interpret (or produce) another
// robot's movements, derived from the t0 configuration. `slice_count` is the
// number of diameters: n for the synchronous protocols, n+1 for the
// asynchronous n-robot protocol.
struct SenderGeometry {
  geom::Granular granular;
  geom::RelativeNaming naming;
};

SenderGeometry sender_geometry(const std::vector<Vec2>& t0_positions, int sender,
                               NamingMode mode, int slice_count, ZeroDirPolicy zero_policy,
                               const std::vector<int>* visible_ids);

geom::RelativeNaming naming_by_ids(const std::vector<int>& ids);

// n synchronous robots. Preprocessing at t0 fixes each robot's granular
// (radius half the nearest-neighbor distance), the diameter labeling, and the
// naming for the chosen mode. Even steps send a pending bit along the
// diameter labeled with the recipient, side by bit value; odd steps return to
// the granular center.
class SyncNRobot : public CommRobot {
 public:
  SyncNRobot(NamingMode mode, double sigma_local);

  Vec2 decide(const model::View& view) override;
  std::string phase() const override { return phase_; }
  const geom::RelativeNaming* naming() const override { return init_ ? &naming_ : nullptr; }
  const geom::Granular* granular() const { return init_ ? &granular_ : nullptr; }

 private:
  NamingMode mode_;
  double sigma_;
  bool init_ = false;
  geom::Granular granular_;
  geom::RelativeNaming naming_;
  double delta_ = 0.0;
  long activations_ = 0;
  std::optional<Outbox::PendingBit> in_flight_;
  std::string phase_ = "init";
};

}  // namespace waggle::proto
