#pragma once

// Slipstream drag reduction behind a lead vehicle and the rectangular area in
// which it applies.

#include <cmath>
#include <span>

#include "racing/dual.hpp"

namespace racing {

struct DraftingParams {
  double kc = 0.805;
  double kx = 0.003;   // 1/m
  double ky = 0.0825;  // 1/m
  double vmax = 45.0;  // m/s
  double zone_length = 30.0;
  double zone_halfwidth = 3.0;

  void validate() const;
};

struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
};

// Position of a point in a vehicle's frame, with the longitudinal axis
// pointing backwards: `behind` > 0 means the point trails the vehicle.
template <class T>
struct TrailingOffsetT {
  T behind;
  T lateral;  // left positive
};

template <class T>
TrailingOffsetT<T> trailing_offset(const Pose2& lead, const T& x, const T& y) {
  const double c = std::cos(lead.heading);
  const double s = std::sin(lead.heading);
  const T dx = x - lead.x;
  const T dy = y - lead.y;
  return {-(c * dx + s * dy), -s * dx + c * dy};
}

// alpha_cd for an ego trailing a lead by `dx` (>= 0 behind) with lateral
// offset `dy`, travelling at speed `v`. Does not check the zone.
template <class T>
T drag_scale(const T& dx, const T& dy, const T& v, const DraftingParams& p) {
  using std::abs;
  T beta = p.kc + p.kx * dx + p.ky * abs(dy);
  if (value(beta) > 1.0) beta = T(1.0);
  return 1.0 + (v / p.vmax) * (beta - 1.0);
}

inline bool in_zone(double behind, double lateral, const DraftingParams& p) {
  return behind >= 0.0 && behind <= p.zone_length && std::abs(lateral) <= p.zone_halfwidth;
}

bool in_draft_zone(const Pose2& ego, const Pose2& lead, const DraftingParams& p);

// Strongest (minimum) drag scale over all leads whose zone contains the ego
// position; exactly 1 when no zone applies.
template <class T>
T combined_drag_scale(const T& x, const T& y, const T& v, std::span<const Pose2> leads, const DraftingParams& p) {
  T best(1.0);
  for (const auto& lead : leads) {
    const auto off = trailing_offset(lead, x, y);
    if (!in_zone(value(off.behind), value(off.lateral), p)) continue;
    const T a = drag_scale(off.behind, off.lateral, v, p);
    if (value(a) < value(best)) best = a;
  }
  return best;
}

}  // namespace racing
