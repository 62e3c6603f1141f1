#include "racing/drafting.hpp"

#include <stdexcept>

namespace racing {

void DraftingParams::validate() const {
  if (!(vmax > 0.0)) throw std::invalid_argument("drafting: vmax must be positive");
  if (!(zone_length > 0.0)) throw std::invalid_argument("drafting: zone_length must be positive");
  if (!(zone_halfwidth > 0.0)) throw std::invalid_argument("drafting: zone_halfwidth must be positive");
}

bool in_draft_zone(const Pose2& ego, const Pose2& lead, const DraftingParams& p) {
  const auto off = trailing_offset(lead, ego.x, ego.y);
  return in_zone(off.behind, off.lateral, p);
}

}  // namespace racing
