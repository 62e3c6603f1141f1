#pragma once

#include <string>

#include "racing/drafting.hpp"
#include "racing/vehicle_dynamics.hpp"

namespace racing {

// Vehicle parameter file: VehicleParams keys followed by optional
// DraftingParams keys, one `name = value` per line.
struct VehicleConfig {
  VehicleParams vehicle;
  DraftingParams drafting;
};

VehicleConfig vehicle_config_from_text(const std::string& text, const std::string& source);
VehicleConfig load_vehicle_config(const std::string& path);
std::string to_key_value(const VehicleConfig& c);

}  // namespace racing
