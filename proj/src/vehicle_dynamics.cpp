#include "racing/vehicle_dynamics.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "racing/key_value.hpp"
#include "racing/vehicle_config.hpp"

namespace racing {

void VehicleParams::validate() const {
  if (!(m > 0.0 && Iz > 0.0 && lF > 0.0 && lR > 0.0 && S > 0.0 && rho > 0.0))
    throw std::invalid_argument("vehicle: m, Iz, lF, lR, S, rho must be positive");
  if (!(vx_min > 0.0)) throw std::invalid_argument("vehicle: vx_min must be positive");
  if (!(delta_max > 0.0)) throw std::invalid_argument("vehicle: delta_max must be positive");
  if (!(length > 0.0 && width > 0.0)) throw std::invalid_argument("vehicle: footprint must be positive");
  const double weight = m * kGravity;
  if (std::abs(FsFz + FsRz - weight) > 0.01 * weight)
    throw std::invalid_argument("vehicle: static loads FsFz + FsRz must equal m*g within 1%");
}

VehicleState integrate(const VehicleState& s, const ControlInput& u, double alpha_cd, double dt,
                       const VehicleParams& p, const TireCoefficients& tires, Integrator method) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate: dt must be positive");
  if (method == Integrator::Euler) return s + dt * state_derivative(s, u, alpha_cd, p, tires);
  const auto k1 = state_derivative(s, u, alpha_cd, p, tires);
  const auto k2 = state_derivative(s + (0.5 * dt) * k1, u, alpha_cd, p, tires);
  const auto k3 = state_derivative(s + (0.5 * dt) * k2, u, alpha_cd, p, tires);
  const auto k4 = state_derivative(s + dt * k3, u, alpha_cd, p, tires);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

VehicleState plant_derivative(const VehicleState& s, const ControlInput& u, double alpha_cd, const VehicleParams& p,
                              const TireCoefficients& tires) {
  if (s.vx >= p.vx_min) return state_derivative_unchecked(s, u, alpha_cd, p, tires);
  // Kinematic fallback: yaw rate relaxes to the geometric value, lateral
  // velocity decays, and braking stops at zero speed.
  constexpr double kTau = 0.1;
  const double vx = std::max(s.vx, 0.0);
  const double wheelbase = p.lF + p.lR;
  VehicleState ds;
  ds.X = s.vx * std::cos(s.phi) - s.vy * std::sin(s.phi);
  ds.Y = s.vx * std::sin(s.phi) + s.vy * std::cos(s.phi);
  ds.phi = s.r;
  double ax = longitudinal_force(vx, u.D, alpha_cd, p) / p.m;
  if (s.vx <= 0.0 && ax < 0.0) ax = 0.0;
  ds.vx = ax;
  ds.vy = -s.vy / kTau;
  ds.r = (vx * std::tan(u.delta) / wheelbase - s.r) / kTau;
  return ds;
}

VehicleState plant_rk4_step(const VehicleState& s, const ControlInput& u, double alpha_cd, double dt,
                            const VehicleParams& p, const TireCoefficients& tires) {
  const auto k1 = plant_derivative(s, u, alpha_cd, p, tires);
  const auto k2 = plant_derivative(s + (0.5 * dt) * k1, u, alpha_cd, p, tires);
  const auto k3 = plant_derivative(s + (0.5 * dt) * k2, u, alpha_cd, p, tires);
  const auto k4 = plant_derivative(s + dt * k3, u, alpha_cd, p, tires);
  VehicleState next = s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  if (next.vx < 0.0) next.vx = 0.0;
  return next;
}

ControlInput clamp_control(const ControlInput& u, const VehicleParams& p) {
  return {std::clamp(u.delta, -p.delta_max, p.delta_max), std::clamp(u.D, -1.0, 1.0)};
}

namespace {

using VehicleField = std::pair<const char*, double VehicleParams::*>;
using DraftField = std::pair<const char*, double DraftingParams::*>;

constexpr VehicleField kVehicleFields[] = {
    {"m", &VehicleParams::m},         {"Iz", &VehicleParams::Iz},
    {"lF", &VehicleParams::lF},       {"lR", &VehicleParams::lR},
    {"Cm1", &VehicleParams::Cm1},     {"Cm2", &VehicleParams::Cm2},
    {"CR", &VehicleParams::CR},       {"Cd", &VehicleParams::Cd},
    {"ClF", &VehicleParams::ClF},     {"ClR", &VehicleParams::ClR},
    {"rho", &VehicleParams::rho},     {"S", &VehicleParams::S},
    {"FsFz", &VehicleParams::FsFz},   {"FsRz", &VehicleParams::FsRz},
    {"vx_min", &VehicleParams::vx_min}, {"delta_max", &VehicleParams::delta_max},
    {"length", &VehicleParams::length}, {"width", &VehicleParams::width},
};

constexpr DraftField kDraftFields[] = {
    {"kc", &DraftingParams::kc},
    {"kx", &DraftingParams::kx},
    {"ky", &DraftingParams::ky},
    {"vmax", &DraftingParams::vmax},
    {"zone_length", &DraftingParams::zone_length},
    {"zone_halfwidth", &DraftingParams::zone_halfwidth},
};

}  // namespace

VehicleConfig vehicle_config_from_text(const std::string& text, const std::string& source) {
  VehicleConfig c;
  for (const auto& e : parse_key_value_text(text, source)) {
    bool found = false;
    for (const auto& [name, member] : kVehicleFields) {
      if (e.key == name) {
        c.vehicle.*member = parse_double(e, source);
        found = true;
      }
    }
    for (const auto& [name, member] : kDraftFields) {
      if (e.key == name) {
        c.drafting.*member = parse_double(e, source);
        found = true;
      }
    }
    if (!found) throw ParseError(source, e.line, "unknown vehicle parameter '" + e.key + "'");
  }
  c.vehicle.validate();
  c.drafting.validate();
  return c;
}

VehicleConfig load_vehicle_config(const std::string& path) {
  return vehicle_config_from_text(read_text_file(path), path);
}

std::string to_key_value(const VehicleConfig& c) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [name, member] : kVehicleFields) out << name << " = " << c.vehicle.*member << '\n';
  for (const auto& [name, member] : kDraftFields) out << name << " = " << c.drafting.*member << '\n';
  return out.str();
}

}  // namespace racing
