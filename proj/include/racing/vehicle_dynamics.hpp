#pragma once

// Dynamic single-track (bicycle) model with speed-dependent tire loads and a
// drafting-scaled aerodynamic drag, plus fixed-step integrators.

#include <cmath>
#include <stdexcept>
#include <string>

#include "racing/dual.hpp"
#include "racing/tire_model.hpp"

namespace racing {

inline constexpr double kGravity = 9.81;

template <class T>
struct StateT {
  T X{};    // m
  T Y{};    // m
  T phi{};  // rad
  T vx{};   // m/s, body frame
  T vy{};   // m/s, body frame
  T r{};    // rad/s

  StateT& operator+=(const StateT& o) {
    X += o.X; Y += o.Y; phi += o.phi; vx += o.vx; vy += o.vy; r += o.r;
    return *this;
  }
};

template <class T>
StateT<T> operator+(StateT<T> a, const StateT<T>& b) { return a += b; }

template <class T, class S>
StateT<T> operator*(const S& k, const StateT<T>& a) {
  return {k * a.X, k * a.Y, k * a.phi, k * a.vx, k * a.vy, k * a.r};
}

using VehicleState = StateT<double>;

template <class T>
struct ControlT {
  T delta{};  // steering angle, rad, left positive
  T D{};      // drive command in [-1, 1]
};
using ControlInput = ControlT<double>;

struct VehicleParams {
  double m = 800.0;
  double Iz = 1100.0;
  double lF = 1.7;
  double lR = 1.3;
  double Cm1 = 6000.0;
  double Cm2 = 120.0;
  double CR = 100.0;
  double Cd = 0.8;
  double ClF = 0.5;  // positive values increase tire load
  double ClR = 0.6;
  double rho = 1.2;
  double S = 1.0;
  double FsFz = 800.0 * kGravity * 1.3 / 3.0;
  double FsRz = 800.0 * kGravity * 1.7 / 3.0;
  double vx_min = 1.0;
  double delta_max = 0.35;
  double length = 4.9;
  double width = 1.9;

  // Positivity of mass, inertia, geometry and aero constants; static loads
  // must sum to m*g within 1%.
  void validate() const;
};

class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

template <class T>
struct SlipAnglesT {
  T front;
  T rear;
};

template <class T>
struct AxleLoadsT {
  T front;
  T rear;
};

// Unchecked slip angles; callers guarantee vx >= vx_min.
template <class T>
SlipAnglesT<T> slip_angles_unchecked(const StateT<T>& s, const T& delta, const VehicleParams& p) {
  using std::atan;
  return {-atan((s.r * p.lF + s.vy) / s.vx) + delta, atan((s.r * p.lR - s.vy) / s.vx)};
}

template <class T>
SlipAnglesT<T> slip_angles(const StateT<T>& s, const T& delta, const VehicleParams& p) {
  if (!(value(s.vx) >= p.vx_min)) throw DomainError("slip_angles: vx below vx_min");
  return slip_angles_unchecked(s, delta, p);
}

template <class T>
AxleLoadsT<T> vertical_loads(const T& vx, const VehicleParams& p) {
  const T q = 0.5 * p.rho * p.S * vx * vx;
  return {p.FsFz + p.ClF * q, p.FsRz + p.ClR * q};
}

template <class T, class A>
T longitudinal_force(const T& vx, const T& D, const A& alpha_cd, const VehicleParams& p) {
  const T drag = 0.5 * vx * vx * p.rho * p.Cd * p.S * alpha_cd;
  return (p.Cm1 - p.Cm2 * vx) * D - p.CR - drag;
}

// Rows of the equation of motion. The lateral row uses m*vx*r and the
// longitudinal row m*vy*r.
template <class T, class A>
StateT<T> state_derivative_unchecked(const StateT<T>& s, const ControlT<T>& u, const A& alpha_cd,
                                     const VehicleParams& p, const TireCoefficients& tires) {
  using std::cos;
  using std::sin;
  const auto slip = slip_angles_unchecked(s, u.delta, p);
  const auto load = vertical_loads(s.vx, p);
  const T FFy = lateral_force(slip.front, load.front, tires);
  const T FRy = lateral_force(slip.rear, load.rear, tires);
  const T FRx = longitudinal_force(s.vx, u.D, alpha_cd, p);
  const T cphi = cos(s.phi);
  const T sphi = sin(s.phi);
  const T cd = cos(u.delta);
  const T sd = sin(u.delta);
  StateT<T> ds;
  ds.X = s.vx * cphi - s.vy * sphi;
  ds.Y = s.vx * sphi + s.vy * cphi;
  ds.phi = s.r;
  ds.vx = (FRx - FFy * sd + p.m * s.vy * s.r) / p.m;
  ds.vy = (FRy + FFy * cd - p.m * s.vx * s.r) / p.m;
  ds.r = (FFy * p.lF * cd - FRy * p.lR) / p.Iz;
  return ds;
}

template <class T, class A>
StateT<T> state_derivative(const StateT<T>& s, const ControlT<T>& u, const A& alpha_cd, const VehicleParams& p,
                           const TireCoefficients& tires) {
  if (!(value(s.vx) >= p.vx_min)) throw DomainError("state_derivative: vx below vx_min");
  return state_derivative_unchecked(s, u, alpha_cd, p, tires);
}

enum class Integrator { Euler, RK4 };

template <class T, class A>
StateT<T> euler_step(const StateT<T>& s, const ControlT<T>& u, const A& alpha_cd, double dt, const VehicleParams& p,
                     const TireCoefficients& tires) {
  return s + dt * state_derivative_unchecked(s, u, alpha_cd, p, tires);
}

template <class T, class A>
StateT<T> rk4_step(const StateT<T>& s, const ControlT<T>& u, const A& alpha_cd, double dt, const VehicleParams& p,
                   const TireCoefficients& tires) {
  const auto k1 = state_derivative_unchecked(s, u, alpha_cd, p, tires);
  const auto k2 = state_derivative_unchecked(s + (0.5 * dt) * k1, u, alpha_cd, p, tires);
  const auto k3 = state_derivative_unchecked(s + (0.5 * dt) * k2, u, alpha_cd, p, tires);
  const auto k4 = state_derivative_unchecked(s + dt * k3, u, alpha_cd, p, tires);
  return s + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// One checked step with the dynamic model. Throws DomainError if any stage
// evaluation falls below vx_min, std::invalid_argument if dt <= 0.
VehicleState integrate(const VehicleState& s, const ControlInput& u, double alpha_cd, double dt,
                       const VehicleParams& p, const TireCoefficients& tires, Integrator method = Integrator::RK4);

// Plant-side derivative: dynamic model for vx >= vx_min, otherwise a
// kinematic fallback without slip angles that cannot reverse the car.
VehicleState plant_derivative(const VehicleState& s, const ControlInput& u, double alpha_cd, const VehicleParams& p,
                              const TireCoefficients& tires);
VehicleState plant_rk4_step(const VehicleState& s, const ControlInput& u, double alpha_cd, double dt,
                            const VehicleParams& p, const TireCoefficients& tires);

ControlInput clamp_control(const ControlInput& u, const VehicleParams& p);

}  // namespace racing
