#pragma once

// Load-dependent Magic Formula for steady-state lateral tire force.

#include <cmath>
#include <string>

#include "racing/dual.hpp"

namespace racing {

struct TireCoefficients {
  double PHy1 = 0.0;
  double PHy2 = 0.0;
  double PVy1 = 0.0;
  double PVy2 = 0.0;
  double PCy1 = 1.35;
  double PDy1 = 1.5;
  double PDy2 = -0.08;
  double PEy1 = -0.2;
  double PEy2 = -0.1;
  double PEy3 = 0.0;
  double PEy4 = 0.0;
  double PKy1 = 30.0;
  double PKy2 = 1.6;
  double Fz0 = 4000.0;  // N
  double eps_y = 1e-6;

  // Throws std::invalid_argument when Fz0, eps_y or PCy1 are not positive.
  void validate() const;
};

TireCoefficients load_tire_coefficients(const std::string& path);
TireCoefficients tire_coefficients_from_text(const std::string& text, const std::string& source);
std::string to_key_value(const TireCoefficients& c);

inline double sign_of(double x) { return (x > 0.0) - (x < 0.0); }

// Lateral force in N for slip angle `alpha` (rad) at vertical load `Fz` (N).
template <class T>
T lateral_force(const T& alpha, const T& Fz, const TireCoefficients& c) {
  using std::atan;
  using std::sin;
  const T dfz = (Fz - c.Fz0) / c.Fz0;
  const T S_Hy = c.PHy1 + c.PHy2 * dfz;
  const T S_Vy = Fz * (c.PVy1 + c.PVy2 * dfz);
  const T alpha_y = alpha + S_Hy;
  const double C_y = c.PCy1;
  const T mu_y = c.PDy1 + c.PDy2 * dfz;
  const T D_y = mu_y * Fz;
  // sgn(0) = 0 keeps E_y symmetric at the origin.
  const double sgn = sign_of(value(alpha_y));
  const T E_y = (c.PEy1 + c.PEy2 * dfz + c.PEy3 * dfz * dfz) * (1.0 - c.PEy4 * sgn);
  const T K_ya = c.PKy1 * c.Fz0 * sin(2.0 * atan(Fz / (c.PKy2 * c.Fz0)));
  const T B_y = K_ya / (C_y * D_y + c.eps_y);
  const T Ba = B_y * alpha_y;
  return D_y * sin(C_y * atan(Ba - E_y * (Ba - atan(Ba)))) + S_Vy;
}

// Slip angle in [0, 0.5] rad maximizing lateral_force at load Fz; golden
// section search to 1e-6.
double peak_slip(double Fz, const TireCoefficients& c);

}  // namespace racing
