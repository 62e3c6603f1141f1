#include "racing/tire_model.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

#include "racing/key_value.hpp"

namespace racing {

namespace {

using Field = std::pair<const char*, double TireCoefficients::*>;

constexpr Field kFields[] = {
    {"PHy1", &TireCoefficients::PHy1}, {"PHy2", &TireCoefficients::PHy2}, {"PVy1", &TireCoefficients::PVy1},
    {"PVy2", &TireCoefficients::PVy2}, {"PCy1", &TireCoefficients::PCy1}, {"PDy1", &TireCoefficients::PDy1},
    {"PDy2", &TireCoefficients::PDy2}, {"PEy1", &TireCoefficients::PEy1}, {"PEy2", &TireCoefficients::PEy2},
    {"PEy3", &TireCoefficients::PEy3}, {"PEy4", &TireCoefficients::PEy4}, {"PKy1", &TireCoefficients::PKy1},
    {"PKy2", &TireCoefficients::PKy2}, {"Fz0", &TireCoefficients::Fz0},   {"eps_y", &TireCoefficients::eps_y},
};

}  // namespace

void TireCoefficients::validate() const {
  if (!(Fz0 > 0.0)) throw std::invalid_argument("tire: Fz0 must be positive");
  if (!(eps_y > 0.0)) throw std::invalid_argument("tire: eps_y must be positive");
  if (!(PCy1 > 0.0)) throw std::invalid_argument("tire: PCy1 must be positive");
}

TireCoefficients tire_coefficients_from_text(const std::string& text, const std::string& source) {
  TireCoefficients c;
  for (const auto& e : parse_key_value_text(text, source)) {
    bool found = false;
    for (const auto& [name, member] : kFields) {
      if (e.key == name) {
        c.*member = parse_double(e, source);
        found = true;
        break;
      }
    }
    if (!found) throw ParseError(source, e.line, "unknown tire coefficient '" + e.key + "'");
  }
  c.validate();
  return c;
}

TireCoefficients load_tire_coefficients(const std::string& path) {
  return tire_coefficients_from_text(read_text_file(path), path);
}

std::string to_key_value(const TireCoefficients& c) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [name, member] : kFields) out << name << " = " << c.*member << '\n';
  return out.str();
}

double peak_slip(double Fz, const TireCoefficients& c) {
  constexpr double kInvPhi = 0.6180339887498949;
  double lo = 0.0;
  double hi = 0.5;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = lateral_force(x1, Fz, c);
  double f2 = lateral_force(x2, Fz, c);
  while (hi - lo > 1e-6) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = lateral_force(x2, Fz, c);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = lateral_force(x1, Fz, c);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace racing
