#include "racing/nmpc_config.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

#include "racing/key_value.hpp"

namespace racing {

namespace {

using WeightField = std::pair<const char*, double CostWeights::*>;
using RealField = std::pair<const char*, double ControllerConfig::*>;
using IntField = std::pair<const char*, int ControllerConfig::*>;

constexpr WeightField kWeightFields[] = {
    {"k_pt", &CostWeights::k_pt},         {"k_ot", &CostWeights::k_ot},
    {"k_dt", &CostWeights::k_dt},         {"k_st", &CostWeights::k_st},
    {"S_do", &CostWeights::S_do},         {"K_do", &CostWeights::K_do},
    {"alpha_safe", &CostWeights::alpha_safe}, {"T_d", &CostWeights::T_d},
    {"d_offset", &CostWeights::d_offset}, {"lane_penalty", &CostWeights::lane_penalty},
    {"lane_buffer", &CostWeights::lane_buffer},
};

constexpr RealField kRealFields[] = {
    {"dt", &ControllerConfig::dt},
    {"grad_tol", &ControllerConfig::grad_tol},
    {"cost_tol", &ControllerConfig::cost_tol},
    {"contour_weight", &ControllerConfig::contour_weight},
    {"lag_weight", &ControllerConfig::lag_weight},
    {"pursuit_lookahead", &ControllerConfig::pursuit_lookahead},
    {"pursuit_speed_gain", &ControllerConfig::pursuit_speed_gain},
};

constexpr IntField kIntFields[] = {
    {"N", &ControllerConfig::N},
    {"r_proj", &ControllerConfig::r_proj},
    {"max_iterations", &ControllerConfig::max_iterations},
    {"lbfgs_memory", &ControllerConfig::lbfgs_memory},
};

}  // namespace

void ControllerConfig::validate() const {
  const auto& w = weights;
  if (!(w.k_pt > 0.0)) throw std::invalid_argument("controller: k_pt must be positive");
  if (!(w.k_ot >= 0.0 && w.k_dt >= 0.0 && w.k_st >= 0.0 && w.S_do >= 0.0 && w.lane_penalty >= 0.0 &&
        w.lane_buffer >= 0.0))
    throw std::invalid_argument("controller: k_ot, k_dt, k_st, S_do, lane_penalty, lane_buffer must be non-negative");
  if (!(w.K_do > 0.0 && w.T_d > 0.0 && w.d_offset >= 0.0))
    throw std::invalid_argument("controller: K_do, T_d must be positive and d_offset non-negative");
  if (!(w.alpha_safe > 0.0)) throw std::invalid_argument("controller: alpha_safe must be positive");
  if (N < 1) throw std::invalid_argument("controller: N must be at least 1");
  if (!(dt > 0.0)) throw std::invalid_argument("controller: dt must be positive");
  if (r_proj < 1) throw std::invalid_argument("controller: r_proj must be at least 1");
  if (max_iterations < 0 || lbfgs_memory < 1) throw std::invalid_argument("controller: invalid solver settings");
}

ControllerConfig controller_config_from_text(const std::string& text, const std::string& source, ControllerConfig c) {
  for (const auto& e : parse_key_value_text(text, source)) {
    bool found = false;
    for (const auto& [name, member] : kWeightFields)
      if (e.key == name) c.weights.*member = parse_double(e, source), found = true;
    for (const auto& [name, member] : kRealFields)
      if (e.key == name) c.*member = parse_double(e, source), found = true;
    for (const auto& [name, member] : kIntFields)
      if (e.key == name) c.*member = parse_int(e, source), found = true;
    if (e.key == "model_integrator") {
      if (e.value == "euler") c.model_integrator = Integrator::Euler;
      else if (e.value == "rk4") c.model_integrator = Integrator::RK4;
      else throw ParseError(source, e.line, "model_integrator must be 'euler' or 'rk4'");
      found = true;
    }
    if (e.key == "progress_mode") {
      if (e.value == "progress") c.progress_mode = ProgressMode::Progress;
      else if (e.value == "contouring") c.progress_mode = ProgressMode::Contouring;
      else throw ParseError(source, e.line, "progress_mode must be 'progress' or 'contouring'");
      found = true;
    }
    if (e.key == "draft_model") c.draft_model = parse_bool(e, source), found = true;
    if (!found) throw ParseError(source, e.line, "unknown controller setting '" + e.key + "'");
  }
  c.validate();
  return c;
}

ControllerConfig load_controller_config(const std::string& path, ControllerConfig base) {
  return controller_config_from_text(read_text_file(path), path, std::move(base));
}

std::string to_key_value(const ControllerConfig& c) {
  std::ostringstream out;
  out.precision(17);
  for (const auto& [name, member] : kWeightFields) out << name << " = " << c.weights.*member << '\n';
  for (const auto& [name, member] : kRealFields) out << name << " = " << c.*member << '\n';
  for (const auto& [name, member] : kIntFields) out << name << " = " << c.*member << '\n';
  out << "model_integrator = " << (c.model_integrator == Integrator::Euler ? "euler" : "rk4") << '\n';
  out << "progress_mode = " << (c.progress_mode == ProgressMode::Progress ? "progress" : "contouring") << '\n';
  out << "draft_model = " << (c.draft_model ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace racing
