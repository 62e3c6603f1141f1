#pragma once

#include <string>

#include "racing/vehicle_dynamics.hpp"

namespace racing {

struct CostWeights {
  double k_pt = 1.0;  // progress reward, applied with a negative sign
  double k_ot = 0.25;
  double k_dt = 2.0;
  double k_st = 1000.0;
  double S_do = 0.5;   // 1/m
  double K_do = 15.0;  // m
  double alpha_safe = 0.1;  // rad
  double T_d = 40.0;        // m
  double d_offset = 3.8;    // m, opponent width + ego width
  double lane_penalty = 1e3;
  double lane_buffer = 0.5;  // m, penalty starts this far inside the boundary
};

enum class ProgressMode { Progress, Contouring };

struct ControllerConfig {
  CostWeights weights;
  int N = 25;
  double dt = 0.04;
  int r_proj = 3;
  int max_iterations = 60;
  int lbfgs_memory = 8;
  double grad_tol = 1e-4;
  double cost_tol = 1e-8;
  Integrator model_integrator = Integrator::Euler;
  ProgressMode progress_mode = ProgressMode::Progress;
  // Contouring ablation: contour_weight * D^2 - lag_weight * arc advance.
  double contour_weight = 1.0;
  double lag_weight = 25.0;
  bool draft_model = true;
  double pursuit_lookahead = 15.0;  // m, minimum pursuit distance
  double pursuit_speed_gain = 0.5;  // drive command per m/s of speed error

  void validate() const;
};

ControllerConfig controller_config_from_text(const std::string& text, const std::string& source,
                                             ControllerConfig base = {});
ControllerConfig load_controller_config(const std::string& path, ControllerConfig base = {});
std::string to_key_value(const ControllerConfig& c);

}  // namespace racing
