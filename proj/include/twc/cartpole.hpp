#pragma once

// Frictionless cart with a uniform pole hinged on top, integrated with RK4.
// The pole angle phi is measured from upright; positive force pushes the cart
// toward +x and counteracts a positive phi.

#include <Eigen/Dense>

#include "twc/random.hpp"

namespace twc {

enum class TaskMode {
  kStabilize,  // start near upright, 1 reward per step, angle termination
  kSwingup,    // start hanging, reward (1 + cos phi) / 2, no angle termination
};

struct EnvParams {
  double cart_mass = 1.0;         // kg
  double pole_mass = 0.1;         // kg
  double pole_half_length = 0.5;  // m
  double gravity = 9.81;          // m/s^2
  double force_max = 10.0;        // N
  double track_limit = 2.4;       // m
  double angle_limit = 0.2;       // rad
  int horizon = 1000;             // steps
  double env_dt = 0.02;           // s
  double init_angle_spread = 0.05;  // rad
  bool track_termination = true;
  TaskMode mode = TaskMode::kStabilize;

  void validate() const;
};

struct EnvState {
  double x = 0.0;
  double x_dot = 0.0;
  double phi = 0.0;
  double phi_dot = 0.0;
  int step_count = 0;
};

struct Observation {
  double x;
  double x_dot;
  double sin_phi;
  double cos_phi;
  double phi_dot;
};

Observation observe(const EnvState& s);

// (x_dot, x_ddot, phi_dot, phi_ddot)
Eigen::Vector4d cartpole_dynamics(const EnvState& s, double force, const EnvParams& p);

EnvState env_reset(const EnvParams& p, Rng& rng);

struct StepResult {
  EnvState state;
  Observation observation;
  double reward;
  bool done;
};

bool is_terminal(const EnvState& s, const EnvParams& p);

// `action` is clipped to [-1, 1] and scaled by force_max. Throws ConfigError
// when `s` is already terminal.
StepResult env_step(const EnvState& s, double action, const EnvParams& p);

// Stateful wrapper used by closed-loop rollouts.
class CartPoleEnv {
 public:
  explicit CartPoleEnv(EnvParams params) : params_(params) { params_.validate(); }

  Observation reset(Rng& rng) {
    state_ = env_reset(params_, rng);
    return observe(state_);
  }
  StepResult step(double action) {
    StepResult r = env_step(state_, action, params_);
    state_ = r.state;
    return r;
  }
  const EnvState& state() const { return state_; }
  int horizon() const { return params_.horizon; }
  const EnvParams& params() const { return params_; }

 private:
  EnvParams params_;
  EnvState state_;
};

}  // namespace twc
