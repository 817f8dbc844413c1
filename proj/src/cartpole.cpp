#include "twc/cartpole.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "twc/error.hpp"

namespace twc {

void EnvParams::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("env.") + what + " must be positive");
  };
  positive(cart_mass, "cart_mass");
  positive(pole_mass, "pole_mass");
  positive(pole_half_length, "pole_half_length");
  positive(gravity, "gravity");
  positive(force_max, "force_max");
  positive(track_limit, "track_limit");
  positive(angle_limit, "angle_limit");
  positive(env_dt, "env_dt");
  if (!(init_angle_spread >= 0.0)) throw ConfigError("env.init_angle_spread must be non-negative");
  if (horizon < 1) throw ConfigError("env.horizon must be at least 1");
  if (!(angle_limit < std::numbers::pi / 2)) throw ConfigError("env.angle_limit must be below pi/2");
}

Observation observe(const EnvState& s) {
  return {s.x, s.x_dot, std::sin(s.phi), std::cos(s.phi), s.phi_dot};
}

Eigen::Vector4d cartpole_dynamics(const EnvState& s, double force, const EnvParams& p) {
  const double total_mass = p.cart_mass + p.pole_mass;
  const double pole_moment = p.pole_mass * p.pole_half_length;
  const double sin_phi = std::sin(s.phi);
  const double cos_phi = std::cos(s.phi);
  const double temp = (force + pole_moment * s.phi_dot * s.phi_dot * sin_phi) / total_mass;
  const double phi_acc = (p.gravity * sin_phi - cos_phi * temp) /
                         (p.pole_half_length * (4.0 / 3.0 - p.pole_mass * cos_phi * cos_phi / total_mass));
  const double x_acc = temp - pole_moment * phi_acc * cos_phi / total_mass;
  return {s.x_dot, x_acc, s.phi_dot, phi_acc};
}

EnvState env_reset(const EnvParams& p, Rng& rng) {
  EnvState s;
  const double offset = p.init_angle_spread > 0.0 ? rng.uniform(-p.init_angle_spread, p.init_angle_spread) : 0.0;
  s.phi = (p.mode == TaskMode::kSwingup ? std::numbers::pi : 0.0) + offset;
  return s;
}

bool is_terminal(const EnvState& s, const EnvParams& p) {
  if (s.step_count >= p.horizon) return true;
  if (p.track_termination && std::abs(s.x) > p.track_limit) return true;
  if (p.mode == TaskMode::kStabilize && std::abs(s.phi) > p.angle_limit) return true;
  return false;
}

StepResult env_step(const EnvState& s, double action, const EnvParams& p) {
  if (is_terminal(s, p)) throw ConfigError("env_step called on a terminal state");
  if (!std::isfinite(action)) throw ConfigError("non-finite action");
  const double force = std::clamp(action, -1.0, 1.0) * p.force_max;

  auto add = [](const EnvState& base, const Eigen::Vector4d& d, double h) {
    EnvState out = base;
    out.x += h * d(0);
    out.x_dot += h * d(1);
    out.phi += h * d(2);
    out.phi_dot += h * d(3);
    return out;
  };
  const double h = p.env_dt;
  const Eigen::Vector4d k1 = cartpole_dynamics(s, force, p);
  const Eigen::Vector4d k2 = cartpole_dynamics(add(s, k1, h / 2), force, p);
  const Eigen::Vector4d k3 = cartpole_dynamics(add(s, k2, h / 2), force, p);
  const Eigen::Vector4d k4 = cartpole_dynamics(add(s, k3, h), force, p);
  EnvState next = add(s, (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0, h);
  next.step_count = s.step_count + 1;

  const double reward = p.mode == TaskMode::kSwingup ? 0.5 * (1.0 + std::cos(next.phi)) : 1.0;
  return {next, observe(next), reward, is_terminal(next, p)};
}

}  // namespace twc
