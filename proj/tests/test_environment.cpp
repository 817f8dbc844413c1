#include <doctest.h>

#include <cmath>
#include <numbers>

#include "twc/cartpole.hpp"
#include "twc/error.hpp"
#include "twc/policy.hpp"

#include "oracles.hpp"

using namespace twc;
using doctest::Approx;

namespace {

EnvParams free_swinging() {
  EnvParams p;
  p.mode = TaskMode::kSwingup;
  p.track_termination = false;
  p.horizon = 100000;
  return p;
}

}  // namespace

TEST_CASE("equilibria have zero derivatives") {
  const EnvParams p;
  CHECK(cartpole_dynamics(EnvState{}, 0.0, p).isZero(0.0));
  EnvState down;
  down.phi = std::numbers::pi;
  CHECK(cartpole_dynamics(down, 0.0, p).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("positive force accelerates the cart forward and tips the pole back") {
  const EnvParams p;
  const Eigen::Vector4d d = cartpole_dynamics(EnvState{}, 5.0, p);
  CHECK(d[1] > 0.0);
  CHECK(d[3] < 0.0);
  EnvState tilted;
  tilted.phi = 0.1;
  CHECK(cartpole_dynamics(tilted, 0.0, p)[3] > 0.0);
}

TEST_CASE("zero force conserves mechanical energy") {
  const EnvParams p = free_swinging();
  Rng rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    EnvState s;
    s.x_dot = rng.uniform(-2.0, 2.0);
    s.phi = rng.uniform(-std::numbers::pi, std::numbers::pi);
    s.phi_dot = rng.uniform(-3.0, 3.0);
    const double e0 = oracle::mechanical_energy(s, p);
    double drift = 0.0;
    for (int k = 0; k < 1000; ++k) {
      s = env_step(s, 0.0, p).state;
      drift = std::max(drift, std::abs(oracle::mechanical_energy(s, p) - e0) / e0);
    }
    CHECK(drift < 1e-4);
  }
}

TEST_CASE("reset distribution") {
  EnvParams p;
  Rng rng(4);
  double sum = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const EnvState s = env_reset(p, rng);
    CHECK(s.x == 0.0);
    CHECK(s.x_dot == 0.0);
    CHECK(s.phi_dot == 0.0);
    CHECK(s.step_count == 0);
    CHECK(std::abs(s.phi) <= p.init_angle_spread);
    sum += s.phi;
  }
  CHECK(std::abs(sum / 10000) < 0.002);

  p.init_angle_spread = 0.0;
  CHECK(env_reset(p, rng).phi == 0.0);

  EnvParams q;
  Rng a(99), b(99);
  CHECK(env_reset(q, a).phi == env_reset(q, b).phi);
  q.mode = TaskMode::kSwingup;
  CHECK(std::abs(env_reset(q, a).phi - std::numbers::pi) <= q.init_angle_spread);
}

TEST_CASE("upright rest step") {
  const EnvParams p;
  const StepResult r = env_step(EnvState{}, 0.0, p);
  CHECK(r.reward == 1.0);
  CHECK_FALSE(r.done);
  CHECK(r.state.x == 0.0);
  CHECK(r.state.phi == 0.0);
  CHECK(r.state.step_count == 1);
}

TEST_CASE("termination conditions") {
  const EnvParams p;
  EnvState s;
  s.phi = p.angle_limit - 1e-4;
  s.phi_dot = 0.5;
  const StepResult r = env_step(s, 0.0, p);
  CHECK(r.state.phi > p.angle_limit);
  CHECK(r.done);
  CHECK_THROWS_AS(env_step(r.state, 0.0, p), ConfigError);

  EnvState edge;
  edge.x = p.track_limit - 1e-4;
  edge.x_dot = 1.0;
  CHECK(env_step(edge, 0.0, p).done);
  EnvParams no_track = p;
  no_track.track_termination = false;
  CHECK_FALSE(env_step(edge, 0.0, no_track).done);

  EnvState last;
  last.step_count = p.horizon - 1;
  CHECK(env_step(last, 0.0, p).done);
}

TEST_CASE("action is clipped and must be finite") {
  const EnvParams p;
  EnvState s;
  s.phi = 0.03;
  CHECK(env_step(s, 7.0, p).state.x_dot == env_step(s, 1.0, p).state.x_dot);
  CHECK(env_step(s, -3.0, p).state.x_dot == env_step(s, -1.0, p).state.x_dot);
  CHECK_THROWS_AS(env_step(s, std::nan(""), p), ConfigError);
}

TEST_CASE("observation encodes the angle on the unit circle") {
  Rng rng(8);
  for (int i = 0; i < 1000; ++i) {
    EnvState s;
    s.phi = rng.uniform(-10.0, 10.0);
    const Observation o = observe(s);
    CHECK(std::abs(o.sin_phi * o.sin_phi + o.cos_phi * o.cos_phi - 1.0) < 1e-12);
  }
}

TEST_CASE("episode returns and determinism") {
  const EnvParams p;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    CartPoleEnv env(p);
    ZeroController zero;
    Rng rng(seed);
    const RolloutResult r = rollout(env, zero, rng, true);
    CHECK(r.total_return >= 1.0);
    CHECK(r.total_return <= p.horizon);
    CHECK(r.total_return < p.horizon);  // the unactuated pole falls

    CartPoleEnv env2(p);
    Rng rng2(seed);
    const RolloutResult r2 = rollout(env2, zero, rng2, true);
    REQUIRE(r2.trace.size() == r.trace.size());
    CHECK(r2.trace.back().env.phi == r.trace.back().env.phi);
  }
}

TEST_CASE("swingup rewards height") {
  EnvParams p;
  p.mode = TaskMode::kSwingup;
  EnvState down;
  down.phi = std::numbers::pi;
  CHECK(env_step(down, 0.0, p).reward == Approx(0.0).epsilon(1e-12));
  CHECK(env_step(EnvState{}, 0.0, p).reward == 1.0);
  EnvState side;
  side.phi = 1.5;
  CHECK_FALSE(env_step(side, 0.0, p).done);
}

TEST_CASE("parameter validation") {
  EnvParams p;
  p.pole_mass = 0.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.horizon = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = {};
  p.angle_limit = 2.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}
