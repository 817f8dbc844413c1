#include <doctest.h>

#include <cmath>

#include "twc/error.hpp"
#include "twc/parameters.hpp"
#include "twc/solver.hpp"
#include "twc/wiring.hpp"

using namespace twc;
using doctest::Approx;

namespace {

CircuitModel isolated(double c, double g, double vl) {
  return CircuitModel(Topology({{"N", NeuronRole::kInter}}, {}, {}), CircuitParameters{{{c, g, vl}}, {}, {}});
}

CircuitState at(std::initializer_list<double> v) {
  CircuitState s{Eigen::VectorXd(static_cast<Eigen::Index>(v.size())), 0.0};
  Eigen::Index i = 0;
  for (const double x : v) s.v[i++] = x;
  return s;
}

ClampMap fixed_clamp(const Topology& topo) {
  ClampMap clamp;
  const double values[] = {-0.020, -0.070, -0.045, -0.060};
  int k = 0;
  for (const int id : topo.sensory_neurons()) clamp.emplace_back(id, values[k++ % 4]);
  return clamp;
}

}  // namespace

TEST_CASE("implicit step keeps the leak fixed point") {
  const auto model = isolated(0.3, 2.0, -0.055);
  for (const double dt : {1e-6, 0.01, 1.0, 1e3})
    CHECK(step_implicit(at({-0.055}), model, {}, dt).v[0] == Approx(-0.055).epsilon(1e-15));
}

TEST_CASE("implicit step hand-evaluated example") {
  const auto next = step_implicit(at({-0.020}), isolated(0.1, 1.0, -0.070), {}, 0.1);
  CHECK(next.v[0] == Approx(-0.045).epsilon(1e-14));
  CHECK(next.t == Approx(0.1));
}

TEST_CASE("explicit reference matches the closed-form leak decay") {
  const double c = 0.1, g = 1.0, vl = -0.070, v0 = -0.020, dt = 1e-6;
  const auto model = isolated(c, g, vl);
  CircuitState s = at({v0});
  double worst = 0.0;
  for (int k = 1; k <= 300000; ++k) {
    s = step_explicit_reference(s, model, {}, dt);
    if (k % 1000 == 0) worst = std::max(worst, std::abs(s.v[0] - (vl + (v0 - vl) * std::exp(-g * k * dt / c))));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("explicit step on the two-neuron example") {
  const CircuitModel model(Topology({{"A", NeuronRole::kInter}, {"B", NeuronRole::kMotor}}, {}, {{0, 1}}),
                           CircuitParameters{{{0.2, 0.5, -0.060}, {0.05, 1.5, -0.080}}, {}, {0.8}});
  const auto next = step_explicit_reference(at({-0.030, -0.075}), model, {}, 1e-3);
  CHECK(next.v[0] == Approx(-0.030 - 0.255e-3).epsilon(1e-13));
  CHECK(next.v[1] == Approx(-0.075 + 0.57e-3).epsilon(1e-13));
  // zero-derivative state stays put
  const auto rest = step_explicit_reference(at({-0.060, -0.080}),
                                            CircuitModel(model.topology(), CircuitParameters{{{0.2, 0.5, -0.060}, {0.05, 1.5, -0.080}}, {}, {0.0}}),
                                            {}, 1e-3);
  CHECK(rest.v[0] == -0.060);
  CHECK(rest.v[1] == -0.080);
}

TEST_CASE("implicit contraction holds where explicit Euler fails") {
  const double c = 0.1, g = 1.0, vl = -0.070;
  const auto model = isolated(c, g, vl);
  const double dt = 3.0 * c / g;  // beyond the explicit limit 2C/G
  const auto e = step_explicit_reference(at({-0.050}), model, {}, dt);
  const auto i = step_implicit(at({-0.050}), model, {}, dt);
  CHECK(std::abs(e.v[0] - vl) > 0.020);
  CHECK(std::abs(i.v[0] - vl) <= 0.020);
}

TEST_CASE("simulate counts steps") {
  const auto model = isolated(0.1, 1.0, -0.07);
  const SolverConfig cfg{0.01, 1};
  CHECK(simulate(at({-0.03}), model, {}, 0.0, cfg).size() == 1);
  const auto traj = simulate(at({-0.03}), model, {}, 0.1, cfg);
  REQUIRE(traj.size() == 11);
  for (std::size_t k = 1; k < traj.size(); ++k) {
    CHECK(traj[k].t > traj[k - 1].t);
    CHECK(traj[k].v == step_implicit(traj[k - 1], model, {}, 0.01).v);
  }
  CHECK_THROWS_AS(simulate(at({-0.03}), model, {}, -1.0, cfg), ConfigError);
  CHECK_THROWS_AS(simulate(at({-0.03}), model, {}, 1.0, SolverConfig{0.0, 1}), ConfigError);
}

TEST_CASE("default circuit settles under constant clamps") {
  const Topology topo = load_wiring(TWC_DATA_DIR "/tw_circuit.wiring");
  const CircuitModel model(topo, unflatten(midrange_parameters(parameter_bounds(topo)), topo));
  const ClampMap clamp = fixed_clamp(topo);
  CircuitState s = resting_state(model, clamp);
  double change = 1.0;
  int steps = 0;
  for (; steps < 100000 && change >= 1e-9; ++steps) {
    const CircuitState next = step_implicit(s, model, clamp, 0.01);
    change = (next.v - s.v).cwiseAbs().maxCoeff();
    s = next;
  }
  CHECK(change < 1e-9);
  CHECK(within_envelope(s, topo));
}

TEST_CASE("clamps hold exactly and steps are deterministic") {
  const Topology topo = load_wiring(TWC_DATA_DIR "/tw_circuit.wiring");
  Rng rng(9);
  const CircuitModel model(topo, unflatten(uniform_parameters(parameter_bounds(topo), rng), topo));
  const ClampMap clamp = fixed_clamp(topo);
  CircuitState a = resting_state(model, clamp), b = a;
  for (int k = 0; k < 200; ++k) {
    a = step_implicit(a, model, clamp, 0.01);
    b = step_implicit(b, model, clamp, 0.01);
    for (const auto& [id, value] : clamp) CHECK(a.v[id] == value);
  }
  CHECK(a.v == b.v);
}

TEST_CASE("clamp validation") {
  const Topology topo = load_wiring(TWC_DATA_DIR "/tw_circuit.wiring");
  const CircuitModel model(topo, unflatten(midrange_parameters(parameter_bounds(topo)), topo));
  ClampMap clamp = fixed_clamp(topo);
  const CircuitState s = resting_state(model, clamp);

  ClampMap missing(clamp.begin(), clamp.end() - 1);
  CHECK_THROWS_AS(step_implicit(s, model, missing, 0.01), ConfigError);
  ClampMap twice = clamp;
  twice.back().first = twice.front().first;
  CHECK_THROWS_AS(step_implicit(s, model, twice, 0.01), ConfigError);
  ClampMap wrong = clamp;
  wrong.back().first = topo.index_of("AVA");
  CHECK_THROWS_AS(step_implicit(s, model, wrong, 0.01), ConfigError);

  ClampMap bad = clamp;
  bad.front().second = std::nan("");
  CHECK_THROWS_AS(step_implicit(s, model, bad, 0.01), DivergenceError);
}

TEST_CASE("envelope check") {
  const Topology topo({{"N", NeuronRole::kInter}}, {}, {});
  CHECK(within_envelope(at({-0.05}), topo));
  CHECK_FALSE(within_envelope(at({0.05}), topo));
  CHECK_FALSE(within_envelope(at({-0.2}), topo));
}
