#pragma once

// Flat `key = value` run configuration.
//
// Every artifact embeds the canonical serialization of the configuration and
// a hash over its behaviour-defining keys plus the wiring text. Run-control
// keys (output location, iteration and time budgets, checkpoint cadence,
// thread count) are excluded from the hash, so a run resumed with a larger
// budget stays hash-compatible with the original.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "twc/cartpole.hpp"
#include "twc/circuit.hpp"
#include "twc/mapping.hpp"
#include "twc/policy.hpp"
#include "twc/search.hpp"
#include "twc/solver.hpp"

namespace twc {

struct SensorySpec {
  ObservedVariable variable;
  std::string pos_neuron;
  std::string neg_neuron;
  double x_min;
  double x_max;
};

struct MotorSpec {
  std::string pos_neuron = "FWD";
  std::string neg_neuron = "REV";
  double y_min = -1.0;
  double y_max = 1.0;
};

struct MappingConfig {
  std::vector<SensorySpec> sensory = {
      {ObservedVariable::kAngle, "PLM", "AVM", -0.1, 0.1},
      {ObservedVariable::kAngularVelocity, "ALM", "PVD", -0.5, 0.5},
  };
  MotorSpec motor;

  InterfaceMapping resolve(const Topology& topo) const;
};

struct RunConfig {
  EnvParams env;
  SolverConfig solver;
  SigmoidSign sigmoid_sign = SigmoidSign::kIncreasing;
  MappingConfig mapping;
  SearchConfig search;
  PdGains pd;
  std::string wiring = "data/tw_circuit.wiring";
  std::string init = "uniform";  // uniform | midrange | path to a parameter file
  std::string output_dir = "runs/default";
  long checkpoint_every = 100;
  bool log_timing = true;
  int jobs = 1;

  void validate() const;
};

// Applies `key = value` lines on top of `base`. Throws ConfigError naming the
// line for unknown keys or malformed values.
RunConfig parse_config(std::string_view text, RunConfig base = {});
RunConfig load_config(const std::string& path, RunConfig base = {});

// Applies one `key=value` override.
void apply_override(RunConfig& config, std::string_view assignment);

// Canonical text, one `key = value` per line in a fixed key order.
std::string serialize_config(const RunConfig& config, bool behaviour_only = false);

std::uint64_t config_hash(const RunConfig& config, std::string_view wiring_text);

std::vector<std::string> config_keys();

}  // namespace twc
