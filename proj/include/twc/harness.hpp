#pragma once

// Run orchestration shared by the command line tool and the test suites:
// training with checkpoints and an iteration log, evaluation, and traced
// rollouts.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "twc/checkpoint.hpp"
#include "twc/config.hpp"
#include "twc/io.hpp"
#include "twc/parameters.hpp"
#include "twc/policy.hpp"
#include "twc/search.hpp"

namespace twc {

inline constexpr const char* kLogFile = "iteration_log.csv";
inline constexpr const char* kCheckpointFile = "checkpoint.txt";
inline constexpr const char* kParamsFile = "params.txt";

// Validated configuration with its wiring resolved.
struct RunContext {
  RunConfig config;
  std::string wiring_text;
  Topology topology;
  InterfaceMapping mapping;
  ParameterBounds bounds;
  std::uint64_t hash;

  ArtifactHeader header(std::string kind, std::uint64_t seed) const;
};

// Appends a final newline when missing so the text survives embedding.
std::string normalize_text(std::string text);

RunContext make_context(RunConfig config, std::string wiring_text);
// Reads config.wiring; a relative path that does not exist is also tried
// under `fallback_dir`.
RunContext load_context(RunConfig config, const std::string& fallback_dir = {});

// Starting point named by config.init: "uniform" (drawn from `rng`),
// "midrange", or a parameter file path.
Eigen::VectorXd initial_parameters(const RunContext& ctx, Rng& rng);

// Runs or continues a search, writing the iteration log, a checkpoint every
// checkpoint_every iterations and at the end, and the final parameter file
// into config.output_dir. When resuming, the checkpoint must carry the same
// config hash; the log is cut back to the checkpoint iteration first.
Checkpoint train(const RunContext& ctx, const std::optional<Checkpoint>& resume = std::nullopt,
                 std::ostream* progress = nullptr);

struct EvaluationSummary {
  std::vector<double> returns;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double objective = 0.0;  // configured estimator over the returns
};

EvaluationSummary summarize_returns(std::vector<double> returns, const SearchConfig& cfg);

// Episode seeds are drawn from Rng(seed) exactly as in an objective
// estimate, so circuit and baseline evaluations with equal seeds face the
// same initial states.
EvaluationSummary evaluate_circuit(const RunContext& ctx, const Eigen::VectorXd& theta, int episodes,
                                   std::uint64_t seed, int jobs = 1);

enum class BaselineKind { kPd, kZero };
EvaluationSummary evaluate_baseline(const RunContext& ctx, BaselineKind kind, int episodes, std::uint64_t seed,
                                    int jobs = 1);

CircuitPolicy make_policy(const RunContext& ctx, const Eigen::VectorXd& theta);

RolloutResult trace_circuit(const RunContext& ctx, const Eigen::VectorXd& theta, std::uint64_t seed);
RolloutResult trace_baseline(const RunContext& ctx, BaselineKind kind, std::uint64_t seed);

// Writes <stem>.csv and <stem>.svg. Returns the CSV path.
std::string write_trace(const RunContext& ctx, const RolloutResult& result, std::uint64_t seed,
                        const std::string& dir, const std::string& stem);

}  // namespace twc
