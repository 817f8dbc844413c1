#pragma once

// Random search with a decaying objective indicator.
//
// The minimized indicator is f(theta) = -OE(theta), where the objective
// estimate OE averages the k lowest of N episode returns. A candidate replaces
// the incumbent only when its indicator is strictly lower. The incumbent's
// estimate is trusted for a limited number of comparisons (the reuse limit M)
// and then re-measured, so one lucky estimate cannot block progress forever.

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "twc/cartpole.hpp"
#include "twc/parameters.hpp"
#include "twc/policy.hpp"
#include "twc/random.hpp"

namespace twc {

enum class EstimatorMode { kWorstK, kMean, kMin };

std::string_view to_string(EstimatorMode mode);
std::optional<EstimatorMode> parse_estimator(std::string_view text);

struct SearchConfig {
  int episodes = 10;                 // N
  int worst_k = 3;                   // k
  int reuse_limit = 10;              // M
  long max_iterations = 2000;
  double max_wall_clock_s = 0.0;     // 0 disables the limit
  double perturbation_scale = 0.05;  // fraction of each bound width
  std::uint64_t seed = 1;
  EstimatorMode estimator = EstimatorMode::kWorstK;

  void validate() const;
};

struct ObjectiveEstimate {
  double value = 0.0;
  int n_samples = 0;
  int k_worst = 0;
  int uses = 0;
};

// Aggregates episode returns: mean of the k lowest, the mean, or the minimum.
ObjectiveEstimate estimate_from_returns(std::vector<double> returns, int k, EstimatorMode mode);

using EpisodeFn = std::function<double(std::uint64_t seed)>;

// Draws one seed per episode from `rng`, then evaluates the episodes on up to
// `jobs` threads. returns[i] belongs to the i-th drawn seed whatever `jobs` is.
std::vector<double> episode_returns(const EpisodeFn& episode, int episodes, Rng& rng, int jobs = 1);

// Draws N episode seeds from `rng`, evaluates them (on up to `jobs` threads;
// the result does not depend on `jobs`) and aggregates the returns.
ObjectiveEstimate objective_estimate(const EpisodeFn& episode, const SearchConfig& cfg, Rng& rng,
                                     int jobs = 1);

// Independent Gaussian step per component with standard deviation
// scale * bound width, clipped to the bounds.
Eigen::VectorXd perturb(const Eigen::VectorXd& theta, const ParameterBounds& bounds, double scale, Rng& rng);

// Maps a parameter vector to its objective estimate (higher is better).
using Objective = std::function<ObjectiveEstimate(const Eigen::VectorXd& theta, Rng& rng)>;

struct IterationLogRow {
  long iteration = 0;
  double candidate_f = 0.0;
  double incumbent_f = 0.0;
  bool accepted = false;
  bool reevaluated = false;
  double wall_clock_s = 0.0;
};

struct TrainingRecord {
  Eigen::VectorXd theta;
  ObjectiveEstimate estimate;  // incumbent estimate; `uses` is the reuse counter
  double initial_value = 0.0;  // estimate of the starting parameters
  long iteration = 0;
  double elapsed_s = 0.0;
  Rng rng;
  SearchConfig config;

  double incumbent_f() const { return -estimate.value; }
};

class RandomSearch {
 public:
  RandomSearch(Objective objective, ParameterBounds bounds, SearchConfig config);

  // Evaluates the starting point (iteration 0). Throws ConfigError when it
  // lies outside the bounds.
  TrainingRecord start(Eigen::VectorXd theta, Rng rng) const;

  // Draws the starting point uniformly within the bounds from `rng`.
  TrainingRecord start(Rng rng) const;

  static IterationLogRow initial_row(const TrainingRecord& record);

  // One propose / compare / maybe re-evaluate cycle.
  IterationLogRow iterate(TrainingRecord& record) const;

  using Observer = std::function<void(const TrainingRecord&, const IterationLogRow&)>;

  // Iterates until max_iterations or the wall-clock limit is reached.
  void run(TrainingRecord& record, const Observer& observer = {}) const;

  const ParameterBounds& bounds() const { return bounds_; }
  const SearchConfig& config() const { return config_; }

 private:
  Objective objective_;
  ParameterBounds bounds_;
  SearchConfig config_;
};

// Objective for the circuit policy on the cart-pole task.
Objective circuit_objective(const Topology& topo, const InterfaceMapping& mapping, const SolverConfig& solver,
                            const EnvParams& env, SigmoidSign sign, const SearchConfig& cfg, int jobs = 1);

}  // namespace twc
