#include "twc/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <thread>

#include "twc/error.hpp"

namespace twc {

std::string_view to_string(EstimatorMode mode) {
  switch (mode) {
    case EstimatorMode::kWorstK: return "worst_k";
    case EstimatorMode::kMean: return "mean";
    case EstimatorMode::kMin: return "min";
  }
  return "?";
}

std::optional<EstimatorMode> parse_estimator(std::string_view text) {
  if (text == "worst_k") return EstimatorMode::kWorstK;
  if (text == "mean") return EstimatorMode::kMean;
  if (text == "min") return EstimatorMode::kMin;
  return std::nullopt;
}

void SearchConfig::validate() const {
  if (episodes < 1) throw ConfigError("search.episodes must be at least 1");
  if (worst_k < 1 || worst_k > episodes) throw ConfigError("search.worst_k must lie in [1, search.episodes]");
  if (reuse_limit < 1) throw ConfigError("search.reuse_limit must be at least 1");
  if (max_iterations < 0) throw ConfigError("search.max_iterations must be non-negative");
  if (!(max_wall_clock_s >= 0.0)) throw ConfigError("search.max_wall_clock_s must be non-negative");
  if (!(perturbation_scale > 0.0 && perturbation_scale <= 1.0))
    throw ConfigError("search.perturbation_scale must lie in (0, 1]");
}

ObjectiveEstimate estimate_from_returns(std::vector<double> returns, int k, EstimatorMode mode) {
  if (returns.empty()) throw ConfigError("objective estimate needs at least one return");
  const int n = static_cast<int>(returns.size());
  if (k < 1 || k > n) throw ConfigError("worst-k count outside [1, N]");
  std::sort(returns.begin(), returns.end());
  const int used = mode == EstimatorMode::kWorstK ? k : mode == EstimatorMode::kMean ? n : 1;
  const double sum = std::accumulate(returns.begin(), returns.begin() + used, 0.0);
  return {sum / used, n, k, 0};
}

std::vector<double> episode_returns(const EpisodeFn& episode, int episodes, Rng& rng, int jobs) {
  const auto n = static_cast<std::size_t>(std::max(episodes, 0));
  std::vector<std::uint64_t> seeds(n);
  for (auto& s : seeds) s = rng.next_u64();
  std::vector<double> returns(n);
  if (n == 0) return returns;

  const auto workers = static_cast<std::size_t>(std::clamp(jobs, 1, episodes));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) returns[i] = episode(seeds[i]);
    return returns;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i; (i = next.fetch_add(1)) < n;) returns[i] = episode(seeds[i]);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return returns;
}

ObjectiveEstimate objective_estimate(const EpisodeFn& episode, const SearchConfig& cfg, Rng& rng, int jobs) {
  return estimate_from_returns(episode_returns(episode, cfg.episodes, rng, jobs), cfg.worst_k, cfg.estimator);
}

Eigen::VectorXd perturb(const Eigen::VectorXd& theta, const ParameterBounds& bounds, double scale, Rng& rng) {
  Eigen::VectorXd out(theta.size());
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double width = bounds.upper(i) - bounds.lower(i);
    out(i) = theta(i) + scale * width * rng.normal();
  }
  return bounds.clip(out);
}

RandomSearch::RandomSearch(Objective objective, ParameterBounds bounds, SearchConfig config)
    : objective_(std::move(objective)), bounds_(std::move(bounds)), config_(config) {
  config_.validate();
}

TrainingRecord RandomSearch::start(Eigen::VectorXd theta, Rng rng) const {
  if (!bounds_.contains(theta)) throw ConfigError("starting parameters lie outside their bounds");
  TrainingRecord record;
  record.config = config_;
  record.estimate = objective_(theta, rng);
  record.estimate.uses = 0;
  record.initial_value = record.estimate.value;
  record.theta = std::move(theta);
  record.rng = std::move(rng);
  return record;
}

TrainingRecord RandomSearch::start(Rng rng) const {
  Eigen::VectorXd theta = uniform_parameters(bounds_, rng);
  return start(std::move(theta), std::move(rng));
}

IterationLogRow RandomSearch::initial_row(const TrainingRecord& record) {
  return {0, record.incumbent_f(), record.incumbent_f(), false, false, record.elapsed_s};
}

IterationLogRow RandomSearch::iterate(TrainingRecord& record) const {
  IterationLogRow row;
  row.iteration = ++record.iteration;

  Eigen::VectorXd candidate = perturb(record.theta, bounds_, config_.perturbation_scale, record.rng);
  ObjectiveEstimate candidate_estimate = objective_(candidate, record.rng);
  row.candidate_f = -candidate_estimate.value;

  if (row.candidate_f < record.incumbent_f()) {
    record.theta = std::move(candidate);
    record.estimate = candidate_estimate;
    record.estimate.uses = 0;
    row.accepted = true;
  }
  ++record.estimate.uses;
  if (record.estimate.uses > config_.reuse_limit) {
    record.estimate = objective_(record.theta, record.rng);
    record.estimate.uses = 0;
    row.reevaluated = true;
  }
  if (!bounds_.contains(record.theta)) throw ConfigError("incumbent left the parameter bounds");
  row.incumbent_f = record.incumbent_f();
  return row;
}

void RandomSearch::run(TrainingRecord& record, const Observer& observer) const {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  const double elapsed_before = record.elapsed_s;
  auto elapsed = [&] { return elapsed_before + std::chrono::duration<double>(Clock::now() - t0).count(); };

  while (record.iteration < config_.max_iterations &&
         (config_.max_wall_clock_s <= 0.0 || elapsed() < config_.max_wall_clock_s)) {
    IterationLogRow row = iterate(record);
    record.elapsed_s = elapsed();
    row.wall_clock_s = record.elapsed_s;
    if (observer) observer(record, row);
  }
}

Objective circuit_objective(const Topology& topo, const InterfaceMapping& mapping, const SolverConfig& solver,
                            const EnvParams& env, SigmoidSign sign, const SearchConfig& cfg, int jobs) {
  return [topo, mapping, solver, env, sign, cfg, jobs](const Eigen::VectorXd& theta, Rng& rng) {
    const CircuitPolicy prototype(CircuitModel(topo, unflatten(theta, topo), sign), mapping, solver);
    const EpisodeFn episode = [&](std::uint64_t seed) { return circuit_episode_return(prototype, env, seed); };
    return objective_estimate(episode, cfg, rng, jobs);
  };
}

}  // namespace twc
