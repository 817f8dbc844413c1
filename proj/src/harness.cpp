#include "twc/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <ostream>

#include "twc/error.hpp"
#include "twc/plot.hpp"
#include "twc/wiring.hpp"

namespace twc {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

}  // namespace

ArtifactHeader RunContext::header(std::string kind, std::uint64_t seed) const {
  return {std::move(kind), seed, hash, serialize_config(config, true)};
}

std::string normalize_text(std::string text) {
  if (!text.empty() && text.back() != '\n') text += '\n';
  return text;
}

RunContext make_context(RunConfig config, std::string wiring_text) {
  config.validate();
  wiring_text = normalize_text(std::move(wiring_text));
  Topology topo = parse_wiring(wiring_text);
  InterfaceMapping mapping = config.mapping.resolve(topo);
  ParameterBounds bounds = parameter_bounds(topo);
  const std::uint64_t hash = config_hash(config, wiring_text);
  return {std::move(config), std::move(wiring_text), std::move(topo), std::move(mapping), std::move(bounds), hash};
}

RunContext load_context(RunConfig config, const std::string& fallback_dir) {
  std::string path = config.wiring;
  if (!fs::exists(path) && fs::path(path).is_relative() && !fallback_dir.empty()) {
    const auto alt = fs::path(fallback_dir) / path;
    if (fs::exists(alt)) path = alt.string();
  }
  std::string text = read_file(path);
  try {
    return make_context(std::move(config), std::move(text));
  } catch (const WiringError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Eigen::VectorXd initial_parameters(const RunContext& ctx, Rng& rng) {
  const std::string& init = ctx.config.init;
  Eigen::VectorXd theta;
  if (init == "uniform") {
    theta = uniform_parameters(ctx.bounds, rng);
  } else if (init == "midrange") {
    theta = midrange_parameters(ctx.bounds);
  } else {
    try {
      theta = parse_parameters(read_file(init), ctx.topology);
    } catch (const ConfigError& e) {
      throw ConfigError(init + ": " + e.what());
    }
  }
  if (!ctx.bounds.contains(theta)) throw ConfigError("initial parameters lie outside their bounds");
  return theta;
}

Checkpoint train(const RunContext& ctx, const std::optional<Checkpoint>& resume, std::ostream* progress) {
  const RunConfig& cfg = ctx.config;
  if (resume && config_hash(resume->config, resume->wiring_text) != ctx.hash)
    throw CheckpointError("checkpoint was written with a different configuration or wiring");

  const RandomSearch search(
      circuit_objective(ctx.topology, ctx.mapping, cfg.solver, cfg.env, cfg.sigmoid_sign, cfg.search, cfg.jobs),
      ctx.bounds, cfg.search);

  ensure_dir(cfg.output_dir);
  const std::string log_path = join(cfg.output_dir, kLogFile);
  const std::string ckpt_path = join(cfg.output_dir, kCheckpointFile);

  Checkpoint cp;
  cp.config = cfg;
  cp.wiring_text = ctx.wiring_text;
  if (resume) {
    cp.record = resume->record;
    cp.record.config = cfg.search;
    if (cp.record.theta.size() != ctx.bounds.size()) throw CheckpointError("checkpoint parameter count mismatch");
  } else {
    Rng rng(cfg.search.seed);
    Eigen::VectorXd theta = initial_parameters(ctx, rng);
    cp.record = search.start(std::move(theta), std::move(rng));
  }

  IterationLog log(log_path, ctx.header("iteration-log", cfg.search.seed), cfg.log_timing,
                   resume ? cp.record.iteration : -1);
  if (!resume) {
    log.append(RandomSearch::initial_row(cp.record));
    log.flush();
    save_checkpoint(cp, ckpt_path);
  }
  if (progress)
    *progress << "iteration " << cp.record.iteration << "  OE " << cp.record.estimate.value << "  (initial "
              << cp.record.initial_value << ")\n";

  search.run(cp.record, [&](const TrainingRecord& record, const IterationLogRow& row) {
    log.append(row);
    if (record.iteration % cfg.checkpoint_every == 0) {
      log.flush();
      cp.record = record;
      save_checkpoint(cp, ckpt_path);
      if (progress)
        *progress << "iteration " << record.iteration << "  OE " << record.estimate.value << "  elapsed "
                  << record.elapsed_s << " s\n";
    }
  });
  log.flush();
  save_checkpoint(cp, ckpt_path);
  write_file_atomic(join(cfg.output_dir, kParamsFile), serialize_parameters(ctx.topology, cp.record.theta));
  return cp;
}

EvaluationSummary summarize_returns(std::vector<double> returns, const SearchConfig& cfg) {
  if (returns.empty()) throw ConfigError("evaluation needs at least one episode");
  EvaluationSummary s;
  const auto [lo, hi] = std::ranges::minmax(returns);
  s.min = lo;
  s.max = hi;
  s.mean = std::accumulate(returns.begin(), returns.end(), 0.0) / static_cast<double>(returns.size());
  const int k = std::min(cfg.worst_k, static_cast<int>(returns.size()));
  s.objective = estimate_from_returns(returns, k, cfg.estimator).value;
  s.returns = std::move(returns);
  return s;
}

CircuitPolicy make_policy(const RunContext& ctx, const Eigen::VectorXd& theta) {
  return CircuitPolicy(CircuitModel(ctx.topology, unflatten(theta, ctx.topology), ctx.config.sigmoid_sign),
                       ctx.mapping, ctx.config.solver);
}

EvaluationSummary evaluate_circuit(const RunContext& ctx, const Eigen::VectorXd& theta, int episodes,
                                   std::uint64_t seed, int jobs) {
  if (!ctx.bounds.contains(theta)) throw ConfigError("parameters lie outside their bounds");
  const CircuitPolicy prototype = make_policy(ctx, theta);
  const EnvParams env = ctx.config.env;
  Rng rng(seed);
  return summarize_returns(
      episode_returns([&](std::uint64_t s) { return circuit_episode_return(prototype, env, s); }, episodes, rng, jobs),
      ctx.config.search);
}

namespace {

template <class Ctrl>
double controller_return(Ctrl ctrl, const EnvParams& env, std::uint64_t seed) {
  CartPoleEnv environment(env);
  Rng rng(seed);
  return rollout(environment, ctrl, rng).total_return;
}

}  // namespace

EvaluationSummary evaluate_baseline(const RunContext& ctx, BaselineKind kind, int episodes, std::uint64_t seed,
                                    int jobs) {
  const EnvParams env = ctx.config.env;
  const PdGains gains = ctx.config.pd;
  Rng rng(seed);
  const EpisodeFn episode = [&](std::uint64_t s) {
    return kind == BaselineKind::kPd ? controller_return(PdController(gains), env, s)
                                     : controller_return(ZeroController{}, env, s);
  };
  return summarize_returns(episode_returns(episode, episodes, rng, jobs), ctx.config.search);
}

RolloutResult trace_circuit(const RunContext& ctx, const Eigen::VectorXd& theta, std::uint64_t seed) {
  if (!ctx.bounds.contains(theta)) throw ConfigError("parameters lie outside their bounds");
  CircuitPolicy policy = make_policy(ctx, theta);
  CartPoleEnv env(ctx.config.env);
  Rng rng(seed);
  return rollout(env, policy, rng, true);
}

RolloutResult trace_baseline(const RunContext& ctx, BaselineKind kind, std::uint64_t seed) {
  CartPoleEnv env(ctx.config.env);
  Rng rng(seed);
  if (kind == BaselineKind::kPd) {
    PdController ctrl(ctx.config.pd);
    return rollout(env, ctrl, rng, true);
  }
  ZeroController ctrl;
  return rollout(env, ctrl, rng, true);
}

std::string write_trace(const RunContext& ctx, const RolloutResult& result, std::uint64_t seed,
                        const std::string& dir, const std::string& stem) {
  ensure_dir(dir);
  const double dt = ctx.config.env.env_dt;
  const std::string csv = join(dir, stem + ".csv");
  write_file_atomic(csv, render_trace(ctx.header("trace", seed), ctx.topology, result.trace, dt));

  std::vector<double> t;
  Series x{"x", {}}, phi{"phi", {}}, action{"action", {}};
  std::vector<Series> neurons;
  for (const auto& n : ctx.topology.neurons()) neurons.push_back({n.name, {}});
  for (const auto& r : result.trace) {
    t.push_back(r.env.step_count * dt);
    x.y.push_back(r.env.x);
    phi.y.push_back(r.env.phi);
    action.y.push_back(r.action);
    for (std::size_t i = 0; i < neurons.size(); ++i)
      neurons[i].y.push_back(r.potentials.size() > 0 ? 1e3 * r.potentials[static_cast<Eigen::Index>(i)]
                                                     : std::numeric_limits<double>::quiet_NaN());
  }
  std::vector<Panel> panels = {{"Pole angle", "rad", {phi}}, {"Cart position", "m", {x}},
                               {"Action", "[-1, 1]", {action}}};
  if (!result.trace.empty() && result.trace.front().potentials.size() > 0)
    panels.push_back({"Membrane potentials", "mV", neurons});
  write_file_atomic(join(dir, stem + ".svg"), render_svg(t, "time (s)", panels));
  return csv;
}

}  // namespace twc
