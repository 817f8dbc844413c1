// twc: train, evaluate and inspect tap-withdrawal circuit controllers on the
// cart-pole task.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "twc/checkpoint.hpp"
#include "twc/config.hpp"
#include "twc/error.hpp"
#include "twc/harness.hpp"
#include "twc/io.hpp"
#include "twc/parameters.hpp"

#ifndef TWC_SOURCE_DIR
#define TWC_SOURCE_DIR ""
#endif

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  int jobs = 0;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_path, "Run configuration file (key = value lines)");
  app->add_option("-s,--set", c.overrides, "Override one key, e.g. --set search.episodes=20")->take_all();
  app->add_option("-j,--jobs", c.jobs, "Worker threads for episode evaluation")->check(CLI::PositiveNumber);
}

twc::RunConfig build_config(const Common& c, twc::RunConfig base = {}) {
  twc::RunConfig cfg = c.config_path.empty() ? std::move(base) : twc::load_config(c.config_path, std::move(base));
  for (const auto& o : c.overrides) twc::apply_override(cfg, o);
  if (c.jobs > 0) cfg.jobs = c.jobs;
  return cfg;
}

// Parameters for evaluate/rollout: a checkpoint, a parameter file, or the
// silent circuit.
struct ParamSource {
  std::string checkpoint;
  std::string params;
  bool zero_weights = false;
};

void add_param_source(CLI::App* app, ParamSource& p) {
  auto* ck = app->add_option("--checkpoint", p.checkpoint, "Checkpoint whose incumbent parameters are used");
  auto* pf = app->add_option("--params", p.params, "Parameter file");
  auto* zw = app->add_flag("--zero-weights", p.zero_weights, "Silent circuit: no synapses, no gap junctions");
  ck->excludes(pf)->excludes(zw);
  pf->excludes(zw);
}

struct Loaded {
  twc::RunContext ctx;
  Eigen::VectorXd theta;
};

Loaded load_parameters(const Common& common, const ParamSource& src) {
  if (!src.checkpoint.empty()) {
    twc::Checkpoint cp = twc::load_checkpoint(src.checkpoint);
    twc::RunConfig cfg = build_config(common, cp.config);
    twc::RunContext ctx = twc::make_context(std::move(cfg), cp.wiring_text);
    if (cp.record.theta.size() != ctx.bounds.size())
      throw twc::CheckpointError("checkpoint parameters do not fit the wiring");
    return {std::move(ctx), cp.record.theta};
  }
  if (src.params.empty() && !src.zero_weights)
    throw twc::ConfigError("one of --checkpoint, --params or --zero-weights is required");
  twc::RunContext ctx = twc::load_context(build_config(common), TWC_SOURCE_DIR);
  Eigen::VectorXd theta = src.zero_weights ? twc::silent_parameters(ctx.topology)
                                           : twc::parse_parameters(twc::read_file(src.params), ctx.topology);
  return {std::move(ctx), std::move(theta)};
}

void print_summary(const twc::EvaluationSummary& s, const twc::RunContext& ctx) {
  std::printf("episodes %zu\nmean %.6g\nmin %.6g\nmax %.6g\nOE %.6g  (%s, k = %d)\n", s.returns.size(), s.mean,
              s.min, s.max, s.objective, std::string(twc::to_string(ctx.config.search.estimator)).c_str(),
              ctx.config.search.worst_k);
}

twc::BaselineKind parse_baseline(const std::string& name) {
  if (name == "pd") return twc::BaselineKind::kPd;
  if (name == "zero") return twc::BaselineKind::kZero;
  throw twc::ConfigError("unknown controller '" + name + "' (expected pd or zero)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tap-withdrawal circuit controller for the cart-pole task"};
  app.require_subcommand(1);

  Common common;

  auto* train = app.add_subcommand("train", "Random search over circuit parameters");
  add_common(train, common);
  std::string resume_path, output_dir;
  long max_iterations = -1;
  bool quiet = false;
  train->add_option("--resume", resume_path, "Continue from a checkpoint");
  train->add_option("--max-iterations", max_iterations, "Iteration budget (overrides search.max_iterations)");
  train->add_option("-o,--output", output_dir, "Output directory (overrides output_dir)");
  train->add_flag("-q,--quiet", quiet, "No progress output");

  auto* rollout = app.add_subcommand("rollout", "Traced episode of a circuit: trace CSV and SVG summary");
  add_common(rollout, common);
  ParamSource rollout_src;
  add_param_source(rollout, rollout_src);
  std::uint64_t rollout_seed = 0;
  std::string rollout_out, rollout_stem = "trace";
  rollout->add_option("--episode-seed", rollout_seed, "Seed of the episode's initial state");
  rollout->add_option("-o,--output", rollout_out, "Output directory (overrides output_dir)");
  rollout->add_option("--name", rollout_stem, "File stem of the trace files");

  auto* evaluate = app.add_subcommand("evaluate", "Return statistics of a circuit over many episodes");
  add_common(evaluate, common);
  ParamSource eval_src;
  add_param_source(evaluate, eval_src);
  int eval_episodes = 100;
  std::optional<std::uint64_t> eval_seed;
  evaluate->add_option("-n,--episodes", eval_episodes, "Number of episodes")->check(CLI::PositiveNumber);
  evaluate->add_option("--seed", eval_seed, "Seed for the episode initial states (default: the run seed)");

  auto* baseline = app.add_subcommand("baseline", "Reference controller under the same environment");
  add_common(baseline, common);
  std::string controller = "pd";
  int base_episodes = 100;
  std::optional<std::uint64_t> base_seed;
  std::string base_out;
  bool base_trace = false;
  baseline->add_option("--controller", controller, "pd or zero")->check(CLI::IsMember({"pd", "zero"}));
  baseline->add_option("-n,--episodes", base_episodes, "Number of episodes")->check(CLI::PositiveNumber);
  baseline->add_option("--seed", base_seed, "Seed for the episode initial states (default: the run seed)");
  baseline->add_flag("--trace", base_trace, "Also write a trace of one episode (seed --episode-seed)");
  baseline->add_option("--episode-seed", rollout_seed, "Seed of the traced episode");
  baseline->add_option("-o,--output", base_out, "Output directory for the trace (overrides output_dir)");

  auto* keys = app.add_subcommand("config", "Print the effective configuration");
  add_common(keys, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : static_cast<int>(twc::ExitCode::kConfig);
  }

  try {
    if (*train) {
      std::optional<twc::Checkpoint> resume;
      twc::RunConfig cfg;
      twc::RunContext ctx = [&] {
        if (!resume_path.empty()) {
          resume = twc::load_checkpoint(resume_path);
          cfg = build_config(common, resume->config);
          if (output_dir.empty() && common.config_path.empty())
            cfg.output_dir = std::filesystem::path(resume_path).parent_path().string();
        } else {
          cfg = build_config(common);
        }
        if (max_iterations >= 0) cfg.search.max_iterations = max_iterations;
        if (!output_dir.empty()) cfg.output_dir = output_dir;
        if (cfg.output_dir.empty()) cfg.output_dir = ".";
        return resume ? twc::make_context(cfg, resume->wiring_text) : twc::load_context(cfg, TWC_SOURCE_DIR);
      }();
      const twc::Checkpoint done = twc::train(ctx, resume, quiet ? nullptr : &std::cout);
      if (!quiet)
        std::printf("finished at iteration %ld: OE %.6g (initial %.6g), outputs in %s\n", done.record.iteration,
                    done.record.estimate.value, done.record.initial_value, ctx.config.output_dir.c_str());
    } else if (*rollout) {
      Loaded l = load_parameters(common, rollout_src);
      if (!rollout_out.empty()) l.ctx.config.output_dir = rollout_out;
      const twc::RolloutResult r = twc::trace_circuit(l.ctx, l.theta, rollout_seed);
      const std::string csv = twc::write_trace(l.ctx, r, rollout_seed, l.ctx.config.output_dir, rollout_stem);
      std::printf("return %.6g over %d steps%s\ntrace %s\n", r.total_return, r.steps,
                  r.diverged ? " (circuit diverged, episode truncated)" : "", csv.c_str());
      if (r.diverged) return static_cast<int>(twc::ExitCode::kDivergence);
    } else if (*evaluate) {
      const Loaded l = load_parameters(common, eval_src);
      const auto s = twc::evaluate_circuit(l.ctx, l.theta, eval_episodes, eval_seed.value_or(l.ctx.config.search.seed),
                                           l.ctx.config.jobs);
      print_summary(s, l.ctx);
    } else if (*baseline) {
      twc::RunContext ctx = twc::load_context(build_config(common), TWC_SOURCE_DIR);
      if (!base_out.empty()) ctx.config.output_dir = base_out;
      const auto kind = parse_baseline(controller);
      const auto s =
          twc::evaluate_baseline(ctx, kind, base_episodes, base_seed.value_or(ctx.config.search.seed), ctx.config.jobs);
      print_summary(s, ctx);
      if (base_trace) {
        const auto r = twc::trace_baseline(ctx, kind, rollout_seed);
        std::printf("trace %s\n", twc::write_trace(ctx, r, rollout_seed, ctx.config.output_dir, controller).c_str());
      }
    } else if (*keys) {
      const twc::RunConfig cfg = build_config(common);
      cfg.validate();
      std::fputs(twc::serialize_config(cfg).c_str(), stdout);
    }
  } catch (const twc::Error& e) {
    std::fprintf(stderr, "twc: %s\n", e.what());
    return static_cast<int>(e.code());
  }
  return 0;
}
