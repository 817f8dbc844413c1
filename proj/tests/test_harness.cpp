#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "twc/checkpoint.hpp"
#include "twc/config.hpp"
#include "twc/error.hpp"
#include "twc/harness.hpp"
#include "twc/io.hpp"
#include "twc/wiring.hpp"

using namespace twc;
namespace fs = std::filesystem;

namespace {

const std::string kWiring = TWC_DATA_DIR "/tw_circuit.wiring";

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("twc_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int wiring_error_line(std::string_view text) {
  try {
    parse_wiring(text);
  } catch (const WiringError& e) {
    return e.line();
  }
  return -1;
}

RunConfig small_run(const fs::path& out) {
  RunConfig cfg;
  cfg.wiring = kWiring;
  cfg.output_dir = out.string();
  cfg.search.max_iterations = 60;
  cfg.search.episodes = 4;
  cfg.search.worst_k = 2;
  cfg.search.reuse_limit = 4;
  cfg.checkpoint_every = 20;
  cfg.log_timing = false;
  cfg.env.horizon = 200;
  return cfg;
}

}  // namespace

TEST_CASE("wiring: minimal document") {
  const Topology topo = parse_wiring("neuron A sensory\nneuron B motor\nchem A B exc");
  CHECK(topo.size() == 2);
  CHECK(topo.chemical().size() == 1);
  CHECK(topo.gaps().empty());
  CHECK(topo.chemical()[0].polarity == Polarity::kExcitatory);
}

TEST_CASE("wiring: errors carry the offending line") {
  CHECK(wiring_error_line("neuron A sensory\n# note\nneuron A inter\n") == 3);
  CHECK(wiring_error_line("neuron A sensory\nchem A B exc\n") == 2);
  CHECK(wiring_error_line("neuron A inter\nneuron S sensory\n\nchem A S inh\n") == 4);
  CHECK(wiring_error_line("neuron M motor\nneuron A inter\nchem M A exc\n") == 3);
  CHECK(wiring_error_line("neuron A inter\nchem A A exc\n") == 2);
  CHECK(wiring_error_line("neuron A inter\nneuron B inter\nchem A B maybe\n") == 3);
  CHECK(wiring_error_line("neuron A\n") == 1);
  CHECK(wiring_error_line("neuron A inter\nsynapse A A\n") == 2);
  CHECK(wiring_error_line("neuron A-1 inter\n") == 1);
  CHECK(wiring_error_line("neuron A inter\nneuron S sensory\ngap A S\n") == 3);
  CHECK(wiring_error_line("neuron A inter extra\n") == 1);
}

TEST_CASE("wiring: declarations may come in any order and comments are ignored") {
  const Topology topo = parse_wiring("chem A B inh  # forward ref\ngap B C\nneuron A sensory\nneuron B inter\n"
                                     "neuron C motor\n");
  CHECK(topo.neuron(0).name == "A");
  CHECK(topo.gaps().size() == 1);
}

TEST_CASE("wiring: shipped files round-trip and carry the expected neurons") {
  for (const char* file : {"tw_circuit.wiring", "tw_circuit_headtail.wiring"}) {
    const std::string text = read_file(std::string(TWC_DATA_DIR) + "/" + file);
    const WiringDocument doc = parse_wiring_document(text);
    CHECK(parse_wiring_document(serialize_wiring(doc)) == doc);
    const Topology topo = build_topology(doc);
    CHECK(parse_wiring(serialize_wiring(topo)) == topo);
    CHECK(topo.size() == 11);
    std::vector<std::string> sensory;
    for (const int id : topo.sensory_neurons()) sensory.push_back(topo.neuron(id).name);
    std::sort(sensory.begin(), sensory.end());
    CHECK(sensory == std::vector<std::string>{"ALM", "AVM", "PLM", "PVD"});
    CHECK(topo.neuron(topo.index_of("FWD")).role == NeuronRole::kMotor);
    CHECK(topo.neuron(topo.index_of("REV")).role == NeuronRole::kMotor);
    for (const char* inter : {"PVC", "AVD", "AVA", "AVB", "DVA"})
      CHECK(topo.neuron(topo.index_of(inter)).role == NeuronRole::kInter);
  }
}

TEST_CASE("wiring: round trip on random documents") {
  Rng rng(14);
  for (int trial = 0; trial < 100; ++trial) {
    std::string text;
    const int n = 3 + static_cast<int>(rng.uniform() * 6);
    for (int i = 0; i < n; ++i) {
      const char* role = i == 0 ? "sensory" : i == n - 1 ? "motor" : "inter";
      text += "neuron N" + std::to_string(i) + " " + role + "\n";
    }
    for (int e = 0; e < 10; ++e) {
      const int a = static_cast<int>(rng.uniform() * (n - 1));
      const int b = 1 + static_cast<int>(rng.uniform() * (n - 1));
      if (a == b) continue;
      text += "chem N" + std::to_string(a) + " N" + std::to_string(b) + (rng.uniform() < 0.5 ? " exc\n" : " inh\n");
      if (a > 0) text += "gap N" + std::to_string(a) + " N" + std::to_string(b) + "\n";
    }
    const WiringDocument doc = parse_wiring_document(text);
    CHECK(parse_wiring_document(serialize_wiring(parse_wiring_document(serialize_wiring(doc)))) == doc);
  }
}

TEST_CASE("numbers are written with exact round-trip precision") {
  Rng rng(1);
  for (int i = 0; i < 5000; ++i) {
    const double x = (rng.uniform() - 0.5) * std::pow(10.0, rng.uniform(-300.0, 300.0));
    CHECK(parse_double(format_double(x)) == x);
  }
  for (const double x : {0.0, -0.0, 1.0 / 3.0, std::numeric_limits<double>::max(),
                         std::numeric_limits<double>::denorm_min(), -1e-310})
    CHECK(parse_double(format_double(x)) == x);
  CHECK(std::isnan(parse_double(format_double(std::nan("")))));
  CHECK_THROWS_AS(parse_double("1.0x"), ConfigError);
  CHECK_THROWS_AS(parse_double(""), ConfigError);
  CHECK_THROWS_AS(parse_long("12.5"), ConfigError);
  CHECK(parse_bool("true"));
  CHECK_FALSE(parse_bool("0"));
  CHECK_THROWS_AS(parse_bool("yes"), ConfigError);
}

TEST_CASE("parameter files round-trip") {
  const Topology topo = load_wiring(kWiring);
  Rng rng(3);
  const Eigen::VectorXd theta = uniform_parameters(parameter_bounds(topo), rng);
  const std::string text = serialize_parameters(topo, theta);
  CHECK(parse_parameters(text, topo) == theta);

  const std::string missing = text.substr(0, text.rfind("gap"));
  CHECK_THROWS_AS(parse_parameters(missing, topo), ConfigError);
  CHECK_THROWS_AS(parse_parameters(text + "neuron PLM 0.1 1 -0.07\n", topo), ConfigError);
  CHECK_THROWS_AS(parse_parameters(text + "chem FWD PLM 1 0.1\n", topo), ConfigError);
}

TEST_CASE("traces and logs parse back to the values written") {
  RunConfig cfg;
  cfg.wiring = kWiring;
  const RunContext ctx = load_context(cfg);
  Rng rng(5);
  const Eigen::VectorXd theta = uniform_parameters(ctx.bounds, rng);
  const RolloutResult r = trace_circuit(ctx, theta, 11);
  REQUIRE(r.trace.size() == static_cast<std::size_t>(r.steps) + 1);
  const std::string csv = render_trace(ctx.header("trace", 11), ctx.topology, r.trace, cfg.env.env_dt);
  const auto rows = parse_csv_rows(csv);
  REQUIRE(rows.size() == r.trace.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& rec = r.trace[i];
    REQUIRE(rows[i].size() == 5 + ctx.topology.size() + 2);
    CHECK(rows[i][0] == rec.env.step_count * cfg.env.env_dt);
    CHECK(rows[i][1] == rec.env.x);
    CHECK(rows[i][2] == rec.env.x_dot);
    CHECK(rows[i][3] == rec.env.phi);
    CHECK(rows[i][4] == rec.env.phi_dot);
    for (std::size_t n = 0; n < ctx.topology.size(); ++n)
      CHECK(rows[i][5 + n] == rec.potentials[static_cast<Eigen::Index>(n)]);
    CHECK(rows[i][rows[i].size() - 2] == rec.action);
    CHECK(rows[i].back() == rec.reward);
  }
  CHECK(csv.find(trace_columns(ctx.topology)) != std::string::npos);
  CHECK(trace_columns(ctx.topology).rfind("t,x,x_dot,phi,phi_dot,PLM,", 0) == 0);

  const IterationLogRow row{17, -12.333333333333334, -40.1, true, false, 3.25e-3};
  const IterationLogRow back = parse_log_row(format_log_row(row, true));
  CHECK(back.iteration == row.iteration);
  CHECK(back.candidate_f == row.candidate_f);
  CHECK(back.incumbent_f == row.incumbent_f);
  CHECK(back.accepted == row.accepted);
  CHECK(back.reevaluated == row.reevaluated);
  CHECK(back.wall_clock_s == row.wall_clock_s);
  CHECK(parse_log_row(format_log_row(row, false)).wall_clock_s == 0.0);
}

TEST_CASE("config: parse, override, serialize") {
  const RunConfig cfg = parse_config(
      "# comment\nsearch.episodes = 20\nsearch.worst_k=5\nenv.task = swingup\nmapping.phi = PLM AVM -0.3 0.25\n"
      "circuit.sigmoid_sign = decreasing\nseed = 99\n");
  CHECK(cfg.search.episodes == 20);
  CHECK(cfg.search.worst_k == 5);
  CHECK(cfg.env.mode == TaskMode::kSwingup);
  CHECK(cfg.sigmoid_sign == SigmoidSign::kDecreasing);
  CHECK(cfg.search.seed == 99);
  CHECK(cfg.mapping.sensory[0].x_min == -0.3);
  CHECK(cfg.mapping.sensory[0].x_max == 0.25);

  const RunConfig again = parse_config(serialize_config(cfg));
  CHECK(serialize_config(again) == serialize_config(cfg));

  RunConfig o;
  apply_override(o, "search.perturbation_scale=0.1");
  CHECK(o.search.perturbation_scale == 0.1);
  CHECK_THROWS_AS(apply_override(o, "nonsense=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(o, "search.episodes"), ConfigError);
  CHECK_THROWS_AS(apply_override(o, "search.episodes=many"), ConfigError);

  try {
    parse_config("seed = 1\n\nenv.horizon = x\n");
    FAIL("expected an error");
  } catch (const WiringError& e) {
    CHECK(e.line() == 3);
  }

  RunConfig bad;
  bad.search.worst_k = 50;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = {};
  bad.jobs = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config hash ignores run control keys only") {
  const RunConfig base;
  const std::string wiring = read_file(kWiring);
  const auto h = config_hash(base, wiring);
  RunConfig control = base;
  control.output_dir = "elsewhere";
  control.search.max_iterations = 5;
  control.search.max_wall_clock_s = 2.0;
  control.checkpoint_every = 3;
  control.jobs = 4;
  CHECK(config_hash(control, wiring) == h);
  RunConfig behaviour = base;
  behaviour.search.worst_k = 2;
  CHECK(config_hash(behaviour, wiring) != h);
  behaviour = base;
  behaviour.search.seed = 2;
  CHECK(config_hash(behaviour, wiring) != h);
  CHECK(config_hash(base, wiring + "# edit\n") != h);
}

TEST_CASE("checkpoints round-trip and reject damage") {
  const fs::path dir = scratch("ckpt");
  Checkpoint cp;
  cp.config.search.seed = 12;
  cp.wiring_text = read_file(kWiring);
  cp.record.theta = Eigen::VectorXd::LinSpaced(5, -0.1, 1.0 / 3.0);
  cp.record.estimate = {123.25, 10, 3, 4};
  cp.record.initial_value = 2.0 / 3.0;
  cp.record.iteration = 77;
  cp.record.elapsed_s = 1.5;
  cp.record.rng = Rng(12);
  cp.record.rng.normal();
  const std::string path = (dir / "c.txt").string();
  save_checkpoint(cp, path);
  const Checkpoint back = load_checkpoint(path);
  CHECK(back.record.theta == cp.record.theta);
  CHECK(back.record.estimate.value == cp.record.estimate.value);
  CHECK(back.record.estimate.uses == 4);
  CHECK(back.record.initial_value == cp.record.initial_value);
  CHECK(back.record.iteration == 77);
  CHECK(back.record.elapsed_s == 1.5);
  CHECK(back.record.rng == cp.record.rng);
  CHECK(back.wiring_text == cp.wiring_text);
  CHECK(serialize_config(back.config) == serialize_config(cp.config));
  CHECK(serialize_checkpoint(back) == serialize_checkpoint(cp));

  const std::string text = serialize_checkpoint(cp);
  for (const std::size_t cut : {std::size_t{0}, std::size_t{10}, text.size() / 2, text.size() - 3})
    CHECK_THROWS_AS(parse_checkpoint(text.substr(0, cut)), CheckpointError);

  std::string flipped = text;
  flipped[text.find("iteration = 77")] = 'j';
  CHECK_THROWS_AS(parse_checkpoint(flipped), CheckpointError);

  std::string version = text;
  version.replace(0, version.find('\n'), "twc-checkpoint 2");
  const std::string body = version.substr(0, version.rfind("checksum = "));
  version = body + "checksum = " + hex64(fnv1a64(body)) + "\n";
  try {
    parse_checkpoint(version);
    FAIL("expected a version error");
  } catch (const CheckpointError& e) {
    CHECK(std::string(e.what()).find("version") != std::string::npos);
  }
  CHECK_THROWS_AS(load_checkpoint((dir / "missing.txt").string()), CheckpointError);
}

TEST_CASE("pd baseline examples") {
  CHECK(pd_baseline({0, 0, 0.0, 1.0, 0.0}) == 0.0);
  CHECK(pd_baseline({0, 0, std::sin(1.0), std::cos(1.0), 0.0}) == 1.0);
  CHECK(pd_baseline({0, 0, std::sin(-1.0), std::cos(-1.0), 0.0}) == -1.0);
  CHECK(pd_baseline({0, 0, std::sin(0.01), std::cos(0.01), 0.02}) == doctest::Approx(0.12));
}

namespace {

struct NullEnv {
  Observation reset(Rng&) { return {}; }
  StepResult step(double) { return {}; }
  EnvState state() const { return {}; }
  int horizon() const { return 0; }
};

}  // namespace

TEST_CASE("horizon-0 environment yields only the initial record") {
  NullEnv env;
  ZeroController z;
  Rng rng(1);
  const RolloutResult r = rollout(env, z, rng, true);
  CHECK(r.total_return == 0.0);
  CHECK(r.steps == 0);
  CHECK(r.trace.size() == 1);
}

TEST_CASE("silent circuit acts like the zero-force controller") {
  RunConfig cfg;
  cfg.wiring = kWiring;
  const RunContext ctx = load_context(cfg);
  const Eigen::VectorXd silent = silent_parameters(ctx.topology);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const RolloutResult c = trace_circuit(ctx, silent, seed);
    const RolloutResult z = trace_baseline(ctx, BaselineKind::kZero, seed);
    CHECK(c.total_return == z.total_return);
    REQUIRE(c.trace.size() == z.trace.size());
    for (std::size_t i = 1; i < c.trace.size(); ++i) {
      CHECK(c.trace[i].action == 0.0);
      CHECK(c.trace[i].env.phi == z.trace[i].env.phi);
    }
  }
  const auto ce = evaluate_circuit(ctx, silent, 50, 3);
  const auto ze = evaluate_baseline(ctx, BaselineKind::kZero, 50, 3);
  CHECK(ce.mean == ze.mean);
  CHECK(ce.min == ze.min);
}

TEST_CASE("training writes a log and resumes to identical bytes") {
  const fs::path a = scratch("train_a"), b = scratch("train_b");
  const RunContext ctx_a = load_context(small_run(a));
  const Checkpoint full = train(ctx_a);
  CHECK(full.record.iteration == 60);

  RunConfig first_half = small_run(b);
  first_half.search.max_iterations = 33;
  train(load_context(first_half));
  Checkpoint mid = load_checkpoint((b / kCheckpointFile).string());
  CHECK(mid.record.iteration == 33);
  // resume from the periodic checkpoint written at iteration 20
  RunConfig resumed = small_run(b);
  {
    RunConfig redo = small_run(b);
    redo.search.max_iterations = 20;
    const fs::path c = scratch("train_c");
    redo.output_dir = c.string();
    train(load_context(redo));
    mid = load_checkpoint((c / kCheckpointFile).string());
  }
  CHECK(mid.record.iteration == 20);
  const Checkpoint done = train(load_context(resumed), mid);
  CHECK(done.record.iteration == 60);

  const std::string log_a = read_file((a / kLogFile).string());
  const std::string log_b = read_file((b / kLogFile).string());
  CHECK(log_a == log_b);
  CHECK(done.record.theta == full.record.theta);
  CHECK(done.record.rng == full.record.rng);
  CHECK(read_file((a / kParamsFile).string()) == read_file((b / kParamsFile).string()));

  const auto rows = parse_csv_rows(log_a);
  CHECK(rows.size() == 61);
  CHECK(log_a.find("# seed = 1\n") != std::string::npos);
  CHECK(log_a.find("# config_hash = " + hex64(ctx_a.hash)) != std::string::npos);

  RunConfig other = small_run(b);
  other.search.worst_k = 1;
  CHECK_THROWS_AS(train(load_context(other), mid), CheckpointError);
}

TEST_CASE("initial parameters") {
  RunConfig cfg;
  cfg.wiring = kWiring;
  cfg.init = "midrange";
  Rng rng(1);
  const RunContext mid = load_context(cfg);
  CHECK(initial_parameters(mid, rng) == midrange_parameters(mid.bounds));

  const fs::path dir = scratch("init");
  const Eigen::VectorXd theta = uniform_parameters(mid.bounds, rng);
  write_file_atomic((dir / "p.txt").string(), serialize_parameters(mid.topology, theta));
  cfg.init = (dir / "p.txt").string();
  CHECK(initial_parameters(load_context(cfg), rng) == theta);

  cfg.init = (dir / "absent.txt").string();
  CHECK_THROWS_AS(initial_parameters(load_context(cfg), rng), ConfigError);
}
