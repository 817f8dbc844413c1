#include "twc/config.hpp"

#include <functional>
#include <sstream>

#include "twc/error.hpp"
#include "twc/io.hpp"

namespace twc {

namespace {

struct Key {
  const char* name;
  bool behaviour;  // part of the config hash
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, std::string_view)> set;
};

std::string fmt(double v) { return format_double(v); }

int parse_int(std::string_view v) {
  const long x = parse_long(v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError("integer out of range '" + std::string(v) + "'");
  return static_cast<int>(x);
}

std::string task_name(TaskMode m) { return m == TaskMode::kSwingup ? "swingup" : "stabilize"; }

TaskMode parse_task(std::string_view v) {
  if (v == "stabilize") return TaskMode::kStabilize;
  if (v == "swingup") return TaskMode::kSwingup;
  throw ConfigError("unknown task '" + std::string(v) + "' (expected stabilize or swingup)");
}

SensorySpec* find_sensory(RunConfig& c, ObservedVariable var) {
  for (auto& s : c.mapping.sensory)
    if (s.variable == var) return &s;
  return nullptr;
}

const SensorySpec* find_sensory(const RunConfig& c, ObservedVariable var) {
  return find_sensory(const_cast<RunConfig&>(c), var);
}

std::string render_sensory(const RunConfig& c, ObservedVariable var) {
  const SensorySpec* s = find_sensory(c, var);
  if (!s) return "none";
  return s->pos_neuron + ' ' + s->neg_neuron + ' ' + fmt(s->x_min) + ' ' + fmt(s->x_max);
}

void set_sensory(RunConfig& c, ObservedVariable var, std::string_view v) {
  auto& list = c.mapping.sensory;
  std::erase_if(list, [var](const SensorySpec& s) { return s.variable == var; });
  if (trim(v) == "none") return;
  const auto t = split_ws(v);
  if (t.size() != 4) throw ConfigError("expected '<POS> <NEG> <min> <max>' or 'none'");
  list.push_back({var, t[0], t[1], parse_double(t[2]), parse_double(t[3])});
  std::ranges::sort(list, {}, [](const SensorySpec& s) { return static_cast<int>(s.variable); });
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    auto real = [&k](const char* name, bool behaviour, auto member) {
      k.push_back({name, behaviour, [member](const RunConfig& c) { return fmt(member(const_cast<RunConfig&>(c))); },
                   [member](RunConfig& c, std::string_view v) { member(c) = parse_double(v); }});
    };
    auto integer = [&k](const char* name, bool behaviour, auto member) {
      k.push_back({name, behaviour,
                   [member](const RunConfig& c) { return std::to_string(member(const_cast<RunConfig&>(c))); },
                   [member](RunConfig& c, std::string_view v) {
                     using T = std::remove_reference_t<decltype(member(c))>;
                     if constexpr (std::is_same_v<T, int>) member(c) = parse_int(v);
                     else member(c) = parse_long(v);
                   }});
    };
    auto boolean = [&k](const char* name, bool behaviour, auto member) {
      k.push_back({name, behaviour,
                   [member](const RunConfig& c) {
                     return std::string(member(const_cast<RunConfig&>(c)) ? "true" : "false");
                   },
                   [member](RunConfig& c, std::string_view v) { member(c) = parse_bool(v); }});
    };
    auto text = [&k](const char* name, bool behaviour, auto member) {
      k.push_back({name, behaviour, [member](const RunConfig& c) { return member(const_cast<RunConfig&>(c)); },
                   [member](RunConfig& c, std::string_view v) { member(c) = std::string(trim(v)); }});
    };

    text("wiring", false, [](RunConfig& c) -> std::string& { return c.wiring; });
    text("init", true, [](RunConfig& c) -> std::string& { return c.init; });
    k.push_back({"seed", true, [](const RunConfig& c) { return std::to_string(c.search.seed); },
                 [](RunConfig& c, std::string_view v) { c.search.seed = parse_u64(v); }});

    k.push_back({"env.task", true, [](const RunConfig& c) { return task_name(c.env.mode); },
                 [](RunConfig& c, std::string_view v) { c.env.mode = parse_task(trim(v)); }});
    real("env.cart_mass", true, [](RunConfig& c) -> double& { return c.env.cart_mass; });
    real("env.pole_mass", true, [](RunConfig& c) -> double& { return c.env.pole_mass; });
    real("env.pole_half_length", true, [](RunConfig& c) -> double& { return c.env.pole_half_length; });
    real("env.gravity", true, [](RunConfig& c) -> double& { return c.env.gravity; });
    real("env.force_max", true, [](RunConfig& c) -> double& { return c.env.force_max; });
    real("env.track_limit", true, [](RunConfig& c) -> double& { return c.env.track_limit; });
    boolean("env.track_termination", true, [](RunConfig& c) -> bool& { return c.env.track_termination; });
    real("env.angle_limit", true, [](RunConfig& c) -> double& { return c.env.angle_limit; });
    integer("env.horizon", true, [](RunConfig& c) -> int& { return c.env.horizon; });
    real("env.dt", true, [](RunConfig& c) -> double& { return c.env.env_dt; });
    real("env.init_angle_spread", true, [](RunConfig& c) -> double& { return c.env.init_angle_spread; });

    real("solver.dt", true, [](RunConfig& c) -> double& { return c.solver.dt; });
    integer("solver.substeps", true, [](RunConfig& c) -> int& { return c.solver.substeps_per_env_step; });
    k.push_back({"circuit.sigmoid_sign", true,
                 [](const RunConfig& c) { return std::string(to_string(c.sigmoid_sign)); },
                 [](RunConfig& c, std::string_view v) {
                   const auto s = parse_sigmoid_sign(trim(v));
                   if (!s) throw ConfigError("unknown sigmoid sign '" + std::string(v) + "' (expected increasing or decreasing)");
                   c.sigmoid_sign = *s;
                 }});

    k.push_back({"mapping.phi", true, [](const RunConfig& c) { return render_sensory(c, ObservedVariable::kAngle); },
                 [](RunConfig& c, std::string_view v) { set_sensory(c, ObservedVariable::kAngle, v); }});
    k.push_back({"mapping.phi_dot", true,
                 [](const RunConfig& c) { return render_sensory(c, ObservedVariable::kAngularVelocity); },
                 [](RunConfig& c, std::string_view v) { set_sensory(c, ObservedVariable::kAngularVelocity, v); }});
    k.push_back({"mapping.action", true,
                 [](const RunConfig& c) {
                   const auto& m = c.mapping.motor;
                   return m.pos_neuron + ' ' + m.neg_neuron + ' ' + fmt(m.y_min) + ' ' + fmt(m.y_max);
                 },
                 [](RunConfig& c, std::string_view v) {
                   const auto t = split_ws(v);
                   if (t.size() != 4) throw ConfigError("expected '<POS> <NEG> <min> <max>'");
                   c.mapping.motor = {t[0], t[1], parse_double(t[2]), parse_double(t[3])};
                 }});

    integer("search.episodes", true, [](RunConfig& c) -> int& { return c.search.episodes; });
    integer("search.worst_k", true, [](RunConfig& c) -> int& { return c.search.worst_k; });
    integer("search.reuse_limit", true, [](RunConfig& c) -> int& { return c.search.reuse_limit; });
    real("search.perturbation_scale", true, [](RunConfig& c) -> double& { return c.search.perturbation_scale; });
    k.push_back({"search.estimator", true, [](const RunConfig& c) { return std::string(to_string(c.search.estimator)); },
                 [](RunConfig& c, std::string_view v) {
                   const auto e = parse_estimator(trim(v));
                   if (!e) throw ConfigError("unknown estimator '" + std::string(v) + "' (expected worst_k, mean or min)");
                   c.search.estimator = *e;
                 }});
    integer("search.max_iterations", false, [](RunConfig& c) -> long& { return c.search.max_iterations; });
    real("search.max_wall_clock_s", false, [](RunConfig& c) -> double& { return c.search.max_wall_clock_s; });

    real("pd.kp", true, [](RunConfig& c) -> double& { return c.pd.kp; });
    real("pd.kd", true, [](RunConfig& c) -> double& { return c.pd.kd; });

    boolean("log_timing", true, [](RunConfig& c) -> bool& { return c.log_timing; });
    integer("checkpoint_every", false, [](RunConfig& c) -> long& { return c.checkpoint_every; });
    text("output_dir", false, [](RunConfig& c) -> std::string& { return c.output_dir; });
    integer("jobs", false, [](RunConfig& c) -> int& { return c.jobs; });
    return k;
  }();
  return table;
}

const Key& lookup(std::string_view name) {
  for (const auto& k : keys())
    if (name == k.name) return k;
  throw ConfigError("unknown configuration key '" + std::string(name) + "'");
}

void assign(RunConfig& config, std::string_view key, std::string_view value) {
  const Key& k = lookup(key);
  try {
    k.set(config, trim(value));
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(key) + ": " + e.what());
  }
}

}  // namespace

InterfaceMapping MappingConfig::resolve(const Topology& topo) const {
  InterfaceMapping m;
  for (const auto& s : sensory)
    m.sensory.push_back({s.variable, topo.index_of(s.pos_neuron), topo.index_of(s.neg_neuron), s.x_min, s.x_max});
  m.motor = {topo.index_of(motor.pos_neuron), topo.index_of(motor.neg_neuron), motor.y_min, motor.y_max};
  m.validate(topo);
  return m;
}

void RunConfig::validate() const {
  env.validate();
  solver.validate();
  search.validate();
  for (const auto& s : mapping.sensory)
    if (!(s.x_min < 0.0 && s.x_max > 0.0))
      throw ConfigError("mapping." + std::string(to_string(s.variable)) + " needs min < 0 < max");
  if (!(mapping.motor.y_min < 0.0 && mapping.motor.y_max > 0.0))
    throw ConfigError("mapping.action needs min < 0 < max");
  if (wiring.empty()) throw ConfigError("wiring path is empty");
  if (init.empty()) throw ConfigError("init is empty");
  if (output_dir.empty()) throw ConfigError("output_dir is empty");
  if (checkpoint_every < 1) throw ConfigError("checkpoint_every must be at least 1");
  if (jobs < 1) throw ConfigError("jobs must be at least 1");
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  int line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw WiringError(line_no, "expected 'key = value'");
    try {
      assign(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw WiringError(line_no, e.what());
    }
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  const std::string text = read_file(path);
  try {
    return parse_config(text, std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_override(RunConfig& config, std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos)
    throw ConfigError("override '" + std::string(assignment) + "' is not of the form key=value");
  assign(config, trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

std::string serialize_config(const RunConfig& config, bool behaviour_only) {
  std::string out;
  for (const auto& k : keys()) {
    if (behaviour_only && !k.behaviour) continue;
    out += k.name;
    out += " = ";
    out += k.get(config);
    out += '\n';
  }
  return out;
}

std::uint64_t config_hash(const RunConfig& config, std::string_view wiring_text) {
  return fnv1a64(wiring_text, fnv1a64(serialize_config(config, true)));
}

std::vector<std::string> config_keys() {
  std::vector<std::string> names;
  for (const auto& k : keys()) names.emplace_back(k.name);
  return names;
}

}  // namespace twc
