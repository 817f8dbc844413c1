#include "twc/checkpoint.hpp"

#include <map>

#include "twc/error.hpp"
#include "twc/io.hpp"

namespace twc {

namespace {

constexpr std::string_view kMagic = "twc-checkpoint";
constexpr std::string_view kChecksumKey = "checksum = ";

std::string_view next_line(std::string_view text, std::size_t& pos) {
  if (pos >= text.size()) throw CheckpointError("checkpoint is truncated");
  const auto end = text.find('\n', pos);
  if (end == std::string_view::npos) throw CheckpointError("checkpoint is truncated");
  const auto line = text.substr(pos, end - pos);
  pos = end + 1;
  return line;
}

std::pair<std::string_view, std::string_view> key_value(std::string_view line) {
  const auto eq = line.find(" = ");
  if (eq == std::string_view::npos) throw CheckpointError("malformed checkpoint line '" + std::string(line) + "'");
  return {line.substr(0, eq), line.substr(eq + 3)};
}

void expect(std::string_view line, std::string_view want) {
  if (line != want) throw CheckpointError("expected '" + std::string(want) + "', found '" + std::string(line) + "'");
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& cp) {
  const auto& r = cp.record;
  std::string s;
  s += std::string(kMagic) + ' ' + std::to_string(kCheckpointVersion) + '\n';
  s += "seed = " + std::to_string(cp.config.search.seed) + '\n';
  s += "config_hash = " + hex64(config_hash(cp.config, cp.wiring_text)) + '\n';
  s += "[config]\n" + serialize_config(cp.config);
  s += "[wiring]\n";
  std::size_t pos = 0;
  while (pos < cp.wiring_text.size()) {
    const auto end = std::min(cp.wiring_text.find('\n', pos), cp.wiring_text.size());
    s += "| " + cp.wiring_text.substr(pos, end - pos) + '\n';
    pos = end + 1;
  }
  s += "[record]\n";
  s += "iteration = " + std::to_string(r.iteration) + '\n';
  s += "initial_value = " + format_double(r.initial_value) + '\n';
  s += "estimate = " + format_double(r.estimate.value) + ' ' + std::to_string(r.estimate.n_samples) + ' ' +
       std::to_string(r.estimate.k_worst) + ' ' + std::to_string(r.estimate.uses) + '\n';
  s += "elapsed_s = " + format_double(cp.config.log_timing ? r.elapsed_s : 0.0) + '\n';
  s += "theta =";
  for (Eigen::Index i = 0; i < r.theta.size(); ++i) s += ' ' + format_double(r.theta[i]);
  s += '\n';
  s += "rng = " + r.rng.serialize() + '\n';
  s += "[end]\n";
  s += std::string(kChecksumKey) + hex64(fnv1a64(s)) + '\n';
  return s;
}

Checkpoint parse_checkpoint(std::string_view text) {
  const auto tail = text.rfind(kChecksumKey);
  if (tail == std::string_view::npos || text.empty() || text.back() != '\n')
    throw CheckpointError("checkpoint is truncated (no checksum line)");
  const auto stored = trim(text.substr(tail + kChecksumKey.size()));
  if (stored != hex64(fnv1a64(text.substr(0, tail))))
    throw CheckpointError("checkpoint checksum mismatch");
  const std::string_view body = text.substr(0, tail);

  std::size_t pos = 0;
  const auto magic = split_ws(next_line(body, pos));
  if (magic.size() != 2 || magic[0] != kMagic) throw CheckpointError("not a checkpoint file");
  if (magic[1] != std::to_string(kCheckpointVersion))
    throw CheckpointError("unsupported checkpoint version " + magic[1] + " (expected " +
                          std::to_string(kCheckpointVersion) + ")");

  Checkpoint cp;
  try {
    const auto [k_seed, seed] = key_value(next_line(body, pos));
    expect(k_seed, "seed");
    const auto [k_hash, hash] = key_value(next_line(body, pos));
    expect(k_hash, "config_hash");

    expect(next_line(body, pos), "[config]");
    std::string config_text;
    for (auto line = next_line(body, pos); line != "[wiring]"; line = next_line(body, pos)) {
      config_text += line;
      config_text += '\n';
    }
    cp.config = parse_config(config_text);
    for (auto line = next_line(body, pos); line != "[record]"; line = next_line(body, pos)) {
      if (line.substr(0, 2) != "| ") throw CheckpointError("malformed wiring line in checkpoint");
      cp.wiring_text += line.substr(2);
      cp.wiring_text += '\n';
    }
    if (parse_u64(seed) != cp.config.search.seed) throw CheckpointError("checkpoint seed does not match its config");
    if (hash != hex64(config_hash(cp.config, cp.wiring_text)))
      throw CheckpointError("checkpoint config hash does not match its contents");

    std::map<std::string, std::string, std::less<>> fields;
    for (auto line = next_line(body, pos); line != "[end]"; line = next_line(body, pos)) {
      const auto [k, v] = key_value(line);
      fields.emplace(std::string(k), std::string(v));
    }
    auto field = [&fields](std::string_view key) -> const std::string& {
      const auto it = fields.find(key);
      if (it == fields.end()) throw CheckpointError("checkpoint record lacks '" + std::string(key) + "'");
      return it->second;
    };

    TrainingRecord& r = cp.record;
    r.config = cp.config.search;
    r.iteration = parse_long(field("iteration"));
    r.initial_value = parse_double(field("initial_value"));
    const auto est = split_ws(field("estimate"));
    if (est.size() != 4) throw CheckpointError("malformed estimate line");
    r.estimate = {parse_double(est[0]), static_cast<int>(parse_long(est[1])), static_cast<int>(parse_long(est[2])),
                  static_cast<int>(parse_long(est[3]))};
    r.elapsed_s = parse_double(field("elapsed_s"));
    const auto theta = split_ws(field("theta"));
    r.theta.resize(static_cast<Eigen::Index>(theta.size()));
    for (std::size_t i = 0; i < theta.size(); ++i) r.theta[static_cast<Eigen::Index>(i)] = parse_double(theta[i]);
    r.rng = Rng::deserialize(field("rng"));
  } catch (const CheckpointError&) {
    throw;
  } catch (const ConfigError& e) {
    throw CheckpointError(std::string("corrupt checkpoint: ") + e.what());
  }
  if (pos != body.size()) throw CheckpointError("unexpected content after checkpoint record");
  return cp;
}

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path) {
  write_file_atomic(path, serialize_checkpoint(checkpoint));
}

Checkpoint load_checkpoint(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const ConfigError&) {
    throw CheckpointError("cannot open checkpoint '" + path + "'");
  }
  try {
    return parse_checkpoint(text);
  } catch (const CheckpointError& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

}  // namespace twc
