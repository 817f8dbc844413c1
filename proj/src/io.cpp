#include "twc/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <system_error>

#include "twc/error.hpp"
#include "twc/parameters.hpp"

namespace twc {

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = line.find(',', pos);
    fields.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return fields;
}

template <class T>
T parse_integer(std::string_view text, const char* what) {
  text = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return value;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
    throw ConfigError("invalid number '" + std::string(text) + "'");
  return value;
}

long parse_long(std::string_view text) { return parse_integer<long>(text, "integer"); }

std::uint64_t parse_u64(std::string_view text) { return parse_integer<std::uint64_t>(text, "unsigned integer"); }

bool parse_bool(std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError("invalid boolean '" + std::string(text) + "' (expected true or false)");
}

std::vector<std::string> split_ws(std::string_view text) {
  std::vector<std::string> out;
  std::istringstream is{std::string(text)};
  for (std::string t; is >> t;) out.push_back(std::move(t));
  return out;
}

std::string_view trim(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = text.find_last_not_of(" \t\r\n");
  return text.substr(first, last - first + 1);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (const unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp + "'");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw ConfigError("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw ConfigError("cannot move '" + tmp + "' to '" + path + "': " + ec.message());
}

std::string serialize_parameters(const Topology& topo, const Eigen::VectorXd& theta) {
  const CircuitParameters p = unflatten(theta, topo);
  std::ostringstream os;
  os << "# neuron NAME C_m G_Leak V_Leak\n# chem PRE POST w sigma\n# gap A B w_hat\n";
  for (std::size_t i = 0; i < topo.neurons().size(); ++i) {
    const auto& n = p.neurons[i];
    os << "neuron " << topo.neurons()[i].name << ' ' << format_double(n.capacitance) << ' '
       << format_double(n.leak_conductance) << ' ' << format_double(n.leak_potential) << '\n';
  }
  for (std::size_t i = 0; i < topo.chemical().size(); ++i) {
    const auto& s = topo.chemical()[i];
    os << "chem " << topo.neuron(s.pre).name << ' ' << topo.neuron(s.post).name << ' '
       << format_double(p.synapses[i].weight) << ' ' << format_double(p.synapses[i].sigma) << '\n';
  }
  for (std::size_t i = 0; i < topo.gaps().size(); ++i) {
    const auto& g = topo.gaps()[i];
    os << "gap " << topo.neuron(g.a).name << ' ' << topo.neuron(g.b).name << ' ' << format_double(p.gaps[i])
       << '\n';
  }
  return os.str();
}

Eigen::VectorXd parse_parameters(std::string_view text, const Topology& topo) {
  CircuitParameters p;
  p.neurons.resize(topo.neurons().size());
  p.synapses.resize(topo.chemical().size());
  p.gaps.resize(topo.gaps().size());
  std::vector<bool> seen_n(p.neurons.size()), seen_s(p.synapses.size()), seen_g(p.gaps.size());

  auto find_chem = [&](int pre, int post) -> int {
    for (std::size_t i = 0; i < topo.chemical().size(); ++i)
      if (topo.chemical()[i].pre == pre && topo.chemical()[i].post == post) return static_cast<int>(i);
    return -1;
  };
  auto find_gap = [&](int a, int b) -> int {
    for (std::size_t i = 0; i < topo.gaps().size(); ++i) {
      const auto& g = topo.gaps()[i];
      if ((g.a == a && g.b == b) || (g.a == b && g.b == a)) return static_cast<int>(i);
    }
    return -1;
  };
  auto mark = [](std::vector<bool>& seen, int i, int line, const std::string& what) {
    if (seen[i]) throw WiringError(line, "duplicate parameters for " + what);
    seen[i] = true;
  };

  int line_no = 0;
  for (std::string_view raw : split_lines(text)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string_view::npos) raw = raw.substr(0, hash);
    const auto t = split_ws(raw);
    if (t.empty()) continue;
    try {
      if (t[0] == "neuron" && t.size() == 5) {
        const auto id = topo.find(t[1]);
        if (!id) throw ConfigError("unknown neuron '" + t[1] + "'");
        mark(seen_n, *id, line_no, t[1]);
        p.neurons[*id] = {parse_double(t[2]), parse_double(t[3]), parse_double(t[4])};
      } else if (t[0] == "chem" && t.size() == 5) {
        const int i = find_chem(topo.index_of(t[1]), topo.index_of(t[2]));
        if (i < 0) throw ConfigError("no chemical synapse " + t[1] + " -> " + t[2]);
        mark(seen_s, i, line_no, t[1] + "->" + t[2]);
        p.synapses[i].weight = parse_double(t[3]);
        p.synapses[i].sigma = parse_double(t[4]);
      } else if (t[0] == "gap" && t.size() == 4) {
        const int i = find_gap(topo.index_of(t[1]), topo.index_of(t[2]));
        if (i < 0) throw ConfigError("no gap junction " + t[1] + " = " + t[2]);
        mark(seen_g, i, line_no, t[1] + "=" + t[2]);
        p.gaps[i] = parse_double(t[3]);
      } else {
        throw ConfigError("malformed parameter line");
      }
    } catch (const WiringError&) {
      throw;
    } catch (const ConfigError& e) {
      throw WiringError(line_no, e.what());
    }
  }
  auto require_all = [&](const std::vector<bool>& seen, const char* kind) {
    for (std::size_t i = 0; i < seen.size(); ++i)
      if (!seen[i]) throw ConfigError(std::string("parameter file is missing a ") + kind + " entry");
  };
  require_all(seen_n, "neuron");
  require_all(seen_s, "chem");
  require_all(seen_g, "gap");
  return flatten(p);
}

std::string render_header(const ArtifactHeader& header) {
  std::ostringstream os;
  os << "# twc " << header.kind << '\n';
  os << "# seed = " << header.seed << '\n';
  os << "# config_hash = " << hex64(header.config_hash) << '\n';
  for (const auto line : split_lines(header.config_text)) os << "#   " << line << '\n';
  return os.str();
}

std::string format_log_row(const IterationLogRow& row, bool with_timing) {
  std::string s = std::to_string(row.iteration);
  s += ',';
  s += format_double(row.candidate_f);
  s += ',';
  s += format_double(row.incumbent_f);
  s += row.accepted ? ",1" : ",0";
  s += row.reevaluated ? ",1," : ",0,";
  s += format_double(with_timing ? row.wall_clock_s : 0.0);
  return s;
}

IterationLogRow parse_log_row(std::string_view line) {
  const auto f = split_commas(trim(line));
  if (f.size() != 6) throw ConfigError("iteration log row needs 6 fields");
  IterationLogRow row;
  row.iteration = parse_long(f[0]);
  row.candidate_f = parse_double(f[1]);
  row.incumbent_f = parse_double(f[2]);
  row.accepted = parse_bool(f[3]);
  row.reevaluated = parse_bool(f[4]);
  row.wall_clock_s = parse_double(f[5]);
  return row;
}

IterationLog::IterationLog(const std::string& path, const ArtifactHeader& header, bool with_timing,
                           long resume_after)
    : with_timing_(with_timing) {
  const std::string head = render_header(header) + std::string(kIterationLogColumns) + '\n';
  if (resume_after < 0) {
    write_file_atomic(path, head);
  } else {
    std::string existing;
    try {
      existing = read_file(path);
    } catch (const ConfigError&) {
      throw CheckpointError("iteration log '" + path + "' is missing; cannot resume");
    }
    if (existing.compare(0, head.size(), head) != 0)
      throw CheckpointError("iteration log '" + path + "' was written by a different run");
    std::string kept = head;
    for (const auto line : split_lines(std::string_view(existing).substr(head.size()))) {
      if (trim(line).empty()) continue;
      IterationLogRow row;
      try {
        row = parse_log_row(line);
      } catch (const ConfigError&) {
        break;  // torn final line from an interrupted write
      }
      if (row.iteration > resume_after) break;
      kept.append(line);
      kept += '\n';
    }
    write_file_atomic(path, kept);
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw ConfigError("cannot append to '" + path + "'");
}

void IterationLog::append(const IterationLogRow& row) { out_ << format_log_row(row, with_timing_) << '\n'; }

std::string trace_columns(const Topology& topo) {
  std::string s = "t,x,x_dot,phi,phi_dot";
  for (const auto& n : topo.neurons()) s += ',' + n.name;
  s += ",action,reward";
  return s;
}

std::string render_trace(const ArtifactHeader& header, const Topology& topo, const std::vector<TraceRecord>& trace,
                         double env_dt) {
  std::string s = render_header(header) + trace_columns(topo) + '\n';
  const auto n = static_cast<Eigen::Index>(topo.size());
  for (const auto& r : trace) {
    s += format_double(r.env.step_count * env_dt);
    for (const double v : {r.env.x, r.env.x_dot, r.env.phi, r.env.phi_dot}) s += ',' + format_double(v);
    for (Eigen::Index i = 0; i < n; ++i)
      s += ',' + (r.potentials.size() == n ? format_double(r.potentials[i]) : std::string("nan"));
    s += ',' + format_double(r.action) + ',' + format_double(r.reward) + '\n';
  }
  return s;
}

std::vector<std::vector<double>> parse_csv_rows(std::string_view text) {
  std::vector<std::vector<double>> rows;
  bool header_seen = false;
  for (const auto line : split_lines(text)) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    std::vector<double> row;
    for (const auto field : split_commas(line)) row.push_back(parse_double(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace twc
