#pragma once

// Text I/O helpers: exact number formatting, hashing, parameter files, CSV
// artifacts.

#include <cstdint>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "twc/circuit.hpp"
#include "twc/policy.hpp"
#include "twc/search.hpp"

namespace twc {

// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
// Throws ConfigError on trailing garbage or out-of-range input.
double parse_double(std::string_view text);
long parse_long(std::string_view text);
std::uint64_t parse_u64(std::string_view text);
bool parse_bool(std::string_view text);

std::vector<std::string> split_ws(std::string_view text);
std::string_view trim(std::string_view text);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);
// Writes via a temporary sibling and renames, so readers never see a partial file.
void write_file_atomic(const std::string& path, std::string_view contents);

// Named parameter file:
//   neuron <NAME> <C_m> <G_Leak> <V_Leak>
//   chem <PRE> <POST> <w> <sigma>
//   gap <A> <B> <w_hat>
// Every topology element must appear exactly once.
std::string serialize_parameters(const Topology& topo, const Eigen::VectorXd& theta);
Eigen::VectorXd parse_parameters(std::string_view text, const Topology& topo);

struct ArtifactHeader {
  std::string kind;  // "iteration-log", "trace", ...
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::string config_text;  // embedded as '# ' comment lines
};

std::string render_header(const ArtifactHeader& header);

inline constexpr std::string_view kIterationLogColumns =
    "iteration,candidate_f,incumbent_f,accepted,reevaluated,wall_clock_s";

std::string format_log_row(const IterationLogRow& row, bool with_timing);
IterationLogRow parse_log_row(std::string_view line);

// Append-only iteration log. Opening with `resume_after` keeps the header and
// every row up to that iteration and drops the rest. Throws CheckpointError
// when an existing log's header does not match.
class IterationLog {
 public:
  IterationLog(const std::string& path, const ArtifactHeader& header, bool with_timing,
               long resume_after = -1);
  void append(const IterationLogRow& row);
  void flush() { out_.flush(); }

 private:
  std::ofstream out_;
  bool with_timing_;
};

// Trace columns: t, x, x_dot, phi, phi_dot, one per neuron, action, reward.
std::string trace_columns(const Topology& topo);
std::string render_trace(const ArtifactHeader& header, const Topology& topo, const std::vector<TraceRecord>& trace,
                         double env_dt);

// Parses the numeric rows of any CSV artifact (comment and header lines skipped).
std::vector<std::vector<double>> parse_csv_rows(std::string_view text);

}  // namespace twc
