#pragma once

// Versioned text checkpoint of a training run.
//
//   twc-checkpoint 1
//   seed = <u64>
//   config_hash = <16 hex digits>
//   [config]
//   <key = value lines, full RunConfig>
//   [wiring]
//   | <wiring file line>            (verbatim, one per line)
//   [record]
//   iteration = <long>
//   initial_value = <double>
//   estimate = <value> <n_samples> <k_worst> <uses>
//   elapsed_s = <double>
//   theta = <double> ...
//   rng = <engine state>
//   [end]
//   checksum = <FNV-1a 64 of every preceding byte, hex>
//
// Doubles use shortest round-trip decimal text, so loading reproduces the
// record bit for bit.

#include <string>
#include <string_view>

#include "twc/config.hpp"
#include "twc/search.hpp"

namespace twc {

inline constexpr int kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  std::string wiring_text;
  TrainingRecord record;
};

// elapsed_s is written as 0 when config.log_timing is off, which keeps
// checkpoints of equal runs byte-identical.
std::string serialize_checkpoint(const Checkpoint& checkpoint);

// Throws CheckpointError on version mismatch, checksum failure, truncation or
// malformed content.
Checkpoint parse_checkpoint(std::string_view text);

void save_checkpoint(const Checkpoint& checkpoint, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

}  // namespace twc
