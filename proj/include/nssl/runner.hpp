/// @file runner.hpp
/// @brief Batch front-end behind the nssl executable.
#pragma once

#include <cstdint>
#include <string>

#include "nssl/detector.hpp"

namespace nssl {

/// One resolved invocation. The lattice is kept as raw JSON text; run()
/// parses it per command (see the command notes below).
struct RunConfig {
  std::string command;  // gen | norms | invariants | scan | verify
  std::string input;
  std::string output;  // empty -> stdout for row-oriented commands
  double delta = 1e-2;
  double eps_star = 1e-3;
  double delta_star = 0.0;  // 0 -> delta / C_EMB_CALIBRATED
  double c_cal = 0.0;       // 0 -> C_CAL_CALIBRATED
  int jobs = 0;             // 0 -> hardware concurrency
  std::uint64_t seed = 7;
  bool seed_given = false;  // true when --seed was passed explicitly
  std::string lattice_json;

  DetectorConfig detector() const;
  /// FNV-1a over the canonical serialization of every field above; stamped
  /// into all outputs so result files can be traced to their invocation.
  std::string hash() const;
};

/// Executes one command:
///   gen        --input spec.json --output field.nssf
///   norms      --input field.nssf --lattice '{"t":[..],"x0":[[..]],"r":[..],"p":[..]}' -> CSV
///   invariants --input field.nssf --lattice '{"t0":[..],"x0":[[..]],"r":[..]}' -> JSON lines
///   scan       --input field.nssf --lattice '{"x0":[[..]],"r":[..],"p":[..],"nu":[..]}' -> JSON lines
///   verify     property-oracle suite; text report on stdout, JSON to --output
/// Returns 0 on success, 1 on runtime/suite failure, 2 on usage errors.
/// Set NSSL_LOG=info or NSSL_LOG=debug for progress on stderr.
int run(const RunConfig& config);

}  // namespace nssl
