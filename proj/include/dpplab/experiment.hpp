#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dpplab {

// One experiment invocation: a command plus the union of its parameters.
// Kernel-driven commands read a JSON kernel spec
//   {"kind": "sine" | "gaussian" | "projection-fourier",
//    "params": {...}, "window": {"lo": [...], "hi": [...]}}
// either from kernel_file or, when replaying, from the inline kernel_json.
struct ExperimentConfig {
  std::string command;      // sample | correlations | fredholm | count-law |
                            // thin | diffuse | modelc
  std::string kernel_file;
  std::string kernel_json;  // inline spec; takes precedence over kernel_file
  std::string window_override;  // "lo,hi[,lo,hi...]", empty = spec window
  std::uint64_t seed = 1;
  int n = 1000;             // sample count, or particle count for diffuse
  std::string out_dir;
  std::string method = "all";  // fredholm route selection
  int grid = 24;            // quadrature points per axis for decompositions
  int bins = 25;            // correlation histogram bins
  double mass = 1.0;
  double theta = 1.0;
  double dt = 1e-3;
  double total_time = 1.0;
  std::string demo = "gaussian";
  std::vector<double> removal;  // thinning point; empty = window center
};

// Validates the config, runs the command, and writes every artifact
// atomically into out_dir, finishing with manifest.json (config echo,
// artifact content hashes, wall time, status). Returns the process exit
// code: 0 success, 2 validation error (nothing written), 3 numerical
// contract failure (artifacts and manifest carry the error).
int run_experiment(const ExperimentConfig& cfg);

// Re-runs the config echoed in a manifest into out_dir, then compares the
// fresh artifact hashes against the recorded ones (wall time is excluded).
// 0 when every artifact matches byte for byte, 2 on an unreadable manifest,
// 3 on any mismatch.
int replay_manifest(const std::string& manifest_path, const std::string& out_dir);

// 64-bit FNV-1a content hash, 16 hex digits
std::string fnv1a_hex(const std::string& bytes);

// write via a temp file in the target directory plus rename
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace dpplab
