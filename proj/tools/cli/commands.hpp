#pragma once

// The aesimc subcommands as plain functions, so they can be driven from
// tests without spawning a process.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aesimc/config.hpp"
#include "aesimc/pipeline.hpp"

namespace aesimc::cli {

enum ExitCode : int {
  kOk = 0,
  kMismatch = 1,
  kInputError = 2,
  kConfigError = 3,
};

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> banks;
  std::optional<std::size_t> threads;
  std::string trace_path;
  std::string out_path;
};

/// Loads `--config` (or the defaults) and applies command-line overrides.
RunConfig resolve_config(const CommonOptions& opts);

/// `n` plaintext/key pairs from mt19937_64 seeded with `seed`. Each pair
/// consumes four outputs: two for the plaintext, then two for the key, each
/// output contributing eight bytes least significant first.
std::vector<BlockJob> random_jobs(std::uint64_t seed, std::size_t n);

/// Parses "4", "1,2,4" or "1..8" into a list of positive integers.
std::vector<std::size_t> parse_range(const std::string& text, const std::string& knob);

struct EncryptOptions : CommonOptions {
  std::string input_path;
  std::string key_path;
};
int cmd_encrypt(const EncryptOptions& opts, std::ostream& out, std::ostream& err);

struct VerifyOptions : CommonOptions {
  std::size_t blocks = 10000;
};
int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err);

/// Compares simulated ciphertexts with the reference cipher. Prints the first
/// mismatch to `err` and returns its index, or nothing when all agree.
std::optional<std::size_t> first_mismatch(const std::vector<BlockJob>& jobs, const std::vector<Block>& got,
                                          std::ostream& err);

struct MetricsOptions : CommonOptions {
  std::string baselines_path;
  std::vector<std::string> compare;
  std::string audit_path;
};
int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream& err);

struct SweepOptions : CommonOptions {
  std::string sbox_units;
  std::string m2_units;
  std::string bank_counts;
  std::size_t blocks = 64;
};
int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err);

/// Full command line, as called from main().
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace aesimc::cli
