#pragma once

// Run configuration: flat `key=value` text with dotted section prefixes.
//
//   geometry.rows=16
//   cost.preset=calibrated
//   cost.sbox_eval.cycles=1
//
// Blank lines and lines starting with '#' are ignored.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aesimc/metrics.hpp"
#include "aesimc/pipeline.hpp"

namespace aesimc {

struct RunConfig {
  std::size_t rows = 16;
  std::size_t cols = 16;
  LaneLayout layout;
  ParallelismConfig parallelism;

  std::string cost_preset = "calibrated";  // calibrated | zero | unit | custom
  CostTable costs = CostTable::calibrated();

  std::string schedule_preset = "calibrated";  // calibrated | derived | explicit
  std::vector<std::uint32_t> stage_budgets;  // explicit preset only
  std::uint64_t initiation_interval = 0;
  std::uint32_t cross_lane_cycles = 0;
  bool fuse_sub_shift = true;

  double f_max_hz = 108.9e6;
  double f_rf_hz = metrics::kDefaultRfHz;
  double f_uniform_hz = metrics::kDefaultUniformHz;
  double slices = 468;
  double power_w = 0.098;
  double ciphers = 24096;

  std::size_t banks = 1;
  std::uint64_t seed = 5489;
  std::size_t threads = 1;

  std::string trace_path;
  std::string report_path;

  /// Every effective setting as canonical key/value text.
  std::map<std::string, std::string> canonical() const;
  /// FNV-1a 64 of the canonical settings, as 16 hex digits. Output paths and
  /// the thread count do not take part.
  std::string hash() const;

  EngineConfig engine() const;
  /// Metric inputs with the latency taken from a measured block.
  metrics::MetricsInput metrics_input(std::uint64_t latency_cycles) const;
};

/// Parses configuration text. Keys not set keep their defaults. Throws
/// ConfigError on unknown keys, bad values, or presets that do not exist.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Builds a configuration from already-split settings. Preset keys are
/// applied before the per-entry overrides regardless of order.
RunConfig config_from_settings(const std::map<std::string, std::string>& settings);

std::uint64_t fnv1a64(std::string_view text);

}  // namespace aesimc
