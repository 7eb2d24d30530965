#pragma once

// Schedules a block's phases across its two lanes, runs streams of blocks
// through one lane pair, and spreads streams over independent banks.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aesimc/crossbar.hpp"
#include "aesimc/gf_aes_ref.hpp"
#include "aesimc/sequencer.hpp"
#include "aesimc/trace.hpp"

namespace aesimc {

enum class Phase {
  Load,         // plaintext and key written into the lanes
  InitialArk,   // AddRoundKey with the cipher key
  SubShift,     // SubBytes with ShiftRows staging
  MixArk,       // MixColumns, key update, AddRoundKey
  FinalArk,     // key update and AddRoundKey of the last round
  Drain,        // ciphertext readout
};

struct Stage {
  std::string name;
  Phase phase = Phase::Load;
  std::size_t round = 0;
  /// Explicit cycle budget; when empty the stage lasts as long as its ops.
  std::optional<std::uint32_t> budget;
};

/// The 23 stages of one block. Either every stage carries an explicit
/// budget or none does.
struct Schedule {
  std::vector<Stage> stages;

  static constexpr std::size_t kStageCount = 23;

  /// Budgets 1 (load) + 1 (initial ARK) + 2 per round for ten rounds +
  /// 4 (drain) = 26 cycles.
  static Schedule calibrated();
  /// No budgets; cycle counts come from the cost table's latencies.
  static Schedule derived();
  /// Budgets given in stage order.
  static Schedule explicit_budgets(std::span<const std::uint32_t> budgets);

  bool is_explicit() const;
  std::optional<std::uint64_t> explicit_total() const;
};

struct EngineConfig {
  std::size_t rows = 16;
  std::size_t cols = 16;
  LaneLayout layout;
  ParallelismConfig parallelism;
  CostTable costs = CostTable::calibrated();
  Schedule schedule = Schedule::calibrated();
  /// Extra latency per byte moved through the cross-lane port.
  std::uint32_t cross_lane_cycles = 0;
  /// Cycles between successive block starts in one bank; 0 means one block
  /// latency (no overlap).
  std::uint64_t initiation_interval = 0;
  /// Stage SubBytes outputs at their ShiftRows destinations.
  bool fuse_sub_shift = true;
  std::size_t banks = 1;
};

struct BlockJob {
  Block plaintext{};
  Key128 key{};
};

struct BlockResult {
  Block ciphertext{};
  std::uint64_t cycles = 0;
  double energy_pj = 0.0;
  std::array<std::uint64_t, kOpKindCount> op_counts{};
};

struct AggregateReport {
  std::uint64_t blocks = 0;
  std::uint64_t cycles_total = 0;
  double energy_pj_total = 0.0;
  std::uint64_t cycles_per_block = 0;
  double energy_per_block_pj = 0.0;
  std::string config_hash;
  std::vector<Block> ciphertexts;

  /// {blocks, cycles_total, energy_pJ_total, cycles_per_block,
  ///  energy_per_block_pJ, config_hash}
  std::string to_json() const;
};

class PipelineEngine {
 public:
  /// Validates the configuration and measures the per-block latency with a
  /// probe block. Throws ConfigError on an inconsistent schedule.
  explicit PipelineEngine(EngineConfig config, std::string config_hash = {});

  const EngineConfig& config() const noexcept { return config_; }
  std::uint64_t cycles_per_block() const noexcept { return cycles_per_block_; }
  std::uint64_t initiation_interval() const noexcept { return initiation_interval_; }

  /// Encrypts one block on a fresh lane pair. Events are stamped from
  /// `origin` on bank `bank`.
  BlockResult run_block(const Block& plaintext, const Key128& key, Trace* trace = nullptr,
                        std::uint32_t bank = 0, std::uint64_t origin = 0) const;

  /// Blocks issued back to back on one bank, one initiation interval apart.
  AggregateReport run_stream(std::span<const BlockJob> jobs, Trace* trace = nullptr,
                             std::uint32_t bank = 0) const;

  /// Round-robin over `config().banks` banks. Banks may be simulated on up to
  /// `workers` threads; results are reduced in bank order.
  AggregateReport run_banked(std::span<const BlockJob> jobs, Trace* trace = nullptr,
                             std::size_t workers = 1) const;

  /// Cycles to push `n` blocks through one bank.
  std::uint64_t stream_cycles(std::uint64_t n) const;

 private:
  BlockResult run_on(LanePair& pair, const Block& plaintext, const Key128& key, Trace* trace,
                     std::uint32_t bank, std::uint64_t origin) const;

  EngineConfig config_;
  std::string config_hash_;
  std::uint64_t cycles_per_block_ = 0;
  std::uint64_t initiation_interval_ = 0;
};

}  // namespace aesimc
