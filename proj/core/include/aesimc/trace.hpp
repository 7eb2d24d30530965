#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "aesimc/crossbar.hpp"

namespace aesimc {

/// One timed, energy-costed micro-operation.
struct MicroOpEvent {
  std::uint64_t cycle = 0;
  std::uint32_t bank = 0;
  std::uint32_t lane = 0;
  OpKind op = OpKind::RowRead;
  int row = -1;
  ColMask col_mask = 0;
  std::uint32_t latency = 0;
  double energy_pj = 0.0;
  bool cross_lane = false;

  friend bool operator==(const MicroOpEvent&, const MicroOpEvent&) = default;
};

class Trace {
 public:
  void add(const MicroOpEvent& event) { events_.push_back(event); }
  void append(const Trace& other);
  void clear() { events_.clear(); }

  std::span<const MicroOpEvent> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  double total_energy_pj() const;

  /// One JSON object per line:
  /// {"cycle":..,"bank":..,"lane":..,"op":"SA_XOR","row":..|null,"col_mask":..,"energy_pJ":..}
  void write_jsonl(std::ostream& out) const;

 private:
  std::vector<MicroOpEvent> events_;
};

/// Latest completion time over the events, max(cycle + latency), with each
/// latency recomputed from the cost table rather than read from the event.
/// Cross-lane transfers add `cross_lane_cycles_per_byte` per byte moved.
std::uint64_t trace_critical_path(std::span<const MicroOpEvent> events, const CostTable& costs,
                                  std::uint32_t cross_lane_cycles_per_byte = 0);

/// Stamps array operations with cycles and energy for one bank.
///
/// Each lane owns a clock. An operation issues at its lane's clock and
/// advances it by the op's latency. sync() is a barrier across lanes.
/// Stages are delimited by begin_stage/end_stage; a stage with an explicit
/// budget occupies exactly that many cycles and must contain its ops.
class Timeline {
 public:
  static constexpr std::size_t kLanes = 2;

  Timeline(const CostTable& costs, std::uint32_t bank, std::uint64_t origin, Trace* sink);

  void record(std::uint32_t lane, const OpRecord& record, std::uint32_t extra_latency = 0);
  void sync();

  void begin_stage();
  /// Closes the current stage and returns its length in cycles. Throws
  /// ConfigError if the ops do not fit an explicit budget.
  std::uint64_t end_stage(std::optional<std::uint32_t> budget, std::string_view name);

  std::uint64_t now() const;
  std::uint64_t origin() const noexcept { return origin_; }
  double energy_pj() const noexcept { return energy_pj_; }
  std::uint64_t count(OpKind kind) const { return counts_[static_cast<std::size_t>(kind)]; }

 private:
  const CostTable& costs_;
  std::uint32_t bank_;
  std::uint64_t origin_;
  Trace* sink_;
  std::array<std::uint64_t, kLanes> clocks_{};
  std::uint64_t stage_start_ = 0;
  double energy_pj_ = 0.0;
  std::array<std::uint64_t, kOpKindCount> counts_{};
};

}  // namespace aesimc
