#pragma once

// Behavioral model of a memristor crossbar with 4-bit (16-level) cells,
// per-column sense amplifiers (capacitor slot + latch slot), single-bit
// latches, and a row buffer. Every state-changing or sensing operation is
// reported to an observer as an OpRecord so that a controller can cost it.

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace aesimc {

using ColMask = std::uint64_t;

enum class OpKind : std::uint8_t {
  RowRead,
  RowWrite,
  SaXor,
  SboxEval,
  M2Eval,
  OffsetWrite,
  BufferWriteback,
};

inline constexpr std::size_t kOpKindCount = 7;
inline constexpr std::array<OpKind, kOpKindCount> kAllOpKinds = {
    OpKind::RowRead,  OpKind::RowWrite,    OpKind::SaXor,          OpKind::SboxEval,
    OpKind::M2Eval,   OpKind::OffsetWrite, OpKind::BufferWriteback};

/// Upper-case trace name, e.g. "ROW_READ".
std::string_view op_name(OpKind kind);
/// Lower-case config name, e.g. "row_read".
std::string_view op_config_name(OpKind kind);
std::optional<OpKind> op_from_config_name(std::string_view name);

struct CostEntry {
  std::uint32_t cycles = 0;
  double energy_pj = 0.0;

  friend bool operator==(const CostEntry&, const CostEntry&) = default;
};

/// Latency (cycles) and energy (pJ) charged per emitted event of each kind.
class CostTable {
 public:
  CostTable() = default;

  /// Preset whose energies reproduce the published per-block energy under the
  /// default schedule. Latencies are zero: every micro-op settles inside the
  /// clock of the stage that issues it.
  static CostTable calibrated();
  static CostTable zero();
  static CostTable uniform(std::uint32_t cycles, double energy_pj);

  const CostEntry& operator[](OpKind kind) const { return entries_[static_cast<std::size_t>(kind)]; }
  CostEntry& operator[](OpKind kind) { return entries_[static_cast<std::size_t>(kind)]; }

  CostTable with_latency_scaled(std::uint32_t factor) const;
  CostTable with_zero_energy() const;

  friend bool operator==(const CostTable&, const CostTable&) = default;

 private:
  std::array<CostEntry, kOpKindCount> entries_{};
};

/// One operation as seen by the array. `values` carries the levels written
/// by ROW_WRITE and BUFFER_WRITEBACK, one per set bit of `col_mask` in
/// ascending column order; it is empty for every other kind.
struct OpRecord {
  OpKind kind = OpKind::RowRead;
  int row = -1;
  ColMask col_mask = 0;
  int src_col = -1;
  int dst_col = -1;
  bool cross_lane = false;
  std::vector<std::uint8_t> values;
};

/// A value headed for the row buffer via an address offset.
struct Transfer {
  std::size_t src_col = 0;
  std::size_t dst_col = 0;
  std::uint8_t level = 0;
};

class CrossbarArray {
 public:
  static constexpr std::size_t kMaxCols = 64;
  static constexpr std::uint8_t kMaxLevel = 15;
  using Observer = std::function<void(const OpRecord&)>;

  CrossbarArray(std::size_t rows, std::size_t cols);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  ColMask all_columns() const noexcept;

  void set_observer(Observer observer) { observer_ = std::move(observer); }

  void write_cell(std::size_t row, std::size_t col, std::uint8_t level);
  /// Programs the masked columns of `row` in one batched ROW_WRITE.
  /// `levels` is indexed by column and must span every column of the array.
  void write_row(std::size_t row, ColMask mask, std::span<const std::uint8_t> levels);

  /// Non-destructive sense of the selected columns into the SA capacitor
  /// slots; returns levels in ascending column order.
  std::vector<std::uint8_t> read_row_to_capacitor(std::size_t row, ColMask mask);
  /// Same, targeting the SA latch slots.
  std::vector<std::uint8_t> read_row_to_latch(std::size_t row, ColMask mask);
  /// latch ^= capacitor for every selected column; the capacitor is consumed.
  std::vector<std::uint8_t> sa_xor(ColMask mask);

  void offset_write(std::size_t src_col, std::size_t dst_col, std::uint8_t level);
  /// Several offset writes decoded together; one OFFSET_WRITE event.
  void offset_write_batch(std::span<const Transfer> transfers, bool cross_lane = false);
  void write_back_row(std::size_t row);

  /// Reports an operation performed by peripheral logic attached to this
  /// array (S-box or M-2 evaluation). No array state changes.
  void notify_peripheral(OpKind kind, int row, ColMask mask);

  // Probes. None of these emit events.
  std::uint8_t level(std::size_t row, std::size_t col) const;
  std::optional<std::uint8_t> capacitor(std::size_t col) const;
  std::optional<std::uint8_t> latch(std::size_t col) const;
  std::optional<std::uint8_t> row_buffer(std::size_t col) const;
  std::uint8_t bit_latches(std::size_t col) const;
  bool buffer_empty() const noexcept;

  friend bool same_cells(const CrossbarArray& a, const CrossbarArray& b);

 private:
  void check_row(std::size_t row) const;
  void check_col(std::size_t col) const;
  void check_mask(ColMask mask) const;
  static void check_level(std::uint8_t level);
  void emit(OpRecord record) const;

  std::size_t rows_;
  std::size_t cols_;
  std::vector<std::uint8_t> cells_;
  std::vector<std::optional<std::uint8_t>> capacitors_;
  std::vector<std::optional<std::uint8_t>> latches_;
  std::vector<std::optional<std::uint8_t>> row_buffer_;
  std::vector<std::uint8_t> bit_latches_;
  Observer observer_;
};

/// Applies the ROW_WRITE and BUFFER_WRITEBACK records of a log, in order.
void replay_writes(CrossbarArray& target, std::span<const OpRecord> log);

}  // namespace aesimc
