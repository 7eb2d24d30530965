#include "aesimc/crossbar.hpp"

#include <string>

#include "aesimc/errors.hpp"

namespace aesimc {

namespace {

constexpr std::array<std::string_view, kOpKindCount> kTraceNames = {
    "ROW_READ", "ROW_WRITE", "SA_XOR", "SBOX_EVAL", "M2_EVAL", "OFFSET_WRITE", "BUFFER_WRITEBACK"};
constexpr std::array<std::string_view, kOpKindCount> kConfigNames = {
    "row_read", "row_write", "sa_xor", "sbox_eval", "m2_eval", "offset_write", "buffer_writeback"};

}  // namespace

std::string_view op_name(OpKind kind) { return kTraceNames[static_cast<std::size_t>(kind)]; }

std::string_view op_config_name(OpKind kind) { return kConfigNames[static_cast<std::size_t>(kind)]; }

std::optional<OpKind> op_from_config_name(std::string_view name) {
  for (std::size_t i = 0; i < kOpKindCount; ++i) {
    if (kConfigNames[i] == name) return kAllOpKinds[i];
  }
  return std::nullopt;
}

CostTable CostTable::calibrated() {
  // Per-block event counts under the default layout and schedule:
  // 696 reads, 96 writes, 358 XORs, 80 S-box batches, 72 M-2 batches,
  // 370 offset writes, 330 writebacks. The S-box entry absorbs the remainder
  // so one block costs 0.098 W * 26 / 13.56 MHz = 187905.6 pJ.
  CostTable t;
  t[OpKind::RowRead] = {0, 55.0};
  t[OpKind::RowWrite] = {0, 245.0};
  t[OpKind::SaXor] = {0, 34.0};
  t[OpKind::SboxEval] = {0, 156.545059};
  t[OpKind::M2Eval] = {0, 80.0};
  t[OpKind::OffsetWrite] = {0, 40.0};
  t[OpKind::BufferWriteback] = {0, 245.0};
  return t;
}

CostTable CostTable::zero() { return CostTable{}; }

CostTable CostTable::uniform(std::uint32_t cycles, double energy_pj) {
  CostTable t;
  for (OpKind k : kAllOpKinds) t[k] = {cycles, energy_pj};
  return t;
}

CostTable CostTable::with_latency_scaled(std::uint32_t factor) const {
  CostTable t = *this;
  for (auto& e : t.entries_) e.cycles *= factor;
  return t;
}

CostTable CostTable::with_zero_energy() const {
  CostTable t = *this;
  for (auto& e : t.entries_) e.energy_pj = 0.0;
  return t;
}

CrossbarArray::CrossbarArray(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      cells_(rows * cols, 0),
      capacitors_(cols),
      latches_(cols),
      row_buffer_(cols),
      bit_latches_(cols, 0) {
  if (rows == 0 || cols == 0) throw ConfigError("crossbar geometry must be non-empty");
  if (cols > kMaxCols) {
    throw ConfigError("crossbar supports at most " + std::to_string(kMaxCols) + " columns");
  }
}

ColMask CrossbarArray::all_columns() const noexcept {
  return cols_ == 64 ? ~ColMask{0} : ((ColMask{1} << cols_) - 1);
}

void CrossbarArray::check_row(std::size_t row) const {
  if (row >= rows_) {
    throw AddressOutOfRange("row " + std::to_string(row) + " outside 0.." + std::to_string(rows_ - 1));
  }
}

void CrossbarArray::check_col(std::size_t col) const {
  if (col >= cols_) {
    throw AddressOutOfRange("column " + std::to_string(col) + " outside 0.." + std::to_string(cols_ - 1));
  }
}

void CrossbarArray::check_mask(ColMask mask) const {
  if (mask & ~all_columns()) throw AddressOutOfRange("column mask selects columns outside the array");
}

void CrossbarArray::check_level(std::uint8_t level) {
  if (level > kMaxLevel) {
    throw ValueOutOfRange("cell level " + std::to_string(level) + " outside 0..15");
  }
}

void CrossbarArray::emit(OpRecord record) const {
  if (observer_) observer_(record);
}

void CrossbarArray::write_cell(std::size_t row, std::size_t col, std::uint8_t level) {
  check_row(row);
  check_col(col);
  check_level(level);
  cells_[row * cols_ + col] = level;
  emit({OpKind::RowWrite, static_cast<int>(row), ColMask{1} << col, -1, -1, false, {level}});
}

void CrossbarArray::write_row(std::size_t row, ColMask mask, std::span<const std::uint8_t> levels) {
  check_row(row);
  check_mask(mask);
  if (levels.size() < cols_) throw ValueOutOfRange("write_row: level vector shorter than the row");
  std::vector<std::uint8_t> written;
  for (std::size_t c = 0; c < cols_; ++c) {
    if (mask >> c & 1) check_level(levels[c]);
  }
  for (std::size_t c = 0; c < cols_; ++c) {
    if (!(mask >> c & 1)) continue;
    cells_[row * cols_ + c] = levels[c];
    written.push_back(levels[c]);
  }
  emit({OpKind::RowWrite, static_cast<int>(row), mask, -1, -1, false, std::move(written)});
}

std::vector<std::uint8_t> CrossbarArray::read_row_to_capacitor(std::size_t row, ColMask mask) {
  check_row(row);
  check_mask(mask);
  std::vector<std::uint8_t> out;
  for (std::size_t c = 0; c < cols_; ++c) {
    if (!(mask >> c & 1)) continue;
    capacitors_[c] = cells_[row * cols_ + c];
    out.push_back(cells_[row * cols_ + c]);
  }
  emit({OpKind::RowRead, static_cast<int>(row), mask, -1, -1, false, {}});
  return out;
}

std::vector<std::uint8_t> CrossbarArray::read_row_to_latch(std::size_t row, ColMask mask) {
  check_row(row);
  check_mask(mask);
  std::vector<std::uint8_t> out;
  for (std::size_t c = 0; c < cols_; ++c) {
    if (!(mask >> c & 1)) continue;
    latches_[c] = cells_[row * cols_ + c];
    out.push_back(cells_[row * cols_ + c]);
  }
  emit({OpKind::RowRead, static_cast<int>(row), mask, -1, -1, false, {}});
  return out;
}

std::vector<std::uint8_t> CrossbarArray::sa_xor(ColMask mask) {
  check_mask(mask);
  for (std::size_t c = 0; c < cols_; ++c) {
    if (!(mask >> c & 1)) continue;
    if (!capacitors_[c] || !latches_[c]) {
      throw UninitializedSense("sense amplifier " + std::to_string(c) + " has an unloaded slot");
    }
  }
  std::vector<std::uint8_t> out;
  for (std::size_t c = 0; c < cols_; ++c) {
    if (!(mask >> c & 1)) continue;
    latches_[c] = static_cast<std::uint8_t>(*latches_[c] ^ *capacitors_[c]);
    capacitors_[c].reset();
    out.push_back(*latches_[c]);
  }
  emit({OpKind::SaXor, -1, mask, -1, -1, false, {}});
  return out;
}

void CrossbarArray::offset_write(std::size_t src_col, std::size_t dst_col, std::uint8_t level) {
  const Transfer t{src_col, dst_col, level};
  offset_write_batch(std::span<const Transfer>(&t, 1));
}

void CrossbarArray::offset_write_batch(std::span<const Transfer> transfers, bool cross_lane) {
  ColMask mask = 0;
  for (const auto& t : transfers) {
    // The source column lives in the peer lane for cross-lane transfers.
    if (!cross_lane) check_col(t.src_col);
    check_col(t.dst_col);
    check_level(t.level);
    mask |= ColMask{1} << t.dst_col;
  }
  for (const auto& t : transfers) {
    bit_latches_[t.dst_col] = t.level;
    row_buffer_[t.dst_col] = t.level;
  }
  OpRecord rec{OpKind::OffsetWrite, -1, mask, -1, -1, cross_lane, {}};
  if (transfers.size() == 1) {
    rec.src_col = static_cast<int>(transfers[0].src_col);
    rec.dst_col = static_cast<int>(transfers[0].dst_col);
  }
  emit(std::move(rec));
}

void CrossbarArray::write_back_row(std::size_t row) {
  check_row(row);
  ColMask mask = 0;
  std::vector<std::uint8_t> written;
  for (std::size_t c = 0; c < cols_; ++c) {
    if (!row_buffer_[c]) continue;
    mask |= ColMask{1} << c;
    cells_[row * cols_ + c] = *row_buffer_[c];
    written.push_back(*row_buffer_[c]);
    row_buffer_[c].reset();
  }
  if (mask == 0) throw EmptyBuffer("write_back_row: row buffer is empty");
  emit({OpKind::BufferWriteback, static_cast<int>(row), mask, -1, -1, false, std::move(written)});
}

void CrossbarArray::notify_peripheral(OpKind kind, int row, ColMask mask) {
  check_mask(mask);
  emit({kind, row, mask, -1, -1, false, {}});
}

std::uint8_t CrossbarArray::level(std::size_t row, std::size_t col) const {
  check_row(row);
  check_col(col);
  return cells_[row * cols_ + col];
}

std::optional<std::uint8_t> CrossbarArray::capacitor(std::size_t col) const {
  check_col(col);
  return capacitors_[col];
}

std::optional<std::uint8_t> CrossbarArray::latch(std::size_t col) const {
  check_col(col);
  return latches_[col];
}

std::optional<std::uint8_t> CrossbarArray::row_buffer(std::size_t col) const {
  check_col(col);
  return row_buffer_[col];
}

std::uint8_t CrossbarArray::bit_latches(std::size_t col) const {
  check_col(col);
  return bit_latches_[col];
}

bool CrossbarArray::buffer_empty() const noexcept {
  for (const auto& v : row_buffer_) {
    if (v) return false;
  }
  return true;
}

bool same_cells(const CrossbarArray& a, const CrossbarArray& b) {
  return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.cells_ == b.cells_;
}

void replay_writes(CrossbarArray& target, std::span<const OpRecord> log) {
  std::vector<std::uint8_t> levels(target.cols(), 0);
  for (const auto& rec : log) {
    if (rec.kind != OpKind::RowWrite && rec.kind != OpKind::BufferWriteback) continue;
    std::size_t i = 0;
    for (std::size_t c = 0; c < target.cols(); ++c) {
      if (rec.col_mask >> c & 1) levels[c] = rec.values.at(i++);
    }
    target.write_row(static_cast<std::size_t>(rec.row), rec.col_mask, levels);
  }
}

}  // namespace aesimc
