#pragma once

// Executes AES-128 phases as crossbar micro-operations on a pair of 64-bit
// lanes. Lane A holds state columns 0-1 and lane B columns 2-3. Each state
// byte occupies two adjacent cells (high nibble at the even cell).

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "aesimc/crossbar.hpp"
#include "aesimc/gf_aes_ref.hpp"
#include "aesimc/trace.hpp"

namespace aesimc {

/// Row assignment inside one lane's crossbar.
struct LaneLayout {
  std::array<std::size_t, 4> data_rows{0, 1, 2, 3};
  std::array<std::size_t, 4> key_rows{4, 5, 6, 7};
  std::array<std::size_t, 4> m2_rows{8, 9, 10, 11};
  std::size_t t_row = 12;
  std::size_t bytes_per_row = 2;

  /// Rows not claimed by any of the sets above.
  std::vector<std::size_t> scratch_rows(std::size_t rows) const;
  /// Throws ConfigError unless the row sets are disjoint, fit in `rows`, and
  /// a data row fits in `cols` cells.
  void validate(std::size_t rows, std::size_t cols) const;

  /// Cells holding the lane's state bytes.
  ColMask data_mask() const { return (ColMask{1} << (2 * bytes_per_row)) - 1; }

  friend bool operator==(const LaneLayout&, const LaneLayout&) = default;
};

struct ParallelismConfig {
  unsigned sbox_units = 2;
  unsigned m2_units = 2;

  void validate() const;
  /// Sequential S-box batches needed for `bytes` inputs.
  std::size_t sbox_batches(std::size_t bytes) const { return (bytes + sbox_units - 1) / sbox_units; }
  std::size_t m2_batches(std::size_t bytes) const { return (bytes + m2_units - 1) / m2_units; }

  friend bool operator==(const ParallelismConfig&, const ParallelismConfig&) = default;
};

struct Lane {
  Lane(std::uint32_t index, std::size_t rows, std::size_t cols, const LaneLayout& layout);

  std::uint32_t index;
  LaneLayout layout;
  CrossbarArray array;
  /// Set while the lane is attached to a timeline.
  Timeline* timeline = nullptr;
  std::uint32_t cross_lane_cycles = 0;
};

/// Where ShiftRows sends the byte at state position (row, col).
struct ShiftRoute {
  std::size_t dst_col = 0;
  std::uint32_t src_lane = 0;
  std::uint32_t dst_lane = 0;
  std::size_t dst_slot = 0;
  bool cross_lane() const { return src_lane != dst_lane; }
};

ShiftRoute shift_route(std::size_t row, std::size_t col);

/// The two lanes that hold one 128-bit block.
class LanePair {
 public:
  LanePair(std::size_t rows, std::size_t cols, const LaneLayout& layout);

  Lane& lane(std::size_t i) { return i == 0 ? a_ : b_; }
  const Lane& lane(std::size_t i) const { return i == 0 ? a_ : b_; }

  /// Routes both arrays' operations into `timeline` (nullptr detaches).
  void attach(Timeline* timeline, std::uint32_t cross_lane_cycles = 0);
  /// Cross-lane barrier; a no-op when detached.
  void sync();

  bool resident() const noexcept { return resident_; }
  void set_resident(bool r) noexcept { resident_ = r; }

 private:
  Lane a_;
  Lane b_;
  bool resident_ = false;
};

/// Produces round keys for every bank from one expansion pipeline. Holds the
/// latest round key; rounds must be requested in order.
class KeyGenerator {
 public:
  explicit KeyGenerator(const Key128& key);

  std::size_t round() const noexcept { return round_; }
  const Block& current() const noexcept { return current_; }
  /// Advances to `round` (1..10). Throws InvalidRound otherwise.
  const Block& advance(std::size_t round);

 private:
  Block current_;
  std::size_t round_ = 0;
};

// Probes (no events).
AesState decode_state(const LanePair& pair);
AesState decode_key_rows(const LanePair& pair);
/// T_j for the lane's two state columns.
std::array<std::uint8_t, 2> decode_t_row(const Lane& lane);
/// 2*S for the lane's bytes, indexed [row][slot].
std::array<std::array<std::uint8_t, 2>, 4> decode_m2_rows(const Lane& lane);

void load_block(LanePair& pair, const Block& plaintext, const Key128& key);
Block readout_block(LanePair& pair);

void seq_add_round_key(Lane& lane);
void seq_sub_bytes(Lane& lane, const ParallelismConfig& parallelism);
void seq_shift_rows(LanePair& pair);
/// SubBytes with each S-box output staged straight at its ShiftRows
/// destination, sharing one writeback per row.
void seq_sub_shift(LanePair& pair, const ParallelismConfig& parallelism);
void seq_mix_columns(Lane& lane, const ParallelismConfig& parallelism);
/// Computes round key `round` and overwrites both lanes' key rows with it.
Block seq_key_round_update(KeyGenerator& generator, std::size_t round, LanePair& pair);

}  // namespace aesimc
