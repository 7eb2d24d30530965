#include "aesimc/sequencer.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <string>

#include "aesimc/errors.hpp"

namespace aesimc {

namespace {

constexpr std::size_t kLaneCols = 2;  // state columns per lane

std::uint8_t byte_at(const CrossbarArray& array, std::size_t row, std::size_t slot) {
  return static_cast<std::uint8_t>((array.level(row, 2 * slot) << 4) | array.level(row, 2 * slot + 1));
}

std::vector<std::uint8_t> bytes_from_levels(const std::vector<std::uint8_t>& levels) {
  std::vector<std::uint8_t> out(levels.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = static_cast<std::uint8_t>((levels[2 * i] << 4) | levels[2 * i + 1]);
  }
  return out;
}

/// Transfers that stage `bytes` into the same slots they came from.
std::vector<Transfer> same_slot_transfers(const std::vector<std::uint8_t>& bytes) {
  std::vector<Transfer> out;
  for (std::size_t s = 0; s < bytes.size(); ++s) {
    out.push_back({2 * s, 2 * s, static_cast<std::uint8_t>(bytes[s] >> 4)});
    out.push_back({2 * s + 1, 2 * s + 1, static_cast<std::uint8_t>(bytes[s] & 0xF)});
  }
  return out;
}

std::vector<Transfer> same_slot_levels(const std::vector<std::uint8_t>& levels) {
  std::vector<Transfer> out;
  for (std::size_t c = 0; c < levels.size(); ++c) out.push_back({c, c, levels[c]});
  return out;
}

void write_lane_rows(Lane& lane, const std::array<std::size_t, 4>& rows, const AesState& s) {
  std::vector<std::uint8_t> levels(lane.array.cols(), 0);
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t slot = 0; slot < kLaneCols; ++slot) {
      const std::uint8_t b = s.at(r, lane.index * kLaneCols + slot);
      levels[2 * slot] = b >> 4;
      levels[2 * slot + 1] = b & 0xF;
    }
    lane.array.write_row(rows[r], lane.layout.data_mask(), levels);
  }
}

ColMask slot_mask(std::size_t first_slot, std::size_t count) {
  return ((ColMask{1} << (2 * count)) - 1) << (2 * first_slot);
}

/// Runs `bytes` through a peripheral LUT in batches of `units`, one event per batch.
template <typename Fn>
std::vector<std::uint8_t> evaluate_batched(Lane& lane, OpKind kind, std::size_t row,
                                           const std::vector<std::uint8_t>& bytes, unsigned units,
                                           Fn&& lut) {
  std::vector<std::uint8_t> out(bytes.size());
  for (std::size_t first = 0; first < bytes.size(); first += units) {
    const std::size_t n = std::min<std::size_t>(units, bytes.size() - first);
    lane.array.notify_peripheral(kind, static_cast<int>(row), slot_mask(first, n));
    for (std::size_t i = first; i < first + n; ++i) out[i] = lut(bytes[i]);
  }
  return out;
}

/// Stages a full row of S-box outputs at their ShiftRows destinations and
/// writes back. `outputs[lane][slot]` holds the byte that sat at state
/// position (row, lane*2 + slot) before the shift.
void stage_shifted_row(LanePair& pair, std::size_t row,
                       const std::array<std::vector<std::uint8_t>, 2>& outputs) {
  pair.sync();
  for (std::uint32_t dst = 0; dst < 2; ++dst) {
    std::vector<Transfer> local;
    std::vector<Transfer> remote;
    for (std::uint32_t src = 0; src < 2; ++src) {
      for (std::size_t slot = 0; slot < kLaneCols; ++slot) {
        const ShiftRoute route = shift_route(row, src * kLaneCols + slot);
        if (route.dst_lane != dst) continue;
        const std::uint8_t b = outputs[src][slot];
        auto& bucket = route.cross_lane() ? remote : local;
        bucket.push_back({2 * slot, 2 * route.dst_slot, static_cast<std::uint8_t>(b >> 4)});
        bucket.push_back({2 * slot + 1, 2 * route.dst_slot + 1, static_cast<std::uint8_t>(b & 0xF)});
      }
    }
    Lane& lane = pair.lane(dst);
    if (!local.empty()) lane.array.offset_write_batch(local, false);
    if (!remote.empty()) lane.array.offset_write_batch(remote, true);
  }
  pair.sync();
  for (std::uint32_t dst = 0; dst < 2; ++dst) {
    Lane& lane = pair.lane(dst);
    lane.array.write_back_row(lane.layout.data_rows[row]);
  }
}

}  // namespace

std::vector<std::size_t> LaneLayout::scratch_rows(std::size_t rows) const {
  std::set<std::size_t> used(data_rows.begin(), data_rows.end());
  used.insert(key_rows.begin(), key_rows.end());
  used.insert(m2_rows.begin(), m2_rows.end());
  used.insert(t_row);
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < rows; ++r) {
    if (!used.count(r)) out.push_back(r);
  }
  return out;
}

void LaneLayout::validate(std::size_t rows, std::size_t cols) const {
  if (bytes_per_row != kLaneCols) {
    throw ConfigError("layout.bytes_per_row must be 2: each 64-bit lane holds two state columns");
  }
  if (2 * bytes_per_row > cols) {
    throw ConfigError("a data row needs " + std::to_string(2 * bytes_per_row) + " cells but the array has " +
                      std::to_string(cols) + " columns");
  }
  std::set<std::size_t> seen;
  auto claim = [&](std::size_t r, const char* what) {
    if (r >= rows) {
      throw ConfigError(std::string(what) + " row " + std::to_string(r) + " outside the " +
                        std::to_string(rows) + "-row array");
    }
    if (!seen.insert(r).second) {
      throw ConfigError("row " + std::to_string(r) + " is assigned twice in the lane layout");
    }
  };
  for (auto r : data_rows) claim(r, "data");
  for (auto r : key_rows) claim(r, "key");
  for (auto r : m2_rows) claim(r, "m2");
  claim(t_row, "t");
}

void ParallelismConfig::validate() const {
  if (sbox_units < 1) throw ConfigError("parallel.sbox_units must be >= 1");
  if (m2_units < 1) throw ConfigError("parallel.m2_units must be >= 1");
}

Lane::Lane(std::uint32_t idx, std::size_t rows, std::size_t cols, const LaneLayout& lay)
    : index(idx), layout(lay), array(rows, cols) {
  layout.validate(rows, cols);
}

ShiftRoute shift_route(std::size_t row, std::size_t col) {
  ShiftRoute r;
  r.dst_col = (col + 4 - row % 4) % 4;
  r.src_lane = static_cast<std::uint32_t>(col / kLaneCols);
  r.dst_lane = static_cast<std::uint32_t>(r.dst_col / kLaneCols);
  r.dst_slot = r.dst_col % kLaneCols;
  return r;
}

LanePair::LanePair(std::size_t rows, std::size_t cols, const LaneLayout& layout)
    : a_(0, rows, cols, layout), b_(1, rows, cols, layout) {}

void LanePair::attach(Timeline* timeline, std::uint32_t cross_lane_cycles) {
  for (Lane* lane : {&a_, &b_}) {
    lane->timeline = timeline;
    lane->cross_lane_cycles = cross_lane_cycles;
    if (!timeline) {
      lane->array.set_observer(nullptr);
      continue;
    }
    const std::uint32_t idx = lane->index;
    lane->array.set_observer([timeline, idx, cross_lane_cycles](const OpRecord& rec) {
      const std::uint32_t extra =
          rec.cross_lane ? cross_lane_cycles * static_cast<std::uint32_t>(std::popcount(rec.col_mask) / 2) : 0;
      timeline->record(idx, rec, extra);
    });
  }
}

void LanePair::sync() {
  if (a_.timeline) a_.timeline->sync();
}

KeyGenerator::KeyGenerator(const Key128& key) : current_(key) {}

const Block& KeyGenerator::advance(std::size_t round) {
  if (round < 1 || round > KeySchedule::kRounds) {
    throw InvalidRound("round " + std::to_string(round) + " outside 1..10");
  }
  if (round != round_ + 1) {
    throw InvalidRound("round " + std::to_string(round) + " requested after round " + std::to_string(round_));
  }
  current_ = next_round_key(current_, round);
  round_ = round;
  return current_;
}

AesState decode_state(const LanePair& pair) {
  AesState s;
  for (std::size_t l = 0; l < 2; ++l) {
    const Lane& lane = pair.lane(l);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t slot = 0; slot < kLaneCols; ++slot) {
        s.at(r, l * kLaneCols + slot) = byte_at(lane.array, lane.layout.data_rows[r], slot);
      }
    }
  }
  return s;
}

AesState decode_key_rows(const LanePair& pair) {
  AesState s;
  for (std::size_t l = 0; l < 2; ++l) {
    const Lane& lane = pair.lane(l);
    for (std::size_t r = 0; r < 4; ++r) {
      for (std::size_t slot = 0; slot < kLaneCols; ++slot) {
        s.at(r, l * kLaneCols + slot) = byte_at(lane.array, lane.layout.key_rows[r], slot);
      }
    }
  }
  return s;
}

std::array<std::uint8_t, 2> decode_t_row(const Lane& lane) {
  return {byte_at(lane.array, lane.layout.t_row, 0), byte_at(lane.array, lane.layout.t_row, 1)};
}

std::array<std::array<std::uint8_t, 2>, 4> decode_m2_rows(const Lane& lane) {
  std::array<std::array<std::uint8_t, 2>, 4> out{};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t slot = 0; slot < kLaneCols; ++slot) out[r][slot] = byte_at(lane.array, lane.layout.m2_rows[r], slot);
  }
  return out;
}

void load_block(LanePair& pair, const Block& plaintext, const Key128& key) {
  if (pair.resident()) throw LaneBusy("load_block: lanes already hold a block");
  const AesState data(plaintext);
  const AesState key_state(key);
  for (std::size_t l = 0; l < 2; ++l) {
    Lane& lane = pair.lane(l);
    write_lane_rows(lane, lane.layout.data_rows, data);
    write_lane_rows(lane, lane.layout.key_rows, key_state);
  }
  pair.set_resident(true);
}

Block readout_block(LanePair& pair) {
  if (!pair.resident()) throw LaneBusy("readout_block: no block resident in the lanes");
  AesState s;
  for (std::size_t l = 0; l < 2; ++l) {
    Lane& lane = pair.lane(l);
    for (std::size_t r = 0; r < 4; ++r) {
      const auto bytes = bytes_from_levels(lane.array.read_row_to_latch(lane.layout.data_rows[r], lane.layout.data_mask()));
      for (std::size_t slot = 0; slot < kLaneCols; ++slot) s.at(r, l * kLaneCols + slot) = bytes[slot];
    }
  }
  pair.set_resident(false);
  return s.to_block();
}

void seq_add_round_key(Lane& lane) {
  const ColMask mask = lane.layout.data_mask();
  for (std::size_t r = 0; r < 4; ++r) {
    lane.array.read_row_to_capacitor(lane.layout.data_rows[r], mask);
    lane.array.read_row_to_latch(lane.layout.key_rows[r], mask);
    const auto levels = lane.array.sa_xor(mask);
    lane.array.offset_write_batch(same_slot_levels(levels));
    lane.array.write_back_row(lane.layout.data_rows[r]);
  }
}

void seq_sub_bytes(Lane& lane, const ParallelismConfig& parallelism) {
  const ColMask mask = lane.layout.data_mask();
  for (std::size_t r = 0; r < 4; ++r) {
    const std::size_t row = lane.layout.data_rows[r];
    const auto bytes = bytes_from_levels(lane.array.read_row_to_latch(row, mask));
    const auto out = evaluate_batched(lane, OpKind::SboxEval, row, bytes, parallelism.sbox_units, gf::sbox_lut);
    lane.array.offset_write_batch(same_slot_transfers(out));
    lane.array.write_back_row(row);
  }
}

void seq_shift_rows(LanePair& pair) {
  // Row 0 has a zero offset for every byte and is left in place.
  for (std::size_t r = 1; r < 4; ++r) {
    std::array<std::vector<std::uint8_t>, 2> bytes;
    for (std::size_t l = 0; l < 2; ++l) {
      Lane& lane = pair.lane(l);
      bytes[l] = bytes_from_levels(lane.array.read_row_to_latch(lane.layout.data_rows[r], lane.layout.data_mask()));
    }
    stage_shifted_row(pair, r, bytes);
  }
}

void seq_sub_shift(LanePair& pair, const ParallelismConfig& parallelism) {
  for (std::size_t r = 0; r < 4; ++r) {
    std::array<std::vector<std::uint8_t>, 2> outputs;
    for (std::size_t l = 0; l < 2; ++l) {
      Lane& lane = pair.lane(l);
      const std::size_t row = lane.layout.data_rows[r];
      const auto bytes = bytes_from_levels(lane.array.read_row_to_latch(row, lane.layout.data_mask()));
      outputs[l] = evaluate_batched(lane, OpKind::SboxEval, row, bytes, parallelism.sbox_units, gf::sbox_lut);
    }
    stage_shifted_row(pair, r, outputs);
  }
}

void seq_mix_columns(Lane& lane, const ParallelismConfig& parallelism) {
  const ColMask mask = lane.layout.data_mask();
  const auto& data = lane.layout.data_rows;
  const auto& m2 = lane.layout.m2_rows;

  // (a) M-2 LUT pass, one data row at a time, into the M-2 buffer rows.
  for (std::size_t r = 0; r < 4; ++r) {
    const auto bytes = bytes_from_levels(lane.array.read_row_to_latch(data[r], mask));
    const auto doubled = evaluate_batched(lane, OpKind::M2Eval, data[r], bytes, parallelism.m2_units, gf::m2_lut);
    lane.array.offset_write_batch(same_slot_transfers(doubled));
    lane.array.write_back_row(m2[r]);
  }

  // (b) T_j = S0 ^ S1 ^ S2 ^ S3, every column at once.
  lane.array.read_row_to_latch(data[0], mask);
  for (std::size_t r = 1; r < 4; ++r) {
    lane.array.read_row_to_capacitor(data[r], mask);
    lane.array.sa_xor(mask);
  }
  std::vector<std::uint8_t> t_levels;
  for (std::size_t c = 0; c < 2 * lane.layout.bytes_per_row; ++c) t_levels.push_back(*lane.array.latch(c));
  lane.array.offset_write_batch(same_slot_levels(t_levels));
  lane.array.write_back_row(lane.layout.t_row);

  // (c) S'_i = T ^ 2S_i ^ 2S_{i+1} ^ S_i in six steps per row.
  for (std::size_t r = 0; r < 4; ++r) {
    lane.array.read_row_to_latch(lane.layout.t_row, mask);
    lane.array.read_row_to_capacitor(m2[r], mask);
    lane.array.sa_xor(mask);
    lane.array.read_row_to_capacitor(m2[(r + 1) % 4], mask);
    lane.array.sa_xor(mask);
    lane.array.read_row_to_capacitor(data[r], mask);
    const auto result = lane.array.sa_xor(mask);
    lane.array.offset_write_batch(same_slot_levels(result));
    lane.array.write_back_row(data[r]);
  }
}

Block seq_key_round_update(KeyGenerator& generator, std::size_t round, LanePair& pair) {
  const Block key = generator.advance(round);
  const AesState key_state(key);
  for (std::size_t l = 0; l < 2; ++l) {
    Lane& lane = pair.lane(l);
    write_lane_rows(lane, lane.layout.key_rows, key_state);
  }
  return key;
}

}  // namespace aesimc
