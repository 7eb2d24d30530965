#include <gtest/gtest.h>

#include <bit>
#include <map>
#include <random>

#include "aesimc/errors.hpp"
#include "aesimc/sequencer.hpp"
#include "aesimc/trace.hpp"
#include "test_util.hpp"

namespace aesimc {
namespace {

using testing::blk;
using testing::random_block;

class Rig {
 public:
  explicit Rig(std::uint32_t cross_lane_cycles = 0)
      : costs_(CostTable::uniform(1, 1.0)), timeline_(costs_, 0, 0, &trace_), pair_(16, 16, LaneLayout{}) {
    pair_.attach(&timeline_, cross_lane_cycles);
  }

  LanePair& pair() { return pair_; }
  Trace& trace() { return trace_; }

  void load_state(const AesState& s, const Block& key = Block{}) {
    load_block(pair_, s.to_block(), key);
    trace_.clear();
  }

  std::size_t count(OpKind k, int lane = -1) const {
    std::size_t n = 0;
    for (const auto& e : trace_.events()) {
      if (e.op == k && (lane < 0 || e.lane == static_cast<std::uint32_t>(lane))) ++n;
    }
    return n;
  }

  /// Writebacks per (lane, row) since the last clear.
  std::map<std::pair<std::uint32_t, int>, int> writebacks() const {
    std::map<std::pair<std::uint32_t, int>, int> m;
    for (const auto& e : trace_.events()) {
      if (e.op == OpKind::BufferWriteback) ++m[{e.lane, e.row}];
    }
    return m;
  }

 private:
  CostTable costs_;
  Trace trace_;
  Timeline timeline_;
  LanePair pair_;
};

void expect_single_writeback_per_row(const Rig& rig) {
  for (const auto& [where, n] : rig.writebacks()) {
    EXPECT_EQ(n, 1) << "lane " << where.first << " row " << where.second;
  }
}

TEST(Layout, DefaultsValidateAndScratch) {
  LaneLayout l;
  EXPECT_NO_THROW(l.validate(16, 16));
  EXPECT_EQ(l.scratch_rows(16), (std::vector<std::size_t>{13, 14, 15}));
  EXPECT_EQ(l.data_mask(), 0xFu);
  LaneLayout overlap;
  overlap.t_row = 3;
  EXPECT_THROW(overlap.validate(16, 16), ConfigError);
  EXPECT_THROW(l.validate(12, 16), ConfigError);
  EXPECT_THROW(l.validate(16, 3), ConfigError);
  ParallelismConfig p{0, 1};
  EXPECT_THROW(p.validate(), ConfigError);
}

TEST(Load, MappingOfByteTwoThree) {
  Rig rig;
  AesState s;
  s.at(2, 3) = 0xB7;
  load_block(rig.pair(), s.to_block(), Block{});
  const Lane& b = rig.pair().lane(1);
  const std::size_t row = b.layout.data_rows[2];
  EXPECT_EQ(b.array.level(row, 2), 0xB);
  EXPECT_EQ(b.array.level(row, 3), 0x7);
  EXPECT_EQ(rig.count(OpKind::RowWrite, 0), 8u);
  EXPECT_EQ(rig.count(OpKind::RowWrite, 1), 8u);
}

TEST(Load, RoundTripRandomBlocks) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 1000; ++i) {
    LanePair pair(16, 16, LaneLayout{});
    const Block pt = random_block(rng), key = random_block(rng);
    load_block(pair, pt, key);
    EXPECT_EQ(decode_key_rows(pair).to_block(), key);
    ASSERT_EQ(readout_block(pair), pt);
  }
}

TEST(Load, LaneBusy) {
  LanePair pair(16, 16, LaneLayout{});
  EXPECT_THROW(readout_block(pair), LaneBusy);
  load_block(pair, Block{}, Block{});
  EXPECT_THROW(load_block(pair, Block{}, Block{}), LaneBusy);
  readout_block(pair);
  EXPECT_THROW(readout_block(pair), LaneBusy);
}

TEST(AddRoundKey, MatchesReference) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 500; ++i) {
    Rig rig;
    const AesState s(random_block(rng));
    const Block key = random_block(rng);
    rig.load_state(s, key);
    seq_add_round_key(rig.pair().lane(0));
    seq_add_round_key(rig.pair().lane(1));
    ASSERT_EQ(decode_state(rig.pair()), add_round_key(s, key));
    expect_single_writeback_per_row(rig);
  }
}

TEST(AddRoundKey, ZeroKeyAndInvolution) {
  std::mt19937_64 rng(3);
  const AesState s(random_block(rng));
  {
    Rig rig;
    rig.load_state(s);
    seq_add_round_key(rig.pair().lane(0));
    seq_add_round_key(rig.pair().lane(1));
    EXPECT_EQ(decode_state(rig.pair()), s);
  }
  Rig rig;
  rig.load_state(s, random_block(rng));
  for (int twice = 0; twice < 2; ++twice) {
    seq_add_round_key(rig.pair().lane(0));
    seq_add_round_key(rig.pair().lane(1));
  }
  EXPECT_EQ(decode_state(rig.pair()), s);
}

TEST(SubBytes, MatchesReferenceAndZeroRow) {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 300; ++i) {
    Rig rig;
    const AesState s(i == 0 ? Block{} : random_block(rng));
    rig.load_state(s);
    seq_sub_bytes(rig.pair().lane(0), {});
    seq_sub_bytes(rig.pair().lane(1), {});
    ASSERT_EQ(decode_state(rig.pair()), sub_bytes(s));
    expect_single_writeback_per_row(rig);
  }
}

class SboxUnits : public ::testing::TestWithParam<unsigned> {};

TEST_P(SboxUnits, BatchCountPerRow) {
  const unsigned units = GetParam();
  Rig rig;
  rig.load_state(AesState{});
  ParallelismConfig p{units, units};
  seq_sub_bytes(rig.pair().lane(0), p);
  const std::size_t bytes = LaneLayout{}.bytes_per_row;
  const std::size_t expected = (bytes + units - 1) / units;
  EXPECT_EQ(rig.count(OpKind::SboxEval, 0), 4 * expected);
  EXPECT_EQ(p.sbox_batches(bytes), expected);

  rig.trace().clear();
  seq_mix_columns(rig.pair().lane(0), p);
  EXPECT_EQ(rig.count(OpKind::M2Eval, 0), 4 * expected);
  EXPECT_EQ(p.m2_batches(bytes), expected);
}

INSTANTIATE_TEST_SUITE_P(OneToEight, SboxUnits, ::testing::Range(1u, 9u));

TEST(ShiftRows, RoutesAndCrossLaneCount) {
  std::size_t moved = 0, cross = 0;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      const ShiftRoute route = shift_route(r, c);
      EXPECT_EQ(route.src_lane, c / 2);
      EXPECT_EQ(route.dst_lane, route.dst_col / 2);
      EXPECT_EQ(route.dst_slot, route.dst_col % 2);
      // Destination column receives the byte that shift_rows reads from here.
      EXPECT_EQ((route.dst_col + r) % 4, c);
      if (r == 0) EXPECT_EQ(route.dst_col, c);
      moved += route.dst_col != c;
      cross += route.cross_lane();
    }
  }
  EXPECT_EQ(moved, 12u);
  EXPECT_EQ(cross, 8u);
}

TEST(ShiftRows, MatchesReferenceAndCountsPortTraffic) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 300; ++i) {
    Rig rig;
    const AesState s(random_block(rng));
    rig.load_state(s);
    seq_shift_rows(rig.pair());
    ASSERT_EQ(decode_state(rig.pair()), shift_rows(s));
    std::size_t cross_bytes = 0;
    for (const auto& e : rig.trace().events()) {
      if (e.cross_lane) cross_bytes += static_cast<std::size_t>(std::popcount(e.col_mask)) / 2;
    }
    EXPECT_EQ(cross_bytes, 8u);
    expect_single_writeback_per_row(rig);
  }
}

TEST(ShiftRows, PortLatencyIsCharged) {
  Rig slow(3);
  slow.load_state(AesState{});
  seq_shift_rows(slow.pair());
  std::uint64_t extra = 0;
  for (const auto& e : slow.trace().events()) {
    if (e.cross_lane) extra += e.latency - 1;
  }
  EXPECT_EQ(extra, 3u * 8u);
}

TEST(SubShift, FusedEqualsSequential) {
  std::mt19937_64 rng(6);
  for (int i = 0; i < 300; ++i) {
    Rig rig;
    const AesState s(random_block(rng));
    rig.load_state(s);
    seq_sub_shift(rig.pair(), {});
    ASSERT_EQ(decode_state(rig.pair()), shift_rows(sub_bytes(s)));
    expect_single_writeback_per_row(rig);
  }
}

TEST(MixColumns, MatchesReferenceAndScratchRows) {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 10000; ++i) {
    LanePair pair(16, 16, LaneLayout{});
    const AesState s(i == 0 ? Block{} : random_block(rng));
    load_block(pair, s.to_block(), Block{});
    for (std::size_t l = 0; l < 2; ++l) seq_mix_columns(pair.lane(l), {});
    ASSERT_EQ(decode_state(pair), mix_columns(s)) << i;
    for (std::size_t l = 0; l < 2; ++l) {
      const auto t = decode_t_row(pair.lane(l));
      const auto m2 = decode_m2_rows(pair.lane(l));
      for (std::size_t slot = 0; slot < 2; ++slot) {
        const std::size_t c = 2 * l + slot;
        ASSERT_EQ(t[slot], s.at(0, c) ^ s.at(1, c) ^ s.at(2, c) ^ s.at(3, c));
        for (std::size_t r = 0; r < 4; ++r) ASSERT_EQ(m2[r][slot], testing::clmul_mod(s.at(r, c), 2));
      }
    }
  }
}

TEST(MixColumns, SixStepsPerRowAndOneWritebackPerRow) {
  Rig rig;
  rig.load_state(AesState{});
  seq_mix_columns(rig.pair().lane(0), {});
  EXPECT_EQ(decode_state(rig.pair()), AesState{});
  const LaneLayout layout;
  for (auto row : layout.data_rows) EXPECT_EQ((rig.writebacks()[{0u, static_cast<int>(row)}]), 1);
  // Phase (c) per row: latch load, three XORs, stage, writeback.
  std::size_t c_reads = 0, c_xors = 0;
  bool in_c = false;
  for (const auto& e : rig.trace().events()) {
    if (e.op == OpKind::RowRead && e.row == static_cast<int>(layout.t_row)) in_c = true;
    if (!in_c) continue;
    c_reads += e.op == OpKind::RowRead && e.row == static_cast<int>(layout.t_row);
    c_xors += e.op == OpKind::SaXor;
  }
  EXPECT_EQ(c_reads, 4u);
  EXPECT_EQ(c_xors, 12u);
}

TEST(KeyUpdate, FipsRoundOneAndOverwrite) {
  Rig rig;
  const Key128 key = blk("2b7e151628aed2a6abf7158809cf4f3c");
  load_block(rig.pair(), Block{}, key);
  rig.trace().clear();
  KeyGenerator gen(key);
  const Block k1 = seq_key_round_update(gen, 1, rig.pair());
  EXPECT_EQ(k1, blk("a0fafe1788542cb123a339392a6c7605"));
  EXPECT_EQ(decode_key_rows(rig.pair()).to_block(), k1);
  EXPECT_EQ(rig.count(OpKind::RowWrite, 0), 4u);
  EXPECT_EQ(rig.count(OpKind::RowWrite, 1), 4u);
  const KeySchedule ks = expand_key(key);
  for (std::size_t r = 2; r <= 10; ++r) {
    seq_key_round_update(gen, r, rig.pair());
    EXPECT_EQ(decode_key_rows(rig.pair()).to_block(), ks.round_key(r));
  }
  EXPECT_THROW(seq_key_round_update(gen, 11, rig.pair()), InvalidRound);
}

TEST(KeyUpdate, RoundsMustBeInOrder) {
  KeyGenerator gen(Key128{});
  EXPECT_THROW(gen.advance(0), InvalidRound);
  EXPECT_THROW(gen.advance(2), InvalidRound);
  gen.advance(1);
  EXPECT_THROW(gen.advance(1), InvalidRound);
  EXPECT_EQ(gen.round(), 1u);
}

Block run_phases(const Block& pt, const Key128& key, bool fused, const ParallelismConfig& p) {
  LanePair pair(16, 16, LaneLayout{});
  load_block(pair, pt, key);
  KeyGenerator gen(key);
  seq_add_round_key(pair.lane(0));
  seq_add_round_key(pair.lane(1));
  for (std::size_t round = 1; round <= 10; ++round) {
    if (fused) {
      seq_sub_shift(pair, p);
    } else {
      seq_sub_bytes(pair.lane(0), p);
      seq_sub_bytes(pair.lane(1), p);
      seq_shift_rows(pair);
    }
    if (round < 10) {
      seq_mix_columns(pair.lane(0), p);
      seq_mix_columns(pair.lane(1), p);
    }
    seq_key_round_update(gen, round, pair);
    seq_add_round_key(pair.lane(0));
    seq_add_round_key(pair.lane(1));
  }
  return readout_block(pair);
}

TEST(EndToEnd, FipsVectors) {
  for (bool fused : {false, true}) {
    EXPECT_EQ(run_phases(blk("00112233445566778899aabbccddeeff"), blk("000102030405060708090a0b0c0d0e0f"), fused, {}),
              blk("69c4e0d86a7b0430d8cdb78070b4c55a"));
    EXPECT_EQ(run_phases(blk("3243f6a8885a308d313198a2e0370734"), blk("2b7e151628aed2a6abf7158809cf4f3c"), fused, {}),
              blk("3925841d02dc09fbdc118597196a0b32"));
  }
}

TEST(EndToEnd, RandomPairsAllKnobs) {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 2000; ++i) {
    const Block pt = random_block(rng), key = random_block(rng);
    const ParallelismConfig p{1 + static_cast<unsigned>(rng() % 8), 1 + static_cast<unsigned>(rng() % 8)};
    ASSERT_EQ(run_phases(pt, key, i % 2 == 0, p), encrypt_block(pt, key)) << i;
  }
}

}  // namespace
}  // namespace aesimc
