#include <gtest/gtest.h>

#include <sstream>

#include "aesimc/config.hpp"
#include "aesimc/errors.hpp"

namespace aesimc {
namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

TEST(Config, DefaultsMatchEngineDefaults) {
  const RunConfig cfg = parse("");
  const EngineConfig e = cfg.engine();
  EXPECT_EQ(e.costs, CostTable::calibrated());
  EXPECT_EQ(e.schedule.explicit_total(), 26u);
  EXPECT_EQ(e.parallelism, ParallelismConfig{});
  EXPECT_EQ(e.layout, LaneLayout{});
  EXPECT_EQ(cfg.hash().size(), 16u);
}

TEST(Config, ParsesEverySection) {
  const RunConfig cfg = parse(R"(# comment
geometry.rows = 20
geometry.cols=16
layout.data_rows=0,1,2,3
layout.t_row=19
parallel.sbox_units=1
parallel.m2_units=4
cost.preset=unit
cost.sbox_eval.cycles=3
cost.row_read.energy_pj=2.5
schedule.preset=derived
schedule.cross_lane_cycles=2
schedule.fuse_sub_shift=false
freq.f_max_mhz=100
freq.f_uniform_mhz=25
metrics.power_w=0.5
farm.banks=4
run.seed=42
run.threads=2
output.trace=t.jsonl
)");
  EXPECT_EQ(cfg.rows, 20u);
  EXPECT_EQ(cfg.layout.t_row, 19u);
  EXPECT_EQ(cfg.parallelism.sbox_units, 1u);
  EXPECT_EQ(cfg.parallelism.m2_units, 4u);
  EXPECT_EQ(cfg.costs[OpKind::SboxEval].cycles, 3u);
  EXPECT_EQ(cfg.costs[OpKind::SboxEval].energy_pj, 1.0);
  EXPECT_EQ(cfg.costs[OpKind::RowRead].energy_pj, 2.5);
  EXPECT_FALSE(cfg.engine().schedule.is_explicit());
  EXPECT_EQ(cfg.cross_lane_cycles, 2u);
  EXPECT_FALSE(cfg.fuse_sub_shift);
  EXPECT_EQ(cfg.f_max_hz, 100e6);
  EXPECT_EQ(cfg.f_uniform_hz, 25e6);
  EXPECT_EQ(cfg.power_w, 0.5);
  EXPECT_EQ(cfg.banks, 4u);
  EXPECT_EQ(cfg.seed, 42u);
  EXPECT_EQ(cfg.threads, 2u);
  EXPECT_EQ(cfg.trace_path, "t.jsonl");
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse("bogus.key=1"), ConfigError);
  EXPECT_THROW(parse("cost.sbox_eval.speed=1"), ConfigError);
  EXPECT_THROW(parse("cost.teleport.cycles=1"), ConfigError);
  EXPECT_THROW(parse("cost.preset=fast"), ConfigError);
  EXPECT_THROW(parse("schedule.preset=quick"), ConfigError);
  EXPECT_THROW(parse("geometry.rows=abc"), ConfigError);
  EXPECT_THROW(parse("geometry.rows=-1"), ConfigError);
  EXPECT_THROW(parse("no equals sign"), ConfigError);
  EXPECT_THROW(parse("farm.banks=1\nfarm.banks=2"), ConfigError);
  EXPECT_THROW(parse("farm.banks=0"), ConfigError);
  EXPECT_THROW(parse("parallel.sbox_units=0"), ConfigError);
  EXPECT_THROW(parse("layout.data_rows=0,1,2"), ConfigError);
  EXPECT_THROW(parse("layout.t_row=0"), ConfigError);
  EXPECT_THROW(parse("schedule.stages=1,1"), ConfigError);
  EXPECT_THROW(parse("schedule.preset=explicit\nschedule.stages=1,1"), ConfigError);
  EXPECT_THROW(parse("schedule.fuse_sub_shift=maybe"), ConfigError);
  EXPECT_THROW(parse("metrics.power_w=0"), ConfigError);
}

TEST(Config, CustomCostsNeedEveryEntry) {
  EXPECT_THROW(parse("cost.preset=custom\ncost.sbox_eval.cycles=1"), ConfigError);
  std::string text = "cost.preset=custom\n";
  for (auto k : kAllOpKinds) {
    text += "cost." + std::string(op_config_name(k)) + ".cycles=1\n";
    text += "cost." + std::string(op_config_name(k)) + ".energy_pj=2\n";
  }
  const RunConfig cfg = parse(text);
  EXPECT_EQ(cfg.costs, CostTable::uniform(1, 2.0));
}

TEST(Config, ExplicitBudgets) {
  std::string budgets;
  for (int i = 0; i < 23; ++i) budgets += (i ? "," : "") + std::string(i == 22 ? "6" : "2");
  const RunConfig cfg = parse("schedule.preset=explicit\nschedule.stages=" + budgets);
  EXPECT_EQ(cfg.engine().schedule.explicit_total(), 22u * 2 + 6);
}

TEST(Config, HashIgnoresOrderOutputsAndThreads) {
  const auto a = parse("farm.banks=2\nrun.seed=7\n").hash();
  const auto b = parse("run.seed=7\n\n# x\nfarm.banks=2\noutput.report=r.json\nrun.threads=8\n").hash();
  EXPECT_EQ(a, b);
  EXPECT_NE(a, parse("farm.banks=2\nrun.seed=8\n").hash());
  // Spelling a default out does not change the hash.
  EXPECT_EQ(parse("").hash(), parse("cost.preset=calibrated\nschedule.preset=calibrated\nfarm.banks=1").hash());
}

TEST(Config, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

}  // namespace
}  // namespace aesimc
