#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "aesimc/errors.hpp"
#include "aesimc/metrics.hpp"

#ifndef AESIMC_BASELINES_CSV
#error "AESIMC_BASELINES_CSV must point at the bundled baseline table"
#endif

namespace aesimc::metrics {
namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

std::vector<BaselineRow> bundled() {
  std::ifstream in(AESIMC_BASELINES_CSV);
  return read_baselines(in);
}

const BaselineRow& row(const std::vector<BaselineRow>& rows, int table, const std::string& label) {
  for (const auto& r : rows) {
    if (r.table == table && r.work_label == label) return r;
  }
  throw std::runtime_error("missing row " + label);
}

TEST(Formulas, PublishedExamples) {
  EXPECT_LT(rel(throughput(108.9e6, 128, 26), 536.12e6), 1e-3);
  EXPECT_LT(rel(throughput(311.72e6, 128, 59), 676.28e6), 1e-3);
  EXPECT_DOUBLE_EQ(throughput(7e6, 128, 128), 7e6);
  EXPECT_LT(rel(throughput_per_slice(536.12e6, 468) / 1e6, 1.144), 5e-3);
  EXPECT_LT(rel(throughput_per_slice(316.12e6, 88) / 1e6, 3.592), 1e-3);
  EXPECT_DOUBLE_EQ(throughput_per_slice(5.0, 1), 5.0);
  EXPECT_LT(rel(throughput_star(13.56e6, 128, 26), 66.76e6), 1e-3);
  // The [47] design has a 64-bit datapath.
  EXPECT_LT(rel(throughput_star(13.56e6, 64, 55), 15.78e6), 1e-3);
  EXPECT_DOUBLE_EQ(throughput_star(13.56e6, 64, 64), 13.56e6);
  EXPECT_LT(rel(energy_per_block(0.098, 26, 13.56e6), 0.188e-6), 1e-3);
  EXPECT_EQ(energy_per_block(0, 26, 13.56e6), 0.0);
  EXPECT_LT(rel(energy_per_block(21.31e-3, 55, 13.56e6), 0.0864e-6), 1e-3);
  EXPECT_LT(rel(energy_per_bit(0.188e-6, 128), 1.47e-9), 1e-3);
  EXPECT_EQ(energy_per_bit(0, 128), 0.0);
  EXPECT_LT(rel(energy_per_bit(0.086e-6, 64), 1.35e-9), 5e-3);
  EXPECT_LT(rel(data_processing_rate(24096, 30e6, 16, 26), 444.9e9), 1e-3);
  EXPECT_LT(rel(data_processing_rate(454, 30e6, 16, 84), 2.595e9), 1e-3);
  EXPECT_LT(rel(data_processing_rate(12902, 30e6, 16, 220), 28.15e9), 1e-3);
}

TEST(Formulas, RejectNonsense) {
  EXPECT_THROW(throughput(1e6, 128, 0), ConfigError);
  EXPECT_THROW(throughput_per_slice(1e6, 0), ConfigError);
  EXPECT_THROW(energy_per_block(1, 1, 0), ConfigError);
  MetricsInput in;
  in.slices = 0;
  EXPECT_THROW(build_report(in), ConfigError);
}

TEST(Report, IdentityInputs) {
  MetricsInput in{1, 1, 1, 1, 1, 1, 1, 1, 1};
  const MetricsReport r = build_report(in);
  EXPECT_EQ(r.thr_bps, 1.0);
  EXPECT_EQ(r.thr_per_slc, 1.0);
  EXPECT_EQ(r.thr_star_bps, 1.0);
  EXPECT_EQ(r.energy_j, 1.0);
  EXPECT_EQ(r.energy_per_bit_j, 1.0);
  EXPECT_EQ(r.dpr_Bps, 1.0);
}

TEST(Report, DuplicateFormulaOracle) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> d(0.5, 1000.0);
  for (int i = 0; i < 1000; ++i) {
    const MetricsInput in{d(rng) * 1e6, d(rng) * 1e6, d(rng) * 1e6, d(rng), d(rng), d(rng), d(rng), d(rng), d(rng)};
    const MetricsReport r = build_report(in);
    EXPECT_EQ(r.thr_bps, in.f_max_hz * in.block_bits / in.latency_cycles);
    EXPECT_EQ(r.thr_per_slc, in.f_max_hz * in.block_bits / in.latency_cycles / in.slices);
    EXPECT_EQ(r.thr_star_bps, in.f_rf_hz * in.block_bits / in.latency_cycles);
    EXPECT_EQ(r.energy_j, in.power_w * in.latency_cycles / in.f_rf_hz);
    EXPECT_EQ(r.energy_per_bit_j, in.power_w * in.latency_cycles / in.f_rf_hz / in.block_bits);
    EXPECT_EQ(r.dpr_Bps, in.ciphers * in.f_uniform_hz * in.bytes_per_cipher / in.latency_cycles);
  }
}

TEST(Report, DefaultInputsReproduceSelfRows) {
  const MetricsReport r = build_report(MetricsInput{});
  EXPECT_LT(rel(r.thr_bps / 1e6, 536.12), 1e-3);
  EXPECT_LT(rel(r.thr_star_bps / 1e6, 66.76), 1e-3);
  EXPECT_LT(rel(r.thr_per_slc / 1e6, 1.144), 5e-3);
  EXPECT_LT(rel(r.energy_j * 1e6, 0.18), 0.05);
  EXPECT_LT(rel(r.energy_per_bit_j * 1e9, 1.406), 0.05);
  EXPECT_LT(rel(r.dpr_Bps / 1e9, 445), 0.01);
}

TEST(Baselines, BundledTableParses) {
  const auto rows = bundled();
  std::map<int, int> per_table;
  for (const auto& r : rows) ++per_table[r.table];
  EXPECT_EQ(per_table[1], 20);
  EXPECT_EQ(per_table[2], 18);
  EXPECT_EQ(per_table[3], 6);
  EXPECT_EQ(per_table[4], 6);
  const auto& imc = row(rows, 2, "AES-IMC");
  EXPECT_EQ(imc.power_w(), 0.098);
  EXPECT_EQ(imc.text("E_uJ"), "0.18");
  const auto& mw = row(rows, 2, "[47]");
  EXPECT_NEAR(*mw.power_w(), 21.31e-3, 1e-12);
}

TEST(Baselines, MalformedInput) {
  std::istringstream empty("");
  EXPECT_TRUE(read_baselines(empty).empty());
  std::istringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_baselines(bad_header), DatasetError);
  std::istringstream short_row(std::string(kBaselineHeader) + "\n1,x,y\n");
  EXPECT_THROW(read_baselines(short_row), DatasetError);
  std::istringstream bad_number(std::string(kBaselineHeader) + "\n1,x,y,12q,,,,,,,,,,,,,,,,\n");
  EXPECT_THROW(read_baselines(bad_number), DatasetError);
  std::istringstream bad_unit(std::string(kBaselineHeader) + "\n2,x,y,,,,,,,,,,,1,kW,,,,,\n");
  EXPECT_THROW(read_baselines(bad_unit), DatasetError);
}

TEST(Audit, ToleranceWidensForCoarsePrinting) {
  EXPECT_DOUBLE_EQ(cell_tolerance("536.12", 0.01), 0.01);
  EXPECT_NEAR(cell_tolerance("0.013", 0.01), 0.0005 / 0.013, 1e-12);
  EXPECT_NEAR(cell_tolerance("12", 0.01), 0.5 / 12, 1e-12);
}

TEST(Audit, TablesOneAndTwoPassAndKnownCellsUnverifiable) {
  const auto rows = bundled();
  const auto audit = audit_baselines(rows);
  std::size_t t12 = 0;
  bool asic_thr = false, imc_e = false;
  for (const auto& e : audit) {
    if (e.table <= 2) {
      ++t12;
      EXPECT_EQ(e.status, AuditStatus::Pass) << e.work_label << " " << e.column << " " << e.rel_error;
    }
    if (e.table == 3 && e.work_label == "CMOS ASIC [45]" && e.column == "thr_Mbps") {
      asic_thr = true;
      EXPECT_EQ(e.status, AuditStatus::Unverifiable);
    }
    if (e.table == 3 && e.work_label == "AES-IMC" && e.column == "E_uJ") {
      imc_e = true;
      EXPECT_EQ(e.status, AuditStatus::Unverifiable);
    }
  }
  // Three columns for each table 1 row, two for each table 2 row.
  EXPECT_EQ(t12, 20u * 3 + 18u * 2);
  EXPECT_TRUE(asic_thr);
  EXPECT_TRUE(imc_e);
}

TEST(Compare, DprRatios) {
  const auto rows = bundled();
  const MetricsInput in;
  const MetricsReport rep = build_report(in);
  const std::vector<std::string> sel{"CMOS ASIC [45]", "Memristive CMOL [46]"};
  const auto cmp = compare_against_baselines(in, rep, rows, sel);
  double asic = 0, cmol = 0;
  for (const auto& c : cmp) {
    if (c.metric != "dpr_GBps") continue;
    if (c.work_label == "CMOS ASIC [45]") asic = c.ratio;
    if (c.work_label == "Memristive CMOL [46]") cmol = c.ratio;
  }
  EXPECT_LT(rel(asic, 171.8), 0.01);
  EXPECT_LT(rel(cmol, 69.7), 0.01);
  const std::vector<std::string> unknown{"nope"};
  EXPECT_THROW(compare_against_baselines(in, rep, rows, unknown), UnknownBaseline);
}

TEST(Compare, SelfComparisonIsUnity) {
  const MetricsInput in;
  const MetricsReport rep = build_report(in);
  std::vector<BaselineRow> self;
  for (int t = 1; t <= 4; ++t) self.push_back(regenerated_row(t, in, rep, "me"));
  const std::vector<std::string> sel{"me"};
  const auto cmp = compare_against_baselines(in, rep, self, sel);
  EXPECT_FALSE(cmp.empty());
  for (const auto& c : cmp) EXPECT_EQ(c.ratio, 1.0) << c.metric;
}

TEST(Compare, EmptyBaselinesGiveNoRows) {
  const MetricsInput in;
  EXPECT_TRUE(compare_against_baselines(in, build_report(in), {}).empty());
}

TEST(Csv, WritersCarryHash) {
  const MetricsInput in;
  const auto rep = build_report(in);
  const auto rows = bundled();
  std::ostringstream a, b;
  write_comparison_csv(a, compare_against_baselines(in, rep, rows), "feedface");
  write_audit_csv(b, audit_baselines(rows), "feedface");
  std::istringstream lines(a.str() + b.str());
  std::string line;
  while (std::getline(lines, line)) {
    EXPECT_TRUE(line.ends_with("config_hash") || line.ends_with("feedface")) << line;
  }
}

}  // namespace
}  // namespace aesimc::metrics
