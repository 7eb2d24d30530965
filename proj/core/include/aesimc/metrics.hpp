#pragma once

// Throughput, energy and data-processing-rate figures of merit, plus the
// published comparison rows they are audited against.

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace aesimc::metrics {

inline constexpr double kDefaultRfHz = 13.56e6;
inline constexpr double kDefaultUniformHz = 30e6;

double throughput(double f_max_hz, double block_bits, double latency_cycles);
double throughput_per_slice(double thr_bps, double slices);
double throughput_star(double f_rf_hz, double block_bits, double latency_cycles);
/// Joules for one block: P * L / f.
double energy_per_block(double power_w, double latency_cycles, double f_rf_hz);
double energy_per_bit(double energy_j, double block_bits);
/// Bytes per second of `ciphers` engines running at `f_hz`.
double data_processing_rate(double ciphers, double f_hz, double bytes_per_cipher, double latency_cycles);

struct MetricsInput {
  double f_max_hz = 108.9e6;
  double f_rf_hz = kDefaultRfHz;
  double f_uniform_hz = kDefaultUniformHz;
  double block_bits = 128;
  double latency_cycles = 26;
  double slices = 468;
  double power_w = 0.098;
  double ciphers = 24096;
  double bytes_per_cipher = 16;

  /// Throws ConfigError unless every field is strictly positive.
  void validate() const;
};

struct MetricsReport {
  double thr_bps = 0;
  double thr_per_slc = 0;
  double thr_star_bps = 0;
  double energy_j = 0;
  double energy_per_bit_j = 0;
  double dpr_Bps = 0;
};

MetricsReport build_report(const MetricsInput& input);

/// One published row of the comparison tables. Numeric cells keep their
/// original text so that the printed precision is known.
struct BaselineRow {
  int table = 0;
  std::string work_label;
  std::string device;
  std::optional<double> state_bits, key_bits, ff, lut, slc, fmax_MHz, L, thr_Mbps, thr_per_slc,
      thr_star_Mbps, P_value, E_uJ, E_per_bit_nJ, area_um2, ciphers, dpr_GBps;
  std::string P_unit;

  /// Published text of each non-empty cell, keyed by column name.
  std::map<std::string, std::string> cells;

  std::string text(const std::string& column) const;
  /// Power in watts, honouring P_unit.
  std::optional<double> power_w() const;
};

inline constexpr const char* kBaselineHeader =
    "table,work_label,device,state_bits,key_bits,ff,lut,slc,fmax_MHz,L,thr_Mbps,thr_per_slc,"
    "thr_star_Mbps,P_value,P_unit,E_uJ,E_per_bit_nJ,area_um2,ciphers,dpr_GBps";

/// Parses the baseline CSV. An empty stream yields no rows. Throws
/// DatasetError on a bad header or malformed row.
std::vector<BaselineRow> read_baselines(std::istream& in);

enum class AuditStatus { Pass, Flagged, Unverifiable };
const char* audit_status_name(AuditStatus s);

struct AuditEntry {
  int table = 0;
  std::string work_label;
  std::string device;
  std::string column;
  double published = 0;
  double computed = 0;
  double rel_error = 0;
  double tolerance = 0;
  AuditStatus status = AuditStatus::Pass;
  std::string note;
};

struct AuditFrequencies {
  double f_rf_hz = kDefaultRfHz;
  double f_uniform_hz = kDefaultUniformHz;
};

/// Recomputes every derivable published column from the row's own inputs.
/// Entries beyond tolerance are flagged; the known-inconsistent cells are
/// reported as unverifiable.
std::vector<AuditEntry> audit_baselines(std::span<const BaselineRow> rows, const AuditFrequencies& freq = {});

/// Relative tolerance for one published cell: the column's base tolerance,
/// widened to half a unit in the last printed digit when that is larger.
double cell_tolerance(const std::string& published_text, double base_tolerance);

struct ComparisonRow {
  std::string metric;
  int table = 0;
  std::string work_label;
  std::string device;
  double value = 0;
  double baseline_value = 0;
  double ratio = 0;
};

/// Ratio of the simulated design's figure to each baseline's published
/// figure, for every metric the baseline's table reports. When `selection`
/// is non-empty only those work labels are compared; an unknown label throws
/// UnknownBaseline. Rows labelled `self_label` are skipped unless selected.
std::vector<ComparisonRow> compare_against_baselines(const MetricsInput& input, const MetricsReport& report,
                                                     std::span<const BaselineRow> baselines,
                                                     std::span<const std::string> selection = {},
                                                     const std::string& self_label = "AES-IMC");

/// The simulated design rendered as a baseline row of `table` (1..4).
BaselineRow regenerated_row(int table, const MetricsInput& input, const MetricsReport& report,
                            const std::string& label = "AES-IMC");

/// Both writers append the configuration hash as the last column.
void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows, const std::string& config_hash);
void write_audit_csv(std::ostream& out, std::span<const AuditEntry> entries, const std::string& config_hash);
void write_baseline_rows_csv(std::ostream& out, std::span<const BaselineRow> rows);

}  // namespace aesimc::metrics
