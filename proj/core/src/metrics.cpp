#include "aesimc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "aesimc/errors.hpp"

namespace aesimc::metrics {

double throughput(double f_max_hz, double block_bits, double latency_cycles) {
  if (!(latency_cycles >= 1)) throw ConfigError("throughput: latency must be >= 1 cycle");
  return f_max_hz * block_bits / latency_cycles;
}

double throughput_per_slice(double thr_bps, double slices) {
  if (!(slices >= 1)) throw ConfigError("throughput_per_slice: slice count must be >= 1");
  return thr_bps / slices;
}

double throughput_star(double f_rf_hz, double block_bits, double latency_cycles) {
  return throughput(f_rf_hz, block_bits, latency_cycles);
}

double energy_per_block(double power_w, double latency_cycles, double f_rf_hz) {
  if (!(f_rf_hz > 0)) throw ConfigError("energy_per_block: frequency must be positive");
  return power_w * latency_cycles / f_rf_hz;
}

double energy_per_bit(double energy_j, double block_bits) {
  if (!(block_bits >= 1)) throw ConfigError("energy_per_bit: block size must be >= 1 bit");
  return energy_j / block_bits;
}

double data_processing_rate(double ciphers, double f_hz, double bytes_per_cipher, double latency_cycles) {
  if (!(ciphers > 0 && f_hz > 0 && bytes_per_cipher > 0 && latency_cycles > 0)) {
    throw ConfigError("data_processing_rate: all inputs must be positive");
  }
  return ciphers * f_hz * bytes_per_cipher / latency_cycles;
}

void MetricsInput::validate() const {
  const std::pair<const char*, double> fields[] = {
      {"f_max_hz", f_max_hz}, {"f_rf_hz", f_rf_hz},   {"f_uniform_hz", f_uniform_hz},
      {"block_bits", block_bits}, {"latency_cycles", latency_cycles}, {"slices", slices},
      {"power_w", power_w},   {"ciphers", ciphers}, {"bytes_per_cipher", bytes_per_cipher}};
  for (const auto& [name, v] : fields) {
    if (!(v > 0)) throw ConfigError(std::string("metrics input ") + name + " must be strictly positive");
  }
}

MetricsReport build_report(const MetricsInput& in) {
  in.validate();
  MetricsReport r;
  r.thr_bps = throughput(in.f_max_hz, in.block_bits, in.latency_cycles);
  r.thr_per_slc = throughput_per_slice(r.thr_bps, in.slices);
  r.thr_star_bps = throughput_star(in.f_rf_hz, in.block_bits, in.latency_cycles);
  r.energy_j = energy_per_block(in.power_w, in.latency_cycles, in.f_rf_hz);
  r.energy_per_bit_j = energy_per_bit(r.energy_j, in.block_bits);
  r.dpr_Bps = data_processing_rate(in.ciphers, in.f_uniform_hz, in.bytes_per_cipher, in.latency_cycles);
  return r;
}

// ---------------------------------------------------------------------------
// Baseline dataset

namespace {

const std::vector<std::string>& header_columns() {
  static const std::vector<std::string> cols = [] {
    std::vector<std::string> out;
    std::stringstream ss(kBaselineHeader);
    std::string c;
    while (std::getline(ss, c, ',')) out.push_back(c);
    return out;
  }();
  return cols;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell.push_back(ch);
    }
  }
  out.push_back(cell);
  return out;
}

std::optional<double> parse_number(const std::string& text, std::size_t line, const std::string& column) {
  if (text.empty()) return std::nullopt;
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size()) {
    throw DatasetError("baselines line " + std::to_string(line) + ": column " + column + " is not numeric: '" +
                       text + "'");
  }
  return v;
}

std::optional<double>* numeric_field(BaselineRow& row, const std::string& col) {
  if (col == "state_bits") return &row.state_bits;
  if (col == "key_bits") return &row.key_bits;
  if (col == "ff") return &row.ff;
  if (col == "lut") return &row.lut;
  if (col == "slc") return &row.slc;
  if (col == "fmax_MHz") return &row.fmax_MHz;
  if (col == "L") return &row.L;
  if (col == "thr_Mbps") return &row.thr_Mbps;
  if (col == "thr_per_slc") return &row.thr_per_slc;
  if (col == "thr_star_Mbps") return &row.thr_star_Mbps;
  if (col == "P_value") return &row.P_value;
  if (col == "E_uJ") return &row.E_uJ;
  if (col == "E_per_bit_nJ") return &row.E_per_bit_nJ;
  if (col == "area_um2") return &row.area_um2;
  if (col == "ciphers") return &row.ciphers;
  if (col == "dpr_GBps") return &row.dpr_GBps;
  return nullptr;
}

}  // namespace

std::string BaselineRow::text(const std::string& column) const {
  auto it = cells.find(column);
  return it == cells.end() ? std::string{} : it->second;
}

std::optional<double> BaselineRow::power_w() const {
  if (!P_value) return std::nullopt;
  if (P_unit == "mW") return *P_value * 1e-3;
  return *P_value;
}

std::vector<BaselineRow> read_baselines(std::istream& in) {
  std::vector<BaselineRow> rows;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  const auto& cols = header_columns();
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const auto cells = split_csv(line);
    if (!have_header) {
      if (cells != cols) throw DatasetError("baselines line " + std::to_string(lineno) + ": unexpected header");
      have_header = true;
      continue;
    }
    if (cells.size() != cols.size()) {
      throw DatasetError("baselines line " + std::to_string(lineno) + ": expected " + std::to_string(cols.size()) +
                         " cells, got " + std::to_string(cells.size()));
    }
    BaselineRow row;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      const std::string& col = cols[i];
      const std::string& cell = cells[i];
      if (!cell.empty()) row.cells[col] = cell;
      if (col == "table") {
        const auto t = parse_number(cell, lineno, col);
        if (!t || *t < 1 || *t > 4 || *t != std::floor(*t)) {
          throw DatasetError("baselines line " + std::to_string(lineno) + ": table must be 1..4");
        }
        row.table = static_cast<int>(*t);
      } else if (col == "work_label") {
        row.work_label = cell;
      } else if (col == "device") {
        row.device = cell;
      } else if (col == "P_unit") {
        if (!cell.empty() && cell != "W" && cell != "mW") {
          throw DatasetError("baselines line " + std::to_string(lineno) + ": P_unit must be W or mW");
        }
        row.P_unit = cell;
      } else {
        *numeric_field(row, col) = parse_number(cell, lineno, col);
      }
    }
    if (row.work_label.empty()) throw DatasetError("baselines line " + std::to_string(lineno) + ": empty work_label");
    if (row.P_value && row.P_unit.empty()) {
      throw DatasetError("baselines line " + std::to_string(lineno) + ": P_value without P_unit");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Audit

const char* audit_status_name(AuditStatus s) {
  switch (s) {
    case AuditStatus::Pass:
      return "pass";
    case AuditStatus::Flagged:
      return "flagged";
    case AuditStatus::Unverifiable:
      return "unverifiable";
  }
  return "?";
}

double cell_tolerance(const std::string& published_text, double base_tolerance) {
  double value = 0;
  try {
    value = std::stod(published_text);
  } catch (const std::exception&) {
    return base_tolerance;
  }
  if (value == 0) return base_tolerance;
  const auto dot = published_text.find('.');
  const int decimals = dot == std::string::npos ? 0 : static_cast<int>(published_text.size() - dot - 1);
  const double half_unit = 0.5 * std::pow(10.0, -decimals);
  return std::max(base_tolerance, half_unit / std::fabs(value));
}

namespace {

constexpr double kBaseTolerance = 0.01;
constexpr double kEnergyTolerance = 0.05;

struct KnownInconsistency {
  int table;
  const char* label;
  const char* column;
  const char* note;
};

// Published cells that no reading of the metric definitions reproduces.
constexpr KnownInconsistency kKnownInconsistent[] = {
    {3, "AES-IMC", "E_uJ", "0.9 nJ is not P*L/F at 13.56 MHz or 30 MHz"},
    {3, "CMOS ASIC [45]", "thr_Mbps", "5.16 Mbps disagrees with F*B/L at 30 MHz (11.4 Mbps)"},
};

const KnownInconsistency* known_inconsistent(const BaselineRow& row, const std::string& column) {
  for (const auto& k : kKnownInconsistent) {
    if (k.table == row.table && row.work_label == k.label && column == k.column) return &k;
  }
  return nullptr;
}

void check(std::vector<AuditEntry>& out, const BaselineRow& row, const std::string& column, double computed,
           double base_tol) {
  const auto text = row.text(column);
  if (text.empty()) return;
  AuditEntry e;
  e.table = row.table;
  e.work_label = row.work_label;
  e.device = row.device;
  e.column = column;
  e.published = std::stod(text);
  e.computed = computed;
  e.rel_error = e.published == 0 ? std::fabs(computed) : std::fabs(computed - e.published) / std::fabs(e.published);
  e.tolerance = cell_tolerance(text, base_tol);
  e.status = e.rel_error <= e.tolerance ? AuditStatus::Pass : AuditStatus::Flagged;
  if (const auto* k = known_inconsistent(row, column)) {
    if (e.status != AuditStatus::Pass) {
      e.status = AuditStatus::Unverifiable;
      e.note = k->note;
    }
  }
  out.push_back(std::move(e));
}

}  // namespace

std::vector<AuditEntry> audit_baselines(std::span<const BaselineRow> rows, const AuditFrequencies& freq) {
  std::vector<AuditEntry> out;
  for (const auto& row : rows) {
    const double bits = row.state_bits.value_or(128);
    switch (row.table) {
      case 1: {
        if (!row.fmax_MHz || !row.L) break;
        const double thr = throughput(*row.fmax_MHz * 1e6, bits, *row.L);
        check(out, row, "thr_Mbps", thr / 1e6, kBaseTolerance);
        if (row.slc) check(out, row, "thr_per_slc", throughput_per_slice(thr, *row.slc) / 1e6, kBaseTolerance);
        check(out, row, "thr_star_Mbps", throughput_star(freq.f_rf_hz, bits, *row.L) / 1e6, kBaseTolerance);
        break;
      }
      case 2: {
        const auto p = row.power_w();
        if (!p || !row.L) break;
        const double e = energy_per_block(*p, *row.L, freq.f_rf_hz);
        check(out, row, "E_uJ", e * 1e6, kEnergyTolerance);
        check(out, row, "E_per_bit_nJ", energy_per_bit(e, bits) * 1e9, kEnergyTolerance);
        break;
      }
      case 3: {
        if (!row.L) break;
        check(out, row, "thr_Mbps", throughput(freq.f_uniform_hz, bits, *row.L) / 1e6, kBaseTolerance);
        if (const auto p = row.power_w()) {
          check(out, row, "E_uJ", energy_per_block(*p, *row.L, freq.f_uniform_hz) * 1e6, kEnergyTolerance);
        }
        break;
      }
      case 4: {
        if (!row.ciphers || !row.L) break;
        const double dpr = data_processing_rate(*row.ciphers, freq.f_uniform_hz, bits / 8, *row.L);
        check(out, row, "dpr_GBps", dpr / 1e9, kBaseTolerance);
        break;
      }
      default:
        break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Comparison

namespace {

struct MetricValue {
  std::string name;
  double value;
  std::optional<double> baseline;
};

std::vector<MetricValue> metric_values(const MetricsInput& in, const MetricsReport& rep, const BaselineRow& row) {
  switch (row.table) {
    case 1:
      return {{"thr_Mbps", rep.thr_bps / 1e6, row.thr_Mbps},
              {"thr_per_slc", rep.thr_per_slc / 1e6, row.thr_per_slc},
              {"thr_star_Mbps", rep.thr_star_bps / 1e6, row.thr_star_Mbps}};
    case 2:
      return {{"P_W", in.power_w, row.power_w()},
              {"E_uJ", rep.energy_j * 1e6, row.E_uJ},
              {"E_per_bit_nJ", rep.energy_per_bit_j * 1e9, row.E_per_bit_nJ}};
    case 3:
      return {{"thr_uniform_Mbps", throughput(in.f_uniform_hz, in.block_bits, in.latency_cycles) / 1e6, row.thr_Mbps},
              {"P_W", in.power_w, row.power_w()}};
    case 4:
      return {{"dpr_GBps", rep.dpr_Bps / 1e9, row.dpr_GBps}};
    default:
      return {};
  }
}

}  // namespace

std::vector<ComparisonRow> compare_against_baselines(const MetricsInput& input, const MetricsReport& report,
                                                     std::span<const BaselineRow> baselines,
                                                     std::span<const std::string> selection,
                                                     const std::string& self_label) {
  std::set<std::string> wanted(selection.begin(), selection.end());
  for (const auto& label : wanted) {
    const bool found = std::any_of(baselines.begin(), baselines.end(),
                                   [&](const BaselineRow& r) { return r.work_label == label; });
    if (!found) throw UnknownBaseline("no baseline row labelled '" + label + "'");
  }
  std::vector<ComparisonRow> out;
  for (const auto& row : baselines) {
    if (wanted.empty() ? row.work_label == self_label : !wanted.count(row.work_label)) continue;
    for (const auto& m : metric_values(input, report, row)) {
      if (!m.baseline || *m.baseline == 0) continue;
      out.push_back({m.name, row.table, row.work_label, row.device, m.value, *m.baseline, m.value / *m.baseline});
    }
  }
  return out;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void set_cell(BaselineRow& row, const std::string& col, double v) {
  *numeric_field(row, col) = v;
  row.cells[col] = fmt(v);
}

}  // namespace

BaselineRow regenerated_row(int table, const MetricsInput& in, const MetricsReport& rep, const std::string& label) {
  BaselineRow row;
  row.table = table;
  row.work_label = label;
  row.device = "simulated";
  set_cell(row, "state_bits", in.block_bits);
  set_cell(row, "key_bits", 128);
  set_cell(row, "L", in.latency_cycles);
  switch (table) {
    case 1:
      set_cell(row, "slc", in.slices);
      set_cell(row, "fmax_MHz", in.f_max_hz / 1e6);
      set_cell(row, "thr_Mbps", rep.thr_bps / 1e6);
      set_cell(row, "thr_per_slc", rep.thr_per_slc / 1e6);
      set_cell(row, "thr_star_Mbps", rep.thr_star_bps / 1e6);
      break;
    case 2:
      set_cell(row, "P_value", in.power_w);
      row.P_unit = "W";
      row.cells["P_unit"] = "W";
      set_cell(row, "E_uJ", rep.energy_j * 1e6);
      set_cell(row, "E_per_bit_nJ", rep.energy_per_bit_j * 1e9);
      break;
    case 3:
      set_cell(row, "thr_Mbps", throughput(in.f_uniform_hz, in.block_bits, in.latency_cycles) / 1e6);
      set_cell(row, "P_value", in.power_w);
      row.P_unit = "W";
      row.cells["P_unit"] = "W";
      break;
    case 4:
      set_cell(row, "ciphers", in.ciphers);
      set_cell(row, "dpr_GBps", rep.dpr_Bps / 1e9);
      break;
    default:
      throw DatasetError("regenerated_row: table must be 1..4");
  }
  return row;
}

void write_comparison_csv(std::ostream& out, std::span<const ComparisonRow> rows, const std::string& config_hash) {
  out << "metric,table,baseline,device,value,baseline_value,ratio,config_hash\n";
  for (const auto& r : rows) {
    out << r.metric << ',' << r.table << ',' << r.work_label << ',' << r.device << ',' << fmt(r.value) << ','
        << fmt(r.baseline_value) << ',' << fmt(r.ratio) << ',' << config_hash << '\n';
  }
}

void write_audit_csv(std::ostream& out, std::span<const AuditEntry> entries, const std::string& config_hash) {
  out << "table,work_label,device,column,published,computed,rel_error,tolerance,status,note,config_hash\n";
  for (const auto& e : entries) {
    out << e.table << ',' << e.work_label << ',' << e.device << ',' << e.column << ',' << fmt(e.published) << ','
        << fmt(e.computed) << ',' << fmt(e.rel_error) << ',' << fmt(e.tolerance) << ','
        << audit_status_name(e.status) << ',' << e.note << ',' << config_hash << '\n';
  }
}

void write_baseline_rows_csv(std::ostream& out, std::span<const BaselineRow> rows) {
  const auto& cols = header_columns();
  out << kBaselineHeader << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < cols.size(); ++i) {
      if (i) out << ',';
      if (cols[i] == "table") {
        out << row.table;
      } else if (cols[i] == "work_label") {
        out << row.work_label;
      } else if (cols[i] == "device") {
        out << row.device;
      } else {
        out << row.text(cols[i]);
      }
    }
    out << '\n';
  }
}

}  // namespace aesimc::metrics
