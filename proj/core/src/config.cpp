#include "aesimc/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "aesimc/errors.hpp"

namespace aesimc {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (v.empty() || ec != std::errc{} || p != end) {
    throw ConfigError("config: " + key + " expects a non-negative integer, got '" + v + "'");
  }
  return out;
}

std::uint32_t to_u32(const std::string& key, const std::string& v) {
  const auto x = to_u64(key, v);
  if (x > UINT32_MAX) throw ConfigError("config: " + key + " is out of range");
  return static_cast<std::uint32_t>(x);
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (v.empty() || used != v.size()) throw ConfigError("config: " + key + " expects a number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: " + key + " expects true or false, got '" + v + "'");
}

std::vector<std::uint64_t> to_list(const std::string& key, const std::string& v) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_u64(key, trim(item)));
  return out;
}

std::array<std::size_t, 4> to_rows(const std::string& key, const std::string& v) {
  const auto list = to_list(key, v);
  if (list.size() != 4) throw ConfigError("config: " + key + " expects four row indices");
  return {list[0], list[1], list[2], list[3]};
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class Seq>
std::string join(const Seq& seq) {
  std::string out;
  for (const auto& x : seq) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  }
  return out;
}

CostTable cost_preset(const std::string& name) {
  if (name == "calibrated") return CostTable::calibrated();
  if (name == "zero") return CostTable::zero();
  if (name == "unit") return CostTable::uniform(1, 1.0);
  if (name == "custom") return CostTable::zero();
  throw ConfigError("config: unknown cost preset '" + name + "'");
}

}  // namespace

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

RunConfig config_from_settings(const std::map<std::string, std::string>& settings) {
  RunConfig cfg;
  std::set<std::string> custom_seen;

  if (auto it = settings.find("cost.preset"); it != settings.end()) {
    cfg.cost_preset = it->second;
    cfg.costs = cost_preset(it->second);
  }
  if (auto it = settings.find("schedule.preset"); it != settings.end()) {
    const auto& p = it->second;
    if (p != "calibrated" && p != "derived" && p != "explicit") {
      throw ConfigError("config: unknown schedule preset '" + p + "'");
    }
    cfg.schedule_preset = p;
  }

  for (const auto& [key, value] : settings) {
    if (key == "cost.preset" || key == "schedule.preset") continue;
    if (key == "geometry.rows") {
      cfg.rows = to_u64(key, value);
    } else if (key == "geometry.cols") {
      cfg.cols = to_u64(key, value);
    } else if (key == "layout.data_rows") {
      cfg.layout.data_rows = to_rows(key, value);
    } else if (key == "layout.key_rows") {
      cfg.layout.key_rows = to_rows(key, value);
    } else if (key == "layout.m2_rows") {
      cfg.layout.m2_rows = to_rows(key, value);
    } else if (key == "layout.t_row") {
      cfg.layout.t_row = to_u64(key, value);
    } else if (key == "layout.bytes_per_row") {
      cfg.layout.bytes_per_row = to_u64(key, value);
    } else if (key == "parallel.sbox_units") {
      cfg.parallelism.sbox_units = to_u32(key, value);
    } else if (key == "parallel.m2_units") {
      cfg.parallelism.m2_units = to_u32(key, value);
    } else if (key.rfind("cost.", 0) == 0) {
      const auto rest = key.substr(5);
      const auto dot = rest.find('.');
      const auto kind = dot == std::string::npos ? std::nullopt : op_from_config_name(rest.substr(0, dot));
      const auto field = dot == std::string::npos ? std::string{} : rest.substr(dot + 1);
      if (!kind || (field != "cycles" && field != "energy_pj")) throw ConfigError("config: unknown key '" + key + "'");
      if (field == "cycles") {
        cfg.costs[*kind].cycles = to_u32(key, value);
      } else {
        const double e = to_double(key, value);
        if (e < 0) throw ConfigError("config: " + key + " must be non-negative");
        cfg.costs[*kind].energy_pj = e;
      }
      custom_seen.insert(key);
    } else if (key == "schedule.stages") {
      for (auto b : to_list(key, value)) {
        if (b > UINT32_MAX) throw ConfigError("config: stage budget out of range");
        cfg.stage_budgets.push_back(static_cast<std::uint32_t>(b));
      }
    } else if (key == "schedule.initiation_interval") {
      cfg.initiation_interval = to_u64(key, value);
    } else if (key == "schedule.cross_lane_cycles") {
      cfg.cross_lane_cycles = to_u32(key, value);
    } else if (key == "schedule.fuse_sub_shift") {
      cfg.fuse_sub_shift = to_bool(key, value);
    } else if (key == "freq.f_max_mhz") {
      cfg.f_max_hz = to_double(key, value) * 1e6;
    } else if (key == "freq.f_rf_mhz") {
      cfg.f_rf_hz = to_double(key, value) * 1e6;
    } else if (key == "freq.f_uniform_mhz") {
      cfg.f_uniform_hz = to_double(key, value) * 1e6;
    } else if (key == "metrics.slices") {
      cfg.slices = to_double(key, value);
    } else if (key == "metrics.power_w") {
      cfg.power_w = to_double(key, value);
    } else if (key == "metrics.ciphers") {
      cfg.ciphers = to_double(key, value);
    } else if (key == "farm.banks") {
      cfg.banks = to_u64(key, value);
    } else if (key == "run.seed") {
      cfg.seed = to_u64(key, value);
    } else if (key == "run.threads") {
      cfg.threads = to_u64(key, value);
    } else if (key == "output.trace") {
      cfg.trace_path = value;
    } else if (key == "output.report") {
      cfg.report_path = value;
    } else {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }

  if (cfg.cost_preset == "custom" && custom_seen.size() != 2 * kOpKindCount) {
    throw ConfigError("config: cost.preset=custom needs cycles and energy_pj for all " +
                      std::to_string(kOpKindCount) + " op kinds");
  }
  if (cfg.schedule_preset == "explicit") {
    if (cfg.stage_budgets.size() != Schedule::kStageCount) {
      throw ConfigError("config: schedule.stages needs " + std::to_string(Schedule::kStageCount) + " budgets");
    }
  } else if (!cfg.stage_budgets.empty()) {
    throw ConfigError("config: schedule.stages is only valid with schedule.preset=explicit");
  }
  if (cfg.banks < 1) throw ConfigError("config: farm.banks must be >= 1");
  if (cfg.threads < 1) throw ConfigError("config: run.threads must be >= 1");
  cfg.layout.validate(cfg.rows, cfg.cols);
  cfg.parallelism.validate();
  cfg.metrics_input(26).validate();
  return cfg;
}

RunConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> settings;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    }
    const auto key = trim(t.substr(0, eq));
    const auto value = trim(t.substr(eq + 1));
    if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
    if (!settings.emplace(key, value).second) {
      throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
  }
  return config_from_settings(settings);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::map<std::string, std::string> RunConfig::canonical() const {
  std::map<std::string, std::string> m;
  m["geometry.rows"] = std::to_string(rows);
  m["geometry.cols"] = std::to_string(cols);
  m["layout.data_rows"] = join(layout.data_rows);
  m["layout.key_rows"] = join(layout.key_rows);
  m["layout.m2_rows"] = join(layout.m2_rows);
  m["layout.t_row"] = std::to_string(layout.t_row);
  m["layout.bytes_per_row"] = std::to_string(layout.bytes_per_row);
  m["parallel.sbox_units"] = std::to_string(parallelism.sbox_units);
  m["parallel.m2_units"] = std::to_string(parallelism.m2_units);
  for (auto kind : kAllOpKinds) {
    const std::string base = "cost." + std::string(op_config_name(kind));
    m[base + ".cycles"] = std::to_string(costs[kind].cycles);
    m[base + ".energy_pj"] = num(costs[kind].energy_pj);
  }
  m["schedule.preset"] = schedule_preset;
  if (!stage_budgets.empty()) m["schedule.stages"] = join(stage_budgets);
  m["schedule.initiation_interval"] = std::to_string(initiation_interval);
  m["schedule.cross_lane_cycles"] = std::to_string(cross_lane_cycles);
  m["schedule.fuse_sub_shift"] = fuse_sub_shift ? "true" : "false";
  m["freq.f_max_mhz"] = num(f_max_hz / 1e6);
  m["freq.f_rf_mhz"] = num(f_rf_hz / 1e6);
  m["freq.f_uniform_mhz"] = num(f_uniform_hz / 1e6);
  m["metrics.slices"] = num(slices);
  m["metrics.power_w"] = num(power_w);
  m["metrics.ciphers"] = num(ciphers);
  m["farm.banks"] = std::to_string(banks);
  m["run.seed"] = std::to_string(seed);
  return m;
}

std::string RunConfig::hash() const {
  std::string text;
  for (const auto& [k, v] : canonical()) text += k + '=' + v + '\n';
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(text)));
  return buf;
}

EngineConfig RunConfig::engine() const {
  EngineConfig e;
  e.rows = rows;
  e.cols = cols;
  e.layout = layout;
  e.parallelism = parallelism;
  e.costs = costs;
  if (schedule_preset == "calibrated") {
    e.schedule = Schedule::calibrated();
  } else if (schedule_preset == "derived") {
    e.schedule = Schedule::derived();
  } else {
    e.schedule = Schedule::explicit_budgets(stage_budgets);
  }
  e.cross_lane_cycles = cross_lane_cycles;
  e.initiation_interval = initiation_interval;
  e.fuse_sub_shift = fuse_sub_shift;
  e.banks = banks;
  return e;
}

metrics::MetricsInput RunConfig::metrics_input(std::uint64_t latency_cycles) const {
  metrics::MetricsInput in;
  in.f_max_hz = f_max_hz;
  in.f_rf_hz = f_rf_hz;
  in.f_uniform_hz = f_uniform_hz;
  in.latency_cycles = static_cast<double>(latency_cycles);
  in.slices = slices;
  in.power_w = power_w;
  in.ciphers = ciphers;
  return in;
}

}  // namespace aesimc
