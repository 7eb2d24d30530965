#include "commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aesimc/errors.hpp"
#include "aesimc/gf_aes_ref.hpp"
#include "aesimc/hex.hpp"
#include "aesimc/metrics.hpp"

#ifndef AESIMC_DEFAULT_BASELINES
#define AESIMC_DEFAULT_BASELINES "baselines.csv"
#endif

namespace aesimc::cli {

namespace {

class InputError : public Error {
 public:
  using Error::Error;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open input file '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write output file '" + path + "'");
  return out;
}

void write_trace(const std::string& path, const Trace& trace, const std::string& config_hash) {
  auto out = open_output(path);
  nlohmann::ordered_json header;
  header["config_hash"] = config_hash;
  header["events"] = trace.size();
  out << header.dump() << '\n';
  trace.write_jsonl(out);
}

std::string trace_path(const CommonOptions& opts, const RunConfig& cfg) {
  return opts.trace_path.empty() ? cfg.trace_path : opts.trace_path;
}

std::string out_path(const CommonOptions& opts, const RunConfig& cfg) {
  return opts.out_path.empty() ? cfg.report_path : opts.out_path;
}

/// Runs `body`, turning the library's exceptions into exit codes.
template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const FormatError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
}

}  // namespace

RunConfig resolve_config(const CommonOptions& opts) {
  RunConfig cfg = opts.config_path.empty() ? config_from_settings({}) : load_config(opts.config_path);
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.banks) {
    if (*opts.banks < 1) throw ConfigError("--banks must be >= 1");
    cfg.banks = *opts.banks;
  }
  if (opts.threads) {
    if (*opts.threads < 1) throw ConfigError("--threads must be >= 1");
    cfg.threads = *opts.threads;
  }
  return cfg;
}

std::vector<BlockJob> random_jobs(std::uint64_t seed, std::size_t n) {
  std::mt19937_64 rng(seed);
  auto fill = [&rng](std::array<std::uint8_t, 16>& bytes) {
    for (std::size_t half = 0; half < 2; ++half) {
      std::uint64_t word = rng();
      for (std::size_t i = 0; i < 8; ++i, word >>= 8) bytes[half * 8 + i] = static_cast<std::uint8_t>(word);
    }
  };
  std::vector<BlockJob> jobs(n);
  for (auto& job : jobs) {
    fill(job.plaintext);
    fill(job.key);
  }
  return jobs;
}

std::vector<std::size_t> parse_range(const std::string& text, const std::string& knob) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || s[0] == '-' || v == 0) {
      throw ConfigError(knob + ": '" + s + "' is not a positive integer");
    }
    return static_cast<std::size_t>(v);
  };
  std::vector<std::size_t> out;
  if (const auto dots = text.find(".."); dots != std::string::npos) {
    const auto lo = number(text.substr(0, dots));
    const auto hi = number(text.substr(dots + 2));
    if (lo > hi) throw ConfigError(knob + ": empty range '" + text + "'");
    for (auto v = lo; v <= hi; ++v) out.push_back(v);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(number(item));
  }
  if (out.empty()) throw ConfigError(knob + ": empty range");
  return out;
}

int cmd_encrypt(const EncryptOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const std::string hash = cfg.hash();
    const PipelineEngine engine(cfg.engine(), hash);

    auto key_in = open_input(opts.key_path);
    const Key128 key = hex::read_key(key_in);
    auto block_in = open_input(opts.input_path);
    const auto blocks = hex::read_blocks(block_in);

    std::vector<BlockJob> jobs;
    for (const auto& b : blocks) jobs.push_back({b, key});
    const auto tpath = trace_path(opts, cfg);
    Trace trace;
    const AggregateReport report = engine.run_banked(jobs, tpath.empty() ? nullptr : &trace, cfg.threads);

    const auto opath = out_path(opts, cfg);
    std::ofstream file;
    if (!opath.empty()) file = open_output(opath);
    std::ostream& cipher_out = opath.empty() ? out : file;
    std::ostream& stats_out = opath.empty() ? err : out;
    for (std::size_t i = 0; i < report.ciphertexts.size(); ++i) {
      cipher_out << hex::encode(report.ciphertexts[i]) << '\n';
      stats_out << "block " << i << " cycles=" << report.cycles_per_block
                << " energy_pJ=" << report.energy_pj_total / static_cast<double>(report.blocks) << '\n';
    }
    stats_out << report.to_json() << '\n';
    if (!tpath.empty()) write_trace(tpath, trace, hash);
    return kOk;
  });
}

std::optional<std::size_t> first_mismatch(const std::vector<BlockJob>& jobs, const std::vector<Block>& got,
                                          std::ostream& err) {
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const Block want = encrypt_block(jobs[i].plaintext, jobs[i].key);
    if (i >= got.size() || got[i] != want) {
      err << "mismatch at block " << i << ": pt=" << hex::encode(jobs[i].plaintext)
          << " key=" << hex::encode(jobs[i].key) << " imc=" << (i < got.size() ? hex::encode(got[i]) : "<missing>")
          << " ref=" << hex::encode(want) << '\n';
      return i;
    }
  }
  return std::nullopt;
}

int cmd_verify(const VerifyOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.blocks < 1) throw ConfigError("--blocks must be >= 1");
    const RunConfig cfg = resolve_config(opts);
    const std::string hash = cfg.hash();
    const PipelineEngine engine(cfg.engine(), hash);
    const auto jobs = random_jobs(cfg.seed, opts.blocks);

    const auto tpath = trace_path(opts, cfg);
    Trace trace;
    const AggregateReport report = engine.run_banked(jobs, tpath.empty() ? nullptr : &trace, cfg.threads);
    const auto bad = first_mismatch(jobs, report.ciphertexts, err);

    std::string digest_text;
    for (const auto& c : report.ciphertexts) digest_text += hex::encode(c);

    nlohmann::ordered_json j = nlohmann::ordered_json::parse(report.to_json());
    j["seed"] = cfg.seed;
    j["banks"] = cfg.banks;
    j["mismatches"] = bad ? 1 : 0;
    j["ciphertext_digest"] = hex64(fnv1a64(digest_text));
    j["report_hash"] = hex64(fnv1a64(j.dump()));

    const auto opath = out_path(opts, cfg);
    if (opath.empty()) {
      out << j.dump() << '\n';
    } else {
      open_output(opath) << j.dump() << '\n';
    }
    if (!tpath.empty()) write_trace(tpath, trace, hash);
    return bad ? kMismatch : kOk;
  });
}

int cmd_metrics(const MetricsOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = resolve_config(opts);
    const std::string hash = cfg.hash();
    const PipelineEngine engine(cfg.engine(), hash);

    const std::string path = opts.baselines_path.empty() ? AESIMC_DEFAULT_BASELINES : opts.baselines_path;
    std::ifstream bin(path);
    if (!bin) throw DatasetError("cannot open baseline file '" + path + "'");
    const auto baselines = metrics::read_baselines(bin);

    const auto input = cfg.metrics_input(engine.cycles_per_block());
    const auto report = metrics::build_report(input);
    const auto comparison = metrics::compare_against_baselines(input, report, baselines, opts.compare);
    const auto audit = metrics::audit_baselines(baselines, {cfg.f_rf_hz, cfg.f_uniform_hz});

    char line[160];
    out << "config_hash " << hash << '\n';
    out << "latency_cycles " << engine.cycles_per_block() << '\n';
    std::snprintf(line, sizeof line,
                  "thr_Mbps %.4f\nthr_per_slc %.5f\nthr_star_Mbps %.4f\nenergy_uJ %.6f\nenergy_per_bit_nJ %.5f\n"
                  "dpr_GBps %.4f\n",
                  report.thr_bps / 1e6, report.thr_per_slc / 1e6, report.thr_star_bps / 1e6, report.energy_j * 1e6,
                  report.energy_per_bit_j * 1e9, report.dpr_Bps / 1e9);
    out << line << '\n';

    std::vector<metrics::BaselineRow> regenerated;
    for (int t = 1; t <= 4; ++t) regenerated.push_back(metrics::regenerated_row(t, input, report));
    metrics::write_baseline_rows_csv(out, regenerated);
    out << '\n';

    for (const auto& e : audit) {
      std::snprintf(line, sizeof line, "%-12s table %d  %-28s %-14s published=%-10g computed=%-12.6g rel=%.4f tol=%.4f",
                    audit_status_name(e.status), e.table, e.work_label.c_str(), e.column.c_str(), e.published,
                    e.computed, e.rel_error, e.tolerance);
      out << line;
      if (!e.note.empty()) out << "  (" << e.note << ')';
      out << '\n';
    }

    const auto opath = out_path(opts, cfg);
    if (!opath.empty()) {
      auto f = open_output(opath);
      metrics::write_comparison_csv(f, comparison, hash);
    } else {
      out << '\n';
      metrics::write_comparison_csv(out, comparison, hash);
    }
    if (!opts.audit_path.empty()) {
      auto f = open_output(opts.audit_path);
      metrics::write_audit_csv(f, audit, hash);
    }
    return kOk;
  });
}

namespace {

struct SweepPoint {
  std::size_t sbox_units, m2_units, banks;
};

std::string sweep_row(const RunConfig& base, const SweepPoint& p, const std::vector<BlockJob>& jobs) {
  RunConfig cfg = base;
  cfg.parallelism.sbox_units = static_cast<unsigned>(p.sbox_units);
  cfg.parallelism.m2_units = static_cast<unsigned>(p.m2_units);
  cfg.banks = p.banks;
  cfg.parallelism.validate();
  const std::string hash = cfg.hash();
  const PipelineEngine engine(cfg.engine(), hash);
  const AggregateReport report = engine.run_banked(jobs, nullptr, 1);
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (report.ciphertexts[i] != encrypt_block(jobs[i].plaintext, jobs[i].key)) {
      throw Error("sweep point produced a wrong ciphertext");
    }
  }
  const auto mreport = metrics::build_report(cfg.metrics_input(engine.cycles_per_block()));
  char line[320];
  std::snprintf(line, sizeof line, "%zu,%zu,%zu,%zu,%zu,%llu,%llu,%.3f,%.4f,%.5f,%s", p.sbox_units, p.m2_units,
                p.banks, cfg.parallelism.sbox_batches(cfg.layout.bytes_per_row),
                cfg.parallelism.m2_batches(cfg.layout.bytes_per_row),
                static_cast<unsigned long long>(engine.cycles_per_block()),
                static_cast<unsigned long long>(report.cycles_total), report.energy_per_block_pj,
                mreport.thr_bps / 1e6, mreport.energy_per_bit_j * 1e9, hash.c_str());
  return line;
}

}  // namespace

int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.blocks < 1) throw ConfigError("--blocks must be >= 1");
    const RunConfig cfg = resolve_config(opts);
    const auto sbox = opts.sbox_units.empty() ? std::vector<std::size_t>{cfg.parallelism.sbox_units}
                                              : parse_range(opts.sbox_units, "--sbox-units");
    const auto m2 = opts.m2_units.empty() ? std::vector<std::size_t>{cfg.parallelism.m2_units}
                                          : parse_range(opts.m2_units, "--m2-units");
    const auto banks = opts.bank_counts.empty() ? std::vector<std::size_t>{cfg.banks}
                                                : parse_range(opts.bank_counts, "--bank-counts");

    std::vector<SweepPoint> points;
    for (auto s : sbox)
      for (auto m : m2)
        for (auto b : banks) points.push_back({s, m, b});
    const auto jobs = random_jobs(cfg.seed, opts.blocks);

    std::vector<std::string> rows(points.size());
    const std::size_t workers = std::min(cfg.threads, points.size());
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t i = w; i < points.size(); i += workers) rows[i] = sweep_row(cfg, points[i], jobs);
      }));
    }
    for (auto& t : tasks) t.get();

    std::ostringstream csv;
    csv << "sbox_units,m2_units,banks,sbox_batches_per_row,m2_batches_per_row,cycles_per_block,wall_cycles,"
           "energy_per_block_pJ,thr_Mbps,E_per_bit_nJ,config_hash\n";
    for (const auto& r : rows) csv << r << '\n';
    const auto opath = out_path(opts, cfg);
    if (opath.empty()) {
      out << csv.str();
    } else {
      open_output(opath) << csv.str();
    }
    return kOk;
  });
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"In-memory AES-128 simulator"};
  app.require_subcommand(1);

  auto add_common = [](CLI::App* sub, CommonOptions& o) {
    sub->add_option("--config", o.config_path, "Configuration file (key=value)");
    sub->add_option("--trace", o.trace_path, "Write the micro-op trace as JSON lines");
    sub->add_option("--out", o.out_path, "Output file");
    sub->add_option("--seed", o.seed, "Seed for generated blocks");
    sub->add_option("--banks", o.banks, "Number of independent banks");
    sub->add_option("--threads", o.threads, "Worker threads");
  };

  EncryptOptions enc;
  auto* s_enc = app.add_subcommand("encrypt", "Encrypt hex blocks with the simulated array");
  add_common(s_enc, enc);
  s_enc->add_option("input", enc.input_path, "Plaintext file, one 32-digit hex block per line")->required();
  s_enc->add_option("key", enc.key_path, "Key file, one 32-digit hex line")->required();

  VerifyOptions ver;
  auto* s_ver = app.add_subcommand("verify", "Check random blocks against the reference cipher");
  add_common(s_ver, ver);
  s_ver->add_option("--blocks", ver.blocks, "Number of random blocks");

  MetricsOptions met;
  auto* s_met = app.add_subcommand("metrics", "Regenerate figures of merit and audit the baseline tables");
  add_common(s_met, met);
  s_met->add_option("--baselines", met.baselines_path, "Baseline CSV");
  s_met->add_option("--compare", met.compare, "Restrict the comparison to these work labels");
  s_met->add_option("--audit", met.audit_path, "Write the audit as CSV");

  SweepOptions swp;
  auto* s_swp = app.add_subcommand("sweep", "Sweep parallelism knobs");
  add_common(s_swp, swp);
  s_swp->add_option("--sbox-units", swp.sbox_units, "S-box units per lane, e.g. 1..8");
  s_swp->add_option("--m2-units", swp.m2_units, "M-2 units per lane, e.g. 1,2,4");
  s_swp->add_option("--bank-counts", swp.bank_counts, "Bank counts, e.g. 1,2,4,8");
  s_swp->add_option("--blocks", swp.blocks, "Blocks pushed through each point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  if (s_enc->parsed()) return cmd_encrypt(enc, out, err);
  if (s_ver->parsed()) return cmd_verify(ver, out, err);
  if (s_met->parsed()) return cmd_metrics(met, out, err);
  return cmd_sweep(swp, out, err);
}

}  // namespace aesimc::cli
