#include "aesimc/pipeline.hpp"

#include <future>
#include <nlohmann/json.hpp>
#include <string>

#include "aesimc/errors.hpp"

namespace aesimc {

namespace {

std::vector<Stage> canonical_stages() {
  std::vector<Stage> s;
  s.push_back({"load", Phase::Load, 0, std::nullopt});
  s.push_back({"ark0", Phase::InitialArk, 0, std::nullopt});
  for (std::size_t r = 1; r <= KeySchedule::kRounds; ++r) {
    s.push_back({"sub_shift" + std::to_string(r), Phase::SubShift, r, std::nullopt});
    if (r != KeySchedule::kRounds) {
      s.push_back({"mix_ark" + std::to_string(r), Phase::MixArk, r, std::nullopt});
    } else {
      s.push_back({"ark" + std::to_string(r), Phase::FinalArk, r, std::nullopt});
    }
  }
  s.push_back({"drain", Phase::Drain, 0, std::nullopt});
  return s;
}

}  // namespace

Schedule Schedule::calibrated() {
  Schedule sched{canonical_stages()};
  for (auto& st : sched.stages) st.budget = st.phase == Phase::Drain ? 4u : 1u;
  return sched;
}

Schedule Schedule::derived() { return Schedule{canonical_stages()}; }

Schedule Schedule::explicit_budgets(std::span<const std::uint32_t> budgets) {
  if (budgets.size() != kStageCount) {
    throw ConfigError("explicit schedule needs " + std::to_string(kStageCount) + " stage budgets, got " +
                      std::to_string(budgets.size()));
  }
  Schedule sched{canonical_stages()};
  for (std::size_t i = 0; i < budgets.size(); ++i) sched.stages[i].budget = budgets[i];
  return sched;
}

bool Schedule::is_explicit() const {
  return !stages.empty() && stages.front().budget.has_value();
}

std::optional<std::uint64_t> Schedule::explicit_total() const {
  if (!is_explicit()) return std::nullopt;
  std::uint64_t total = 0;
  for (const auto& st : stages) total += *st.budget;
  return total;
}

std::string AggregateReport::to_json() const {
  nlohmann::ordered_json j;
  j["blocks"] = blocks;
  j["cycles_total"] = cycles_total;
  j["energy_pJ_total"] = energy_pj_total;
  j["cycles_per_block"] = cycles_per_block;
  j["energy_per_block_pJ"] = energy_per_block_pj;
  j["config_hash"] = config_hash;
  return j.dump();
}

PipelineEngine::PipelineEngine(EngineConfig config, std::string config_hash)
    : config_(std::move(config)), config_hash_(std::move(config_hash)) {
  config_.layout.validate(config_.rows, config_.cols);
  config_.parallelism.validate();
  if (config_.banks < 1) throw ConfigError("farm.banks must be >= 1");
  const auto& stages = config_.schedule.stages;
  if (stages.size() != Schedule::kStageCount) throw ConfigError("schedule must have 23 stages");
  const bool first = stages.front().budget.has_value();
  for (const auto& st : stages) {
    if (st.budget.has_value() != first) {
      throw ConfigError("schedule mixes explicit and derived stage budgets");
    }
  }
  // The op sequence is data independent, so one probe block fixes the latency.
  const BlockResult probe = run_block(Block{}, Key128{});
  cycles_per_block_ = probe.cycles;
  if (cycles_per_block_ == 0) {
    throw ConfigError("schedule yields a zero-cycle block; give the cost table latencies or use explicit budgets");
  }
  initiation_interval_ = config_.initiation_interval == 0 ? cycles_per_block_ : config_.initiation_interval;
  if (initiation_interval_ > cycles_per_block_) {
    throw ConfigError("initiation interval " + std::to_string(initiation_interval_) +
                      " exceeds the block latency " + std::to_string(cycles_per_block_));
  }
}

BlockResult PipelineEngine::run_block(const Block& plaintext, const Key128& key, Trace* trace,
                                      std::uint32_t bank, std::uint64_t origin) const {
  LanePair pair(config_.rows, config_.cols, config_.layout);
  return run_on(pair, plaintext, key, trace, bank, origin);
}

BlockResult PipelineEngine::run_on(LanePair& pair, const Block& plaintext, const Key128& key, Trace* trace,
                                   std::uint32_t bank, std::uint64_t origin) const {
  Timeline timeline(config_.costs, bank, origin, trace);
  pair.attach(&timeline, config_.cross_lane_cycles);
  KeyGenerator keygen(key);
  BlockResult result;

  for (const Stage& stage : config_.schedule.stages) {
    timeline.begin_stage();
    switch (stage.phase) {
      case Phase::Load:
        load_block(pair, plaintext, key);
        break;
      case Phase::InitialArk:
        seq_add_round_key(pair.lane(0));
        seq_add_round_key(pair.lane(1));
        break;
      case Phase::SubShift:
        if (config_.fuse_sub_shift) {
          seq_sub_shift(pair, config_.parallelism);
        } else {
          seq_sub_bytes(pair.lane(0), config_.parallelism);
          seq_sub_bytes(pair.lane(1), config_.parallelism);
          seq_shift_rows(pair);
        }
        break;
      case Phase::MixArk:
        seq_mix_columns(pair.lane(0), config_.parallelism);
        seq_mix_columns(pair.lane(1), config_.parallelism);
        seq_key_round_update(keygen, stage.round, pair);
        seq_add_round_key(pair.lane(0));
        seq_add_round_key(pair.lane(1));
        break;
      case Phase::FinalArk:
        seq_key_round_update(keygen, stage.round, pair);
        seq_add_round_key(pair.lane(0));
        seq_add_round_key(pair.lane(1));
        break;
      case Phase::Drain:
        result.ciphertext = readout_block(pair);
        break;
    }
    result.cycles += timeline.end_stage(stage.budget, stage.name);
  }
  pair.attach(nullptr);

  result.energy_pj = timeline.energy_pj();
  for (std::size_t k = 0; k < kOpKindCount; ++k) result.op_counts[k] = timeline.count(kAllOpKinds[k]);
  return result;
}

std::uint64_t PipelineEngine::stream_cycles(std::uint64_t n) const {
  if (n == 0) return 0;
  return cycles_per_block_ + (n - 1) * initiation_interval_;
}

AggregateReport PipelineEngine::run_stream(std::span<const BlockJob> jobs, Trace* trace,
                                           std::uint32_t bank) const {
  AggregateReport report;
  report.config_hash = config_hash_;
  report.cycles_per_block = cycles_per_block_;
  LanePair pair(config_.rows, config_.cols, config_.layout);
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const BlockResult r = run_on(pair, jobs[k].plaintext, jobs[k].key, trace, bank, k * initiation_interval_);
    report.ciphertexts.push_back(r.ciphertext);
    report.energy_pj_total += r.energy_pj;
  }
  report.blocks = jobs.size();
  report.cycles_total = stream_cycles(jobs.size());
  report.energy_per_block_pj = jobs.empty() ? 0.0 : report.energy_pj_total / static_cast<double>(jobs.size());
  return report;
}

AggregateReport PipelineEngine::run_banked(std::span<const BlockJob> jobs, Trace* trace,
                                           std::size_t workers) const {
  const std::size_t banks = config_.banks;
  std::vector<std::vector<BlockJob>> per_bank(banks);
  for (std::size_t i = 0; i < jobs.size(); ++i) per_bank[i % banks].push_back(jobs[i]);

  std::vector<AggregateReport> reports(banks);
  std::vector<Trace> traces(banks);
  auto run_bank = [&](std::size_t b) {
    reports[b] = run_stream(per_bank[b], trace ? &traces[b] : nullptr, static_cast<std::uint32_t>(b));
  };

  workers = std::max<std::size_t>(1, std::min(workers, banks));
  if (workers == 1) {
    for (std::size_t b = 0; b < banks; ++b) run_bank(b);
  } else {
    std::vector<std::future<void>> tasks;
    for (std::size_t w = 0; w < workers; ++w) {
      tasks.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t b = w; b < banks; b += workers) run_bank(b);
      }));
    }
    for (auto& t : tasks) t.get();
  }

  AggregateReport total;
  total.config_hash = config_hash_;
  total.cycles_per_block = cycles_per_block_;
  total.blocks = jobs.size();
  total.ciphertexts.resize(jobs.size());
  for (std::size_t b = 0; b < banks; ++b) {
    total.energy_pj_total += reports[b].energy_pj_total;
    total.cycles_total = std::max(total.cycles_total, reports[b].cycles_total);
    for (std::size_t k = 0; k < reports[b].ciphertexts.size(); ++k) {
      total.ciphertexts[k * banks + b] = reports[b].ciphertexts[k];
    }
    if (trace) trace->append(traces[b]);
  }
  total.energy_per_block_pj = jobs.empty() ? 0.0 : total.energy_pj_total / static_cast<double>(jobs.size());
  return total;
}

}  // namespace aesimc
