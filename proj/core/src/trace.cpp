#include "aesimc/trace.hpp"

#include <algorithm>
#include <bit>
#include <nlohmann/json.hpp>
#include <string>

#include "aesimc/errors.hpp"

namespace aesimc {

void Trace::append(const Trace& other) {
  events_.insert(events_.end(), other.events_.begin(), other.events_.end());
}

double Trace::total_energy_pj() const {
  double total = 0.0;
  for (const auto& e : events_) total += e.energy_pj;
  return total;
}

void Trace::write_jsonl(std::ostream& out) const {
  for (const auto& e : events_) {
    nlohmann::ordered_json j;
    j["cycle"] = e.cycle;
    j["bank"] = e.bank;
    j["lane"] = e.lane;
    j["op"] = std::string(op_name(e.op));
    if (e.row >= 0) {
      j["row"] = e.row;
    } else {
      j["row"] = nullptr;
    }
    j["col_mask"] = e.col_mask;
    j["energy_pJ"] = e.energy_pj;
    out << j.dump() << '\n';
  }
}

std::uint64_t trace_critical_path(std::span<const MicroOpEvent> events, const CostTable& costs,
                                  std::uint32_t cross_lane_cycles_per_byte) {
  std::uint64_t end = 0;
  for (const auto& e : events) {
    std::uint64_t latency = costs[e.op].cycles;
    if (e.cross_lane) {
      latency += std::uint64_t{cross_lane_cycles_per_byte} * (std::popcount(e.col_mask) / 2);
    }
    end = std::max(end, e.cycle + latency);
  }
  return end;
}

Timeline::Timeline(const CostTable& costs, std::uint32_t bank, std::uint64_t origin, Trace* sink)
    : costs_(costs), bank_(bank), origin_(origin), sink_(sink), stage_start_(origin) {
  clocks_.fill(origin);
}

void Timeline::record(std::uint32_t lane, const OpRecord& record, std::uint32_t extra_latency) {
  const CostEntry& cost = costs_[record.kind];
  const std::uint32_t latency = cost.cycles + extra_latency;
  MicroOpEvent ev;
  ev.cycle = clocks_.at(lane);
  ev.bank = bank_;
  ev.lane = lane;
  ev.op = record.kind;
  ev.row = record.row;
  ev.col_mask = record.col_mask;
  ev.latency = latency;
  ev.energy_pj = cost.energy_pj;
  ev.cross_lane = record.cross_lane;
  clocks_[lane] += latency;
  energy_pj_ += cost.energy_pj;
  ++counts_[static_cast<std::size_t>(record.kind)];
  if (sink_) sink_->add(ev);
}

void Timeline::sync() {
  const std::uint64_t t = now();
  clocks_.fill(t);
}

void Timeline::begin_stage() {
  sync();
  stage_start_ = now();
}

std::uint64_t Timeline::end_stage(std::optional<std::uint32_t> budget, std::string_view name) {
  const std::uint64_t used = now() - stage_start_;
  std::uint64_t length = used;
  if (budget) {
    if (used > *budget) {
      throw ConfigError("stage '" + std::string(name) + "' needs " + std::to_string(used) +
                        " cycles but its budget is " + std::to_string(*budget));
    }
    length = *budget;
  }
  clocks_.fill(stage_start_ + length);
  stage_start_ += length;
  return length;
}

std::uint64_t Timeline::now() const { return *std::max_element(clocks_.begin(), clocks_.end()); }

}  // namespace aesimc
