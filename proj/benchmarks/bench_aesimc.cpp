#include <benchmark/benchmark.h>

#include <random>

#include "aesimc/gf_aes_ref.hpp"
#include "aesimc/pipeline.hpp"

namespace {

using namespace aesimc;

std::vector<BlockJob> jobs(std::size_t n) {
  std::mt19937_64 rng(1);
  std::vector<BlockJob> out(n);
  for (auto& j : out) {
    for (auto& b : j.plaintext) b = static_cast<std::uint8_t>(rng());
    for (auto& b : j.key) b = static_cast<std::uint8_t>(rng());
  }
  return out;
}

void BM_SboxComputed(benchmark::State& state) {
  std::uint8_t x = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gf::sbox_computed(x));
    ++x;
  }
}
BENCHMARK(BM_SboxComputed);

void BM_GfMul(benchmark::State& state) {
  std::uint8_t a = 0x57, b = 0x13;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gf::mul(a, b));
    ++a;
    b += 3;
  }
}
BENCHMARK(BM_GfMul);

void BM_ReferenceEncrypt(benchmark::State& state) {
  const auto j = jobs(1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(encrypt_block(j.plaintext, j.key));
  state.SetBytesProcessed(state.iterations() * 16);
}
BENCHMARK(BM_ReferenceEncrypt);

void BM_RunBlock(benchmark::State& state) {
  const PipelineEngine engine{EngineConfig{}};
  const auto j = jobs(1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(engine.run_block(j.plaintext, j.key));
  state.SetBytesProcessed(state.iterations() * 16);
}
BENCHMARK(BM_RunBlock);

void BM_RunBlockTraced(benchmark::State& state) {
  const PipelineEngine engine{EngineConfig{}};
  const auto j = jobs(1)[0];
  for (auto _ : state) {
    Trace trace;
    benchmark::DoNotOptimize(engine.run_block(j.plaintext, j.key, &trace));
  }
}
BENCHMARK(BM_RunBlockTraced);

void BM_RunBanked(benchmark::State& state) {
  EngineConfig cfg;
  cfg.banks = static_cast<std::size_t>(state.range(0));
  const PipelineEngine engine(cfg);
  const auto work = jobs(256);
  for (auto _ : state) benchmark::DoNotOptimize(engine.run_banked(work, nullptr, cfg.banks));
  state.SetBytesProcessed(state.iterations() * 256 * 16);
}
BENCHMARK(BM_RunBanked)->Arg(1)->Arg(4)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
