#include <benchmark/benchmark.h>

#include "sedna/analysis.hpp"
#include "sedna/codec.hpp"
#include "sedna/planner.hpp"
#include "sedna/protocol.hpp"

using namespace sedna;

namespace {

Bytes random_message(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

void BM_RatelessEncode(benchmark::State& state) {
  const auto S = static_cast<std::uint64_t>(state.range(0));
  const auto p = codec::RatelessParams::make(S, 256, 0.05);
  const auto msg = random_message(S, 1);
  std::uint64_t j = 0;
  for (auto _ : state) benchmark::DoNotOptimize(codec::rateless_symbol(msg, j++, p));
  state.SetBytesProcessed(std::int64_t(state.iterations()) * 256);
}
BENCHMARK(BM_RatelessEncode)->Arg(4096)->Arg(65536);

void BM_RatelessDecode(benchmark::State& state) {
  const auto S = static_cast<std::uint64_t>(state.range(0));
  const auto p = codec::RatelessParams::make(S, 256, 0.05);
  const auto msg = random_message(S, 2);
  std::vector<codec::Symbol> syms;
  for (std::uint64_t j = 0; j < p.decode_threshold(); ++j) syms.push_back(codec::rateless_symbol(msg, j * 7919, p));
  for (auto _ : state) benchmark::DoNotOptimize(codec::rateless_decode(syms, p));
  state.SetBytesProcessed(std::int64_t(state.iterations()) * std::int64_t(S));
}
BENCHMARK(BM_RatelessDecode)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);

void BM_MdsEncodeDecode(benchmark::State& state) {
  const auto p = codec::MdsParams::make(28, 13, 4096);
  const auto msg = random_message(4096, 3);
  for (auto _ : state) {
    auto shares = codec::mds_encode(msg, p);
    shares.erase(shares.begin(), shares.begin() + 15);
    benchmark::DoNotOptimize(codec::mds_decode(shares, p));
  }
}
BENCHMARK(BM_MdsEncodeDecode)->Unit(benchmark::kMicrosecond);

void BM_HypergeomTail(benchmark::State& state) {
  const auto n = static_cast<std::uint64_t>(state.range(0));
  const analysis::HypergeomSpec h{n, n - n / 8, n / 4};
  for (auto _ : state) benchmark::DoNotOptimize(analysis::hypergeom_tail_lt(h, n / 5));
}
BENCHMARK(BM_HypergeomTail)->Arg(256)->Arg(8192);

void BM_PlanRateless(benchmark::State& state) {
  planner::PlanInputs in;
  in.S = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(planner::plan_rateless(in));
}
BENCHMARK(BM_PlanRateless)->Arg(4096)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

void BM_PlanMds(benchmark::State& state) {
  planner::PlanInputs in;
  in.S = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(planner::plan_mds(in));
}
BENCHMARK(BM_PlanMds)->Arg(4096)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
