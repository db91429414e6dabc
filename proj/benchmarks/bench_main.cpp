#include <benchmark/benchmark.h>

#include "wimwc/dbbound.hpp"
#include "wimwc/fracpart.hpp"
#include "wimwc/keybound.hpp"
#include "wimwc/lambda_mi.hpp"
#include "wimwc/macregion.hpp"
#include "wimwc/presets.hpp"
#include "wimwc/selfcheck.hpp"

using namespace wimwc;

namespace {

Groups singles(int k) {
  Groups g;
  for (int i = 1; i <= k; ++i) g.push_back({"X" + std::to_string(i)});
  return g;
}

fracpart::FractionalPartition pair_fp() {
  fracpart::FractionalPartition fp(2);
  fp.set(1, 1.0);
  fp.set(2, 1.0);
  return fp;
}

void BM_ILambda(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  optim::Rng rng(1);
  const auto d = selfcheck::random_dist(rng, selfcheck::random_vars(rng, "X", k, 4, 4));
  const auto fp = fracpart::preset_uniform_km1(k);
  for (auto _ : state) benchmark::DoNotOptimize(i_lambda(d, singles(k), fp));
}
BENCHMARK(BM_ILambda)->DenseRange(2, 6);

void BM_OptimizeLinear(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  optim::Rng rng(2);
  std::vector<double> c(std::size_t{1} << k);
  for (auto& v : c) v = rng.uniform();
  for (auto _ : state) benchmark::DoNotOptimize(fracpart::optimize_linear(k, c, fracpart::Sense::kMin).value);
}
BENCHMARK(BM_OptimizeLinear)->DenseRange(2, 8);

void BM_SimulateCode(benchmark::State& state) {
  optim::Rng rng(3);
  const auto rc = selfcheck::random_code(rng, 3, static_cast<int>(state.range(0)), 2);
  const auto fp = fracpart::preset_uniform_km1(3);
  for (auto _ : state) {
    const auto trace = dbbound::simulate_code(rc.code, rc.channels, rc.aux);
    benchmark::DoNotOptimize(dbbound::lemma1_sides(trace, fp, dbbound::Conditioning::kT).rhs);
  }
}
BENCHMARK(BM_SimulateCode)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_VLambdaHeuristic(benchmark::State& state) {
  const auto ch = presets::bsc_channel();
  const auto aux = keybound::t_equals_z(ch);
  keybound::OptimizerConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(keybound::v_lambda(ch, aux, pair_fp(), 2, cfg).value);
}
BENCHMARK(BM_VLambdaHeuristic)->Unit(benchmark::kMillisecond);

void BM_AdderSumRate(benchmark::State& state) {
  const auto mac = presets::adder_mac();
  macregion::MacConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(macregion::outer_sum_rate(mac, cfg).value);
}
BENCHMARK(BM_AdderSumRate)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
