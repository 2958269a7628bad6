// Microbenchmarks for the hot paths: tablebase construction, the job-shop
// simulator, CD training epochs, and top-layer Gibbs sampling. Run with
// --benchmark_min_time=... to tighten the estimates; defaults keep the whole
// suite under a minute.

#include <benchmark/benchmark.h>

#include <vector>

#include "eoda/dbn.hpp"
#include "eoda/encoding.hpp"
#include "eoda/eods.hpp"
#include "eoda/oracles.hpp"
#include "eoda/rng.hpp"

namespace {

const eoda::KrkTablebase& shared_tb() {
  static eoda::KrkTablebase tb = eoda::KrkTablebase::build();
  return tb;
}

void BM_TablebaseBuild(benchmark::State& state) {
  for (auto _ : state) {
    auto tb = eoda::KrkTablebase::build();
    benchmark::DoNotOptimize(tb.size());
  }
}
BENCHMARK(BM_TablebaseBuild)->Unit(benchmark::kMillisecond);

void BM_TablebaseLookup(benchmark::State& state) {
  const auto& tb = shared_tb();
  eoda::Rng rng(7);
  auto sample = eoda::sample_uniform_krk(tb, 1024, rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tb.cost(sample[i++ & 1023]));
  }
}
BENCHMARK(BM_TablebaseLookup);

void BM_JobShopSimulate(benchmark::State& state) {
  auto inst = eoda::random_jobshop_instance(0);
  eoda::Rng rng(7);
  auto scheds = eoda::sample_uniform_jobshop(inst, 1024, rng);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eoda::simulate_jobshop(inst, scheds[i++ & 1023]));
  }
}
BENCHMARK(BM_JobShopSimulate);

void BM_JobShopUniformSample(benchmark::State& state) {
  auto inst = eoda::random_jobshop_instance(0);
  eoda::Rng rng(7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eoda::sample_uniform_jobshop(inst, 100, rng));
  }
}
BENCHMARK(BM_JobShopUniformSample)->Unit(benchmark::kMicrosecond);

// One CD-1 epoch over 1000 encoded KRK positions at the chess architecture's
// bottom layer (48 visible, 32 hidden).
void BM_CdEpoch(benchmark::State& state) {
  const auto& tb = shared_tb();
  eoda::Rng rng(7);
  auto sample = eoda::sample_uniform_krk(tb, 1000, rng);
  std::vector<eoda::BitVec> data;
  data.reserve(sample.size());
  for (const auto& p : sample) data.push_back(eoda::encode_krk(p));

  eoda::TrainConfig cfg;
  cfg.epochs = 1;
  for (auto _ : state) {
    eoda::Rng r(11);
    auto rbm = eoda::Rbm::init(48, 32, 0.01f, r);
    benchmark::DoNotOptimize(eoda::rbm_train_cd(std::move(rbm), data, cfg, r));
  }
}
BENCHMARK(BM_CdEpoch)->Unit(benchmark::kMillisecond);

// Separator-clamped generation of 100 raw samples through the chess stack.
void BM_DbnSample(benchmark::State& state) {
  eoda::Rng rng(7);
  auto m = eoda::DbnModel::create({48, 32, 24}, 4, 0.01f, rng);
  eoda::TrainConfig cfg;
  eoda::ClampSet clamps{{m.separator_index(), 1}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(eoda::dbn_sample(m, clamps, 100, cfg, rng));
  }
}
BENCHMARK(BM_DbnSample)->Unit(benchmark::kMicrosecond);

void BM_ChessEncodeDecode(benchmark::State& state) {
  const auto& tb = shared_tb();
  eoda::Rng rng(7);
  auto sample = eoda::sample_uniform_krk(tb, 1024, rng);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& p = sample[i++ & 1023];
    auto bits = eoda::encode_krk(p);
    std::vector<float> probs(bits.size(), 0.5f);
    benchmark::DoNotOptimize(eoda::repair_krk(bits, probs, rng));
  }
}
BENCHMARK(BM_ChessEncodeDecode);

}  // namespace

BENCHMARK_MAIN();
