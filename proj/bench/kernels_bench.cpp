// Serial reference vs OpenMP kernels.

#include <random>

#include <benchmark/benchmark.h>

#include "relact/dataset.hpp"
#include "relact/replay.hpp"

namespace {

using namespace relact;

DemonstrationRecord make_record(std::size_t steps) {
  ExperimentParams params;
  params.num_points = steps;
  const KinematicChain chain = default_chain();
  const RobotConfiguration config = make_configuration(chain, 1);
  return to_demonstration(record_reference(chain, config, lemniscate_commands(params), params.dt),
                          "bench");
}

const DemonstrationRecord& record() {
  static const DemonstrationRecord r = make_record(2000);
  return r;
}

void BM_ExportChunksSerial(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::export_chunks(record(), RepresentationKind::ToolCentric));
  }
}
BENCHMARK(BM_ExportChunksSerial)->Unit(benchmark::kMillisecond);

void BM_ExportChunksParallel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(export_chunks(record(), RepresentationKind::ToolCentric));
  }
}
BENCHMARK(BM_ExportChunksParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

const ChunkSet& chunks() {
  static const ChunkSet c = export_chunks(record(), RepresentationKind::HybridRelative);
  return c;
}

void BM_StatsSerial(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(serial::compute_stats(chunks()));
}
BENCHMARK(BM_StatsSerial)->Unit(benchmark::kMillisecond);

void BM_StatsParallel(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(compute_stats(chunks()));
}
BENCHMARK(BM_StatsParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

struct Experiment {
  KinematicChain chain = default_chain();
  std::vector<LabeledConfiguration> configs = standard_configurations(chain, 0, 0.1);
  ReferenceTrajectory ref =
      record_reference(chain, configs[0].config, lemniscate_commands(ExperimentParams{}), 0.01);
};

const Experiment& experiment() {
  static const Experiment e;
  return e;
}

void BM_ExperimentSerial(benchmark::State& state) {
  const Experiment& e = experiment();
  for (auto _ : state) {
    benchmark::DoNotOptimize(serial::run_experiment(e.chain, e.ref, e.configs, kAllKinds));
  }
}
BENCHMARK(BM_ExperimentSerial)->Unit(benchmark::kMillisecond);

void BM_ExperimentParallel(benchmark::State& state) {
  const Experiment& e = experiment();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_experiment(e.chain, e.ref, e.configs, kAllKinds));
  }
}
BENCHMARK(BM_ExperimentParallel)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
