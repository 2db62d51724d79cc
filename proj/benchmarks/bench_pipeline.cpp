#include <benchmark/benchmark.h>

#include "pqs/estimator.hpp"
#include "pqs/model.hpp"
#include "pqs/relaxation.hpp"
#include "pqs/simulate.hpp"

namespace {

pqs::SimConfig decay_config() {
    pqs::SimConfig config;
    config.initial_state = pqs::InitialState::coherent(12.0);
    config.n_samples_total = 7000;
    config.seed = 7;
    return config;
}

const pqs::DetectionRecord& cached_record() {
    static const pqs::DetectionRecord record = pqs::simulate_record(decay_config());
    return record;
}

}  // namespace

static void BM_relaxation_step(benchmark::State& state) {
    const auto params = pqs::ModelParams::defaults();
    const pqs::RelaxationStep step(params);
    auto dist = pqs::thermal_distribution(params);
    for (auto _ : state) {
        step.apply(dist, true);
        benchmark::DoNotOptimize(dist.data());
    }
}
BENCHMARK(BM_relaxation_step);

static void BM_measurement_update(benchmark::State& state) {
    const auto params = pqs::ModelParams::defaults();
    const auto dist = pqs::uniform_distribution(params.n_max);
    pqs::Sample sample;
    sample.detections.push_back({pqs::Outcome::g, 0});
    for (auto _ : state) {
        auto out = pqs::measurement_update(params, sample, dist);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_measurement_update);

static void BM_simulate_record(benchmark::State& state) {
    const auto config = decay_config();
    for (auto _ : state) {
        auto record = pqs::simulate_record(config);
        benchmark::DoNotOptimize(record.samples.data());
    }
}
BENCHMARK(BM_simulate_record);

static void BM_forward_filter(benchmark::State& state) {
    const auto& record = cached_record();
    const auto& params = record.model_snapshot;
    const auto prior = pqs::uniform_distribution(params.n_max);
    for (auto _ : state) {
        auto result = pqs::forward_filter(params, record.samples, prior);
        benchmark::DoNotOptimize(result.dists.data());
    }
}
BENCHMARK(BM_forward_filter);

static void BM_smooth(benchmark::State& state) {
    const auto& record = cached_record();
    for (auto _ : state) {
        auto traj = pqs::smooth(record.model_snapshot, record.samples);
        benchmark::DoNotOptimize(traj.pqs.data());
    }
}
BENCHMARK(BM_smooth);

BENCHMARK_MAIN();
