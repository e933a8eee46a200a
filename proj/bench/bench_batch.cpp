// Copyright 2026 The awdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Serial and OpenMP runs of the same scenario batch.

#include <benchmark/benchmark.h>

#include "awdl/sim.hpp"

namespace {

std::vector<awdl::sim::Scenario> batch(std::size_t n) {
    std::vector<awdl::sim::Scenario> out;
    for (std::size_t i = 0; i < n; ++i) {
        awdl::sim::Scenario sc;
        sc.seed = i;
        sc.duration_us = 60'000'000;
        sc.record_events = false;
        for (int k = 0; k < 6; ++k) {
            awdl::sim::NodeSpec spec;
            spec.name = "n" + std::to_string(k);
            spec.config.address = awdl::MacAddress{{0x02, 0, 0, 0, static_cast<std::uint8_t>(i), static_cast<std::uint8_t>(k)}};
            spec.config.version = k % 2 ? awdl::election::Version::v2 : awdl::election::Version::v3;
            spec.clock.drift_ppm = 10.0 * (k - 3);
            spec.clock.jitter_sigma_us = 500;
            sc.nodes.push_back(spec);
            awdl::sim::ScriptAction join;
            join.time_us = 100'000 * k;
            join.node = spec.name;
            sc.script.push_back(join);
        }
        out.push_back(std::move(sc));
    }
    return out;
}

void runBatch(benchmark::State& state, bool parallel) {
    const auto scenarios = batch(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto results = awdl::sim::runBatch(scenarios, parallel);
        benchmark::DoNotOptimize(results);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_BatchSerial(benchmark::State& state) { runBatch(state, false); }
void BM_BatchParallel(benchmark::State& state) { runBatch(state, true); }

}  // namespace

BENCHMARK(BM_BatchSerial)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchParallel)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
