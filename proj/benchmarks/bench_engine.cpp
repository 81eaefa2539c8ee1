/*
 * Copyright (C) 2026 The Holonomy Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 *
*/


#include <holonomy/service.hpp>

#include <benchmark/benchmark.h>

using namespace holonomy;

namespace {

void BM_TileDistance(benchmark::State& state)
{
  const auto a = TileAddress::parse("Nrfrf");
  const auto b = TileAddress::parse("Slflf");
  for (auto _ : state)
  {
    clear_distance_cache();
    benchmark::DoNotOptimize(tile_distance(a, b));
  }
}
BENCHMARK(BM_TileDistance);

void BM_Normalize(benchmark::State& state)
{
  const std::vector<Step> steps{Step::L, Step::F, Step::L, Step::R, Step::F, Step::R, Step::R, Step::L};
  for (auto _ : state)
    benchmark::DoNotOptimize(normalize(Branch::N, steps));
}
BENCHMARK(BM_Normalize);

void BM_AStar(benchmark::State& state)
{
  const WalkerState start = initial_state();
  const auto goal = TileAddress::parse("Efff");
  for (auto _ : state)
    benchmark::DoNotOptimize(astar(start, goal));
}
BENCHMARK(BM_AStar)->Unit(benchmark::kMillisecond);

void BM_Anytime(benchmark::State& state)
{
  const WalkerState start = initial_state();
  const auto goal = TileAddress::parse("Nfrflff");
  for (auto _ : state)
    benchmark::DoNotOptimize(astar_anytime(start, goal, SearchBudget{static_cast<std::size_t>(state.range(0))}));
}
BENCHMARK(BM_Anytime)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_PlanTour(benchmark::State& state)
{
  const WalkerState start = initial_state();
  const std::vector<TileAddress> objs{
    TileAddress::parse("Nff"), TileAddress::parse("Erf"), TileAddress::parse("Slf")};
  for (auto _ : state)
    benchmark::DoNotOptimize(plan_tour(start, objs, objs.back()));
}
BENCHMARK(BM_PlanTour)->Unit(benchmark::kMillisecond);

void BM_Generate(benchmark::State& state)
{
  const Catalog c = Catalog::forest();
  const auto region = tiles_within(TileAddress::origin(), static_cast<std::size_t>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(generate(region, c, ++seed));
  state.counters["tiles"] = static_cast<double>(region.size());
}
BENCHMARK(BM_Generate)->Arg(3)->Arg(4)->Arg(5)->Unit(benchmark::kMillisecond);

void BM_Minimap(benchmark::State& state)
{
  const Catalog c = Catalog::forest();
  SessionConfig config;
  config.seed = 7;
  Session s = new_session(config, c);
  for (auto _ : state)
    benchmark::DoNotOptimize(minimap_svg(minimap(s, c)));
}
BENCHMARK(BM_Minimap)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
