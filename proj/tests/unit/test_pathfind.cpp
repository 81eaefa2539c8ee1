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


#include "oracles.hpp"

#include <holonomy/pathfind.hpp>

#include <doctest.h>

#include <random>

using namespace holonomy;

namespace {

TileAddress A(const char* text) { return TileAddress::parse(text); }

} // namespace

TEST_SUITE("pathfind")
{
  TEST_CASE("heuristic")
  {
    const WalkerState s = initial_state();
    CHECK(heuristic(s, s.tile) == 0);
    CHECK(heuristic(s, A("E")) == 1);

    std::mt19937_64 rng(21);
    for (int i = 0; i < 100; ++i)
    {
      const WalkerState start = oracle::random_state(rng, 2);
      const TileAddress goal = oracle::random_tile(rng, start.tile, 3);
      const auto exact = oracle::ucs_cost(start, goal);
      REQUIRE(exact.has_value());
      CHECK(heuristic(start, goal) <= *exact);
    }
  }

  TEST_CASE("trivial paths")
  {
    const WalkerState s = initial_state();
    const Path here = astar(s, s.tile);
    CHECK(here.moves.empty());
    CHECK(here.forward_steps == 0);
    CHECK(here.complete);

    const Path one = astar(s, A("N"));
    CHECK(one.to_string() == "F");
    CHECK(one.forward_steps == 1);
  }

  TEST_CASE("goal behind the hedge needs a holonomy loop")
  {
    const WalkerState s = initial_state();
    CHECK(tile_distance(s.tile, A("Nf")) == 2);
    const Path p = astar(s, A("Nf"));
    // Frozen from uniform-cost search over the full state graph.
    CHECK(p.forward_steps == 5);
    CHECK(oracle::ucs_cost(s, A("Nf")) == 5);
    CHECK(oracle::replay_cost(s, p.moves, A("Nf")) == 5);
  }

  TEST_CASE("astar matches uniform-cost search")
  {
    std::mt19937_64 rng(8);
    for (int i = 0; i < 60; ++i)
    {
      const WalkerState start = oracle::random_state(rng, 3);
      const TileAddress goal = oracle::random_tile(rng, start.tile, 4);
      const Path p = astar(start, goal);
      CHECK(oracle::replay_cost(start, p.moves, goal) == oracle::ucs_cost(start, goal));

      SearchOptions sym;
      sym.use_symmetry = true;
      CHECK(astar(start, goal, sym).forward_steps == p.forward_steps);
    }
  }

  TEST_CASE("turn costs are honoured")
  {
    SearchOptions opt;
    opt.cost = CostModel{1, 1};
    const WalkerState s = initial_state();
    const Path p = astar(s, A("E"), opt);
    CHECK(p.cost(opt.cost) == 2);
    CHECK(p.forward_steps == 1);
  }

  TEST_CASE("anytime search")
  {
    const WalkerState s = initial_state();
    const TileAddress goal = A("Sfrf");
    const Path exact = astar(s, goal);

    const Path generous = astar_anytime(s, goal, SearchBudget{1000000});
    CHECK(generous.moves == exact.moves);
    CHECK(generous.complete);

    const Path tiny = astar_anytime(s, goal, SearchBudget{1});
    CHECK_FALSE(tiny.complete);
    CHECK(heuristic(apply_moves(s, tiny.moves), goal) <= heuristic(s, goal));

    CHECK_THROWS_AS(astar_anytime(s, goal, SearchBudget{0}), std::invalid_argument);

    const Path partial = astar_anytime(s, goal, SearchBudget{40});
    CHECK(oracle::is_prefix_of_optimal(s, partial.moves, goal));
  }

  TEST_CASE("hot-cold field")
  {
    const TileAddress o = TileAddress::origin();
    const std::vector<TileAddress> objectives{A("Nr"), A("Wff")};
    const auto field = hotcold_field(o, 3, objectives);
    CHECK(field.size() == tiles_within(o, 3).size());
    CHECK(field.at(A("Nr")) == 0);
    CHECK(field.at(A("N")) == 1);
    for (const auto& [t, d] : field)
      CHECK(d == std::min(tile_distance(t, objectives[0]), tile_distance(t, objectives[1])));

    // Objectives far outside the window.
    const auto far = hotcold_field(o, 2, {A("Efrflfr")});
    for (const auto& [t, d] : far)
      CHECK(d == tile_distance(t, A("Efrflfr")));

    CHECK_THROWS_AS(hotcold_field(o, 2, {}), std::invalid_argument);
  }

  TEST_CASE("tours")
  {
    const WalkerState s = initial_state();
    const Tour single = plan_tour(s, {A("Sr")});
    CHECK(single.path.forward_steps == astar(s, A("Sr")).forward_steps);

    // Either order, each leg solved on its own, is a feasible tour.
    const Tour two = plan_tour(s, {A("Nr"), A("Wl")});
    const auto chained = [&](const char* first, const char* second)
      {
        const Path a = astar(s, A(first));
        return a.forward_steps + astar(apply_moves(s, a.moves), A(second)).forward_steps;
      };
    CHECK(two.path.forward_steps <= chained("Nr", "Wl"));
    CHECK(two.path.forward_steps <= chained("Wl", "Nr"));
    CHECK(two.path.forward_steps >= std::max(astar(s, A("Nr")).forward_steps, astar(s, A("Wl")).forward_steps));
    CHECK(two.legs.size() == 2);

    const std::vector<TileAddress> three{A("Nr"), A("Ef"), A("Sl")};
    const Tour t = plan_tour(s, three, A("Ef"));
    CHECK(t.legs.back().objective == A("Ef"));
    CHECK(t.path.forward_steps == oracle::brute_tour_cost(s, three, A("Ef")));

    // Legs concatenate to the path and end on their objectives.
    std::vector<Move> joined;
    WalkerState w = s;
    for (const auto& leg : t.legs)
    {
      joined.insert(joined.end(), leg.moves.begin(), leg.moves.end());
      w = apply_moves(w, leg.moves);
      CHECK(w.tile == leg.objective);
    }
    CHECK(joined == t.path.moves);

    CHECK_THROWS_AS(plan_tour(s, three, A("Wf")), std::invalid_argument);
    std::vector<TileAddress> seven;
    for (const auto& x : tiles_within(TileAddress::origin(), 1))
      seven.push_back(x);
    seven.push_back(A("Nr"));
    seven.push_back(A("Nl"));
    CHECK_THROWS_AS(plan_tour(s, seven), std::invalid_argument);
  }

  TEST_CASE("tour cost matches the brute-force oracle")
  {
    std::mt19937_64 rng(13);
    for (int i = 0; i < 8; ++i)
    {
      const WalkerState start = oracle::random_state(rng, 1);
      std::vector<TileAddress> objs;
      const std::size_t n = 1 + rng() % 3;
      for (std::size_t j = 0; j < n; ++j)
        objs.push_back(oracle::random_tile(rng, TileAddress::origin(), 3));
      const Tour t = plan_tour(start, objs);
      CHECK(t.path.forward_steps == oracle::brute_tour_cost(start, objs));
    }
  }

  TEST_CASE("optimal substructure fails")
  {
    std::mt19937_64 rng(1);
    const auto w = oracle::find_substructure_violation(rng, 400);
    REQUIRE(w.has_value());
    CHECK(w->prefix_cost > w->via_cost);
    CHECK(oracle::replay_cost(w->start, w->moves, w->goal) == oracle::ucs_cost(w->start, w->goal));
  }
}
