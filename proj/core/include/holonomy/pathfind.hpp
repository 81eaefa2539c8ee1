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


#ifndef HOLONOMY__PATHFIND_HPP
#define HOLONOMY__PATHFIND_HPP

#include <holonomy/walker.hpp>

#include <map>
#include <optional>
#include <vector>

namespace holonomy {

//==============================================================================
struct CostModel
{
  std::size_t step_cost = 1;
  std::size_t turn_cost = 0;
};

struct SearchBudget
{
  std::size_t max_expansions = 100000;
};

struct SearchOptions
{
  CostModel cost;
  /// Merge states that differ by a room rotation. Costs are unaffected.
  bool use_symmetry = false;
};

struct SearchStats
{
  std::size_t expanded = 0;
  std::size_t generated = 0;
};

struct Path
{
  std::vector<Move> moves;
  std::size_t forward_steps = 0;
  /// True iff the path ends on the goal (every objective, for tours).
  bool complete = false;

  std::size_t cost(const CostModel& model = {}) const;
  std::string to_string() const { return moves_to_string(moves); }
};

//==============================================================================
/// Graph distance from s.tile to goal. Admissible and consistent for any
/// CostModel once multiplied by its step cost.
std::size_t heuristic(const WalkerState& s, const TileAddress& goal);

/// Optimal path from `start` to any state on `goal`.
Path astar(
  const WalkerState& start,
  const TileAddress& goal,
  const SearchOptions& options = {},
  SearchStats* stats = nullptr);

/// A* stopped after `budget.max_expansions` expansions. If the goal was not
/// reached, returns the path to the expanded state with the smallest
/// heuristic (ties to lower cost), with complete = false.
Path astar_anytime(
  const WalkerState& start,
  const TileAddress& goal,
  const SearchBudget& budget,
  const SearchOptions& options = {},
  SearchStats* stats = nullptr);

/// Distance from every tile within `radius` of `center` to the nearest
/// objective. Throws std::invalid_argument on an empty objective set.
std::map<TileAddress, std::size_t> hotcold_field(
  const TileAddress& center,
  std::size_t radius,
  const std::vector<TileAddress>& objectives);

//==============================================================================
inline constexpr std::size_t max_tour_objectives = 6;

struct TourLeg
{
  TileAddress objective;
  std::vector<Move> moves;
  std::size_t forward_steps = 0;
};

struct Tour
{
  Path path;
  std::vector<TourLeg> legs;
};

/// Shortest walk visiting every objective tile, with `final` (if given)
/// counted only once all others are visited. Exact search over
/// (walker state, visited set). Throws std::invalid_argument for more than
/// max_tour_objectives objectives, or a final tile that is not an objective.
Tour plan_tour(
  const WalkerState& start,
  const std::vector<TileAddress>& objectives,
  const std::optional<TileAddress>& final = std::nullopt,
  const SearchOptions& options = {},
  SearchStats* stats = nullptr);

} // namespace holonomy

#endif // HOLONOMY__PATHFIND_HPP
