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


#include <holonomy/pathfind.hpp>

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace holonomy {

std::size_t Path::cost(const CostModel& model) const
{
  return forward_steps * model.step_cost
    + (moves.size() - forward_steps) * model.turn_cost;
}

std::size_t heuristic(const WalkerState& s, const TileAddress& goal)
{
  return tile_distance(s.tile, goal);
}

namespace {

constexpr Move all_moves[] = {Move::TurnLeft, Move::TurnRight, Move::StepForward};

// Per-search cache of exact distances to one target tile. A breadth-first
// field grown from the target would cover exponentially many tiles before
// reaching a distant walker; pairwise queries stay local.
class TargetDistance
{
public:
  explicit TargetDistance(TileAddress target) : _target(std::move(target)) {}

  std::size_t operator()(const TileAddress& tile)
  {
    const auto it = _cache.find(tile);
    if (it != _cache.end())
      return it->second;
    const std::size_t d = tile_distance(tile, _target);
    _cache.emplace(tile, d);
    return d;
  }

private:
  TileAddress _target;
  std::unordered_map<TileAddress, std::size_t, TileAddressHash> _cache;
};

WalkerState canonical(const WalkerState& s, bool use_symmetry)
{
  return use_symmetry ? rotate_room(s, -static_cast<int>(s.heading)) : s;
}

std::size_t move_cost(Move m, const CostModel& model)
{
  return m == Move::StepForward ? model.step_cost : model.turn_cost;
}

//==============================================================================
// Best-first search over lazily generated nodes. `Problem` provides
//   Key start(), bool is_goal(const Key&), std::size_t h(const Key&),
//   std::optional<Key> successor(const Key&, Move), std::string serial(const Key&).
template<typename Problem, typename Key, typename Hash>
class BestFirst
{
public:
  struct Result
  {
    std::vector<Move> moves;
    bool reached = false;
  };

  BestFirst(Problem& problem, const CostModel& model)
  : _problem(problem), _model(model)
  {
  }

  Result run(std::optional<std::size_t> budget, SearchStats* stats)
  {
    push(_problem.start(), 0, -1, Move::TurnLeft);

    std::optional<std::size_t> best;
    std::size_t expanded = 0;
    while (!_open.empty())
    {
      if (budget && expanded >= *budget)
        break;

      const Entry top = _open.top();
      _open.pop();
      Node& node = _nodes[top.id];
      if (node.closed || node.g != top.g)
        continue;
      node.closed = true;
      ++expanded;

      if (!best || node.h < _nodes[*best].h
        || (node.h == _nodes[*best].h && node.g < _nodes[*best].g))
      {
        best = top.id;
      }

      if (_problem.is_goal(node.key))
      {
        finish(stats, expanded);
        return {trace(top.id), true};
      }

      const Key key = node.key;
      const std::size_t g = node.g;
      for (const Move m : all_moves)
      {
        auto next = _problem.successor(key, m);
        if (!next)
          continue;
        ++_generated;
        push(std::move(*next), g + move_cost(m, _model), static_cast<long>(top.id), m);
      }
    }

    finish(stats, expanded);
    if (!best)
      return {};
    return {trace(*best), false};
  }

private:
  struct Node
  {
    Key key;
    std::size_t g;
    std::size_t h;
    long parent;
    Move move;
    bool closed = false;
  };

  struct Entry
  {
    std::size_t f;
    std::size_t g;
    std::string serial;
    std::size_t id;

    // std::priority_queue pops the largest, so "less" means "worse".
    bool operator<(const Entry& other) const
    {
      if (f != other.f)
        return f > other.f;
      if (g != other.g)
        return g < other.g;
      return serial > other.serial;
    }
  };

  void push(Key key, std::size_t g, long parent, Move move)
  {
    const auto it = _index.find(key);
    std::size_t id;
    if (it == _index.end())
    {
      id = _nodes.size();
      const std::size_t h = _problem.h(key);
      _index.emplace(key, id);
      _nodes.push_back(Node{std::move(key), g, h, parent, move});
    }
    else
    {
      id = it->second;
      Node& node = _nodes[id];
      if (node.closed || node.g <= g)
        return;
      node.g = g;
      node.parent = parent;
      node.move = move;
    }

    const Node& node = _nodes[id];
    _open.push(Entry{g + node.h, g, _problem.serial(node.key), id});
  }

  std::vector<Move> trace(std::size_t id) const
  {
    std::vector<Move> out;
    for (long at = static_cast<long>(id); _nodes[static_cast<std::size_t>(at)].parent >= 0;
      at = _nodes[static_cast<std::size_t>(at)].parent)
    {
      out.push_back(_nodes[static_cast<std::size_t>(at)].move);
    }
    std::reverse(out.begin(), out.end());
    return out;
  }

  void finish(SearchStats* stats, std::size_t expanded) const
  {
    if (stats)
    {
      stats->expanded = expanded;
      stats->generated = _generated;
    }
  }

  Problem& _problem;
  CostModel _model;
  std::vector<Node> _nodes;
  std::unordered_map<Key, std::size_t, Hash> _index;
  std::priority_queue<Entry> _open;
  std::size_t _generated = 0;
};

//==============================================================================
class GoalProblem
{
public:
  GoalProblem(const WalkerState& start, const TileAddress& goal, const SearchOptions& options)
  : _start(canonical(start, options.use_symmetry)),
    _goal(goal),
    _field(goal),
    _options(options)
  {
  }

  WalkerState start() const { return _start; }
  bool is_goal(const WalkerState& s) const { return s.tile == _goal; }
  std::size_t h(const WalkerState& s) { return _field(s.tile) * _options.cost.step_cost; }
  std::string serial(const WalkerState& s) const { return s.to_string(); }

  std::optional<WalkerState> successor(const WalkerState& s, Move m) const
  {
    if (!is_legal(s, m))
      return std::nullopt;
    return canonical(apply_move(s, m), _options.use_symmetry);
  }

private:
  WalkerState _start;
  TileAddress _goal;
  TargetDistance _field;
  SearchOptions _options;
};

Path make_path(std::vector<Move> moves, bool complete)
{
  Path p;
  p.forward_steps = static_cast<std::size_t>(
    std::count(moves.begin(), moves.end(), Move::StepForward));
  p.moves = std::move(moves);
  p.complete = complete;
  return p;
}

Path run_goal_search(
  const WalkerState& start,
  const TileAddress& goal,
  std::optional<std::size_t> budget,
  const SearchOptions& options,
  SearchStats* stats)
{
  GoalProblem problem(start, goal, options);
  BestFirst<GoalProblem, WalkerState, WalkerStateHash> search(problem, options.cost);
  auto result = search.run(budget, stats);
  return make_path(std::move(result.moves), result.reached);
}

} // namespace

Path astar(
  const WalkerState& start,
  const TileAddress& goal,
  const SearchOptions& options,
  SearchStats* stats)
{
  return run_goal_search(start, goal, std::nullopt, options, stats);
}

Path astar_anytime(
  const WalkerState& start,
  const TileAddress& goal,
  const SearchBudget& budget,
  const SearchOptions& options,
  SearchStats* stats)
{
  if (budget.max_expansions == 0)
    throw std::invalid_argument("the search budget must be positive");
  return run_goal_search(start, goal, budget.max_expansions, options, stats);
}

std::map<TileAddress, std::size_t> hotcold_field(
  const TileAddress& center,
  std::size_t radius,
  const std::vector<TileAddress>& objectives)
{
  if (objectives.empty())
    throw std::invalid_argument("hot-cold field needs at least one objective");

  // Multi-source BFS when the objectives lie near the window; otherwise the
  // field would have to grow far beyond it, and pairwise queries are cheaper.
  std::size_t reach = 0;
  for (const auto& o : objectives)
    reach = std::max(reach, tile_distance(center, o));

  std::map<TileAddress, std::size_t> out;
  if (reach <= radius + 2)
  {
    DistanceField field(objectives);
    for (const auto& tile : tiles_within(center, radius))
      out.emplace(tile, field.distance(tile));
    return out;
  }

  for (const auto& tile : tiles_within(center, radius))
  {
    std::size_t best = tile_distance(tile, objectives.front());
    for (std::size_t i = 1; i < objectives.size(); ++i)
      best = std::min(best, tile_distance(tile, objectives[i]));
    out.emplace(tile, best);
  }
  return out;
}

//==============================================================================
namespace {

struct TourKey
{
  WalkerState state;
  std::uint32_t visited = 0;

  bool operator==(const TourKey&) const = default;
};

struct TourKeyHash
{
  std::size_t operator()(const TourKey& k) const
  {
    return WalkerStateHash{}(k.state) * 31u + k.visited;
  }
};

class TourProblem
{
public:
  TourProblem(
    const WalkerState& start,
    std::vector<TileAddress> objectives,
    std::optional<std::size_t> final_index,
    const SearchOptions& options)
  : _objectives(std::move(objectives)),
    _final(final_index),
    _options(options)
  {
    _full = (1u << _objectives.size()) - 1u;
    for (const auto& o : _objectives)
      _fields.emplace_back(o);

    _pair.assign(_objectives.size(), std::vector<std::size_t>(_objectives.size(), 0));
    for (std::size_t i = 0; i < _objectives.size(); ++i)
      for (std::size_t j = 0; j < _objectives.size(); ++j)
        _pair[i][j] = tile_distance(_objectives[i], _objectives[j]);

    const WalkerState s = canonical(start, options.use_symmetry);
    _start = TourKey{s, mark(s.tile, 0)};
  }

  TourKey start() const { return _start; }
  bool is_goal(const TourKey& k) const { return k.visited == _full; }

  std::size_t h(const TourKey& k)
  {
    const std::size_t n = _objectives.size();
    std::vector<std::size_t> d(n, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
      if (!(k.visited & (1u << i)))
        d[i] = _fields[i](k.state.tile);
    }

    // Any remaining objective, and any remaining pair, must still be covered.
    std::size_t best = 0;
    for (std::size_t i = 0; i < n; ++i)
    {
      if (k.visited & (1u << i))
        continue;
      best = std::max(best, d[i]);
      for (std::size_t j = i + 1; j < n; ++j)
      {
        if (k.visited & (1u << j))
          continue;
        std::size_t pair;
        if (_final && *_final == j)
          pair = d[i] + _pair[i][j];
        else if (_final && *_final == i)
          pair = d[j] + _pair[j][i];
        else
          pair = _pair[i][j] + std::min(d[i], d[j]);
        best = std::max(best, pair);
      }
    }
    return best * _options.cost.step_cost;
  }

  std::string serial(const TourKey& k) const
  {
    return k.state.to_string() + "#" + std::to_string(k.visited);
  }

  std::optional<TourKey> successor(const TourKey& k, Move m) const
  {
    if (!is_legal(k.state, m))
      return std::nullopt;
    WalkerState next = canonical(apply_move(k.state, m), _options.use_symmetry);
    const std::uint32_t visited =
      m == Move::StepForward ? mark(next.tile, k.visited) : k.visited;
    return TourKey{std::move(next), visited};
  }

  std::uint32_t mark(const TileAddress& tile, std::uint32_t visited) const
  {
    for (std::size_t i = 0; i < _objectives.size(); ++i)
    {
      if (_objectives[i] != tile)
        continue;
      const std::uint32_t bit = 1u << i;
      if (_final && *_final == i && (visited | bit) != _full)
        continue;
      visited |= bit;
    }
    return visited;
  }

private:
  std::vector<TileAddress> _objectives;
  std::optional<std::size_t> _final;
  SearchOptions _options;
  std::vector<TargetDistance> _fields;
  std::vector<std::vector<std::size_t>> _pair;
  std::uint32_t _full = 0;
  TourKey _start;
};

} // namespace

Tour plan_tour(
  const WalkerState& start,
  const std::vector<TileAddress>& objectives,
  const std::optional<TileAddress>& final,
  const SearchOptions& options,
  SearchStats* stats)
{
  std::vector<TileAddress> unique;
  for (const auto& o : objectives)
  {
    if (std::find(unique.begin(), unique.end(), o) == unique.end())
      unique.push_back(o);
  }
  if (unique.size() > max_tour_objectives)
    throw std::invalid_argument(
      "a tour supports at most " + std::to_string(max_tour_objectives) + " objectives");

  std::optional<std::size_t> final_index;
  if (final)
  {
    const auto it = std::find(unique.begin(), unique.end(), *final);
    if (it == unique.end())
      throw std::invalid_argument("the final objective must be one of the objectives");
    final_index = static_cast<std::size_t>(it - unique.begin());
  }

  Tour tour;
  if (unique.empty())
  {
    tour.path.complete = true;
    if (stats)
      *stats = {};
    return tour;
  }

  TourProblem problem(start, unique, final_index, options);
  BestFirst<TourProblem, TourKey, TourKeyHash> search(problem, options.cost);
  auto result = search.run(std::nullopt, stats);
  tour.path = make_path(std::move(result.moves), result.reached);

  // Split the walk into legs at each newly counted objective.
  TourKey at = problem.start();
  for (std::size_t i = 0; i < unique.size(); ++i)
  {
    if (at.visited & (1u << i))
      tour.legs.push_back(TourLeg{unique[i], {}, 0});
  }
  TourLeg current;
  for (const Move m : tour.path.moves)
  {
    current.moves.push_back(m);
    if (m == Move::StepForward)
      ++current.forward_steps;
    const TourKey next = *problem.successor(at, m);
    const std::uint32_t fresh = next.visited & ~at.visited;
    for (std::size_t i = 0; i < unique.size(); ++i)
    {
      if (fresh & (1u << i))
      {
        current.objective = unique[i];
        tour.legs.push_back(std::move(current));
        current = TourLeg{};
      }
    }
    at = next;
  }
  return tour;
}

} // namespace holonomy
