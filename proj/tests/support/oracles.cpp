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

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <numeric>
#include <queue>
#include <set>
#include <tuple>
#include <unordered_map>

namespace holonomy::oracle {

std::map<TileAddress, std::size_t> bfs_ball(const TileAddress& center, std::size_t radius)
{
  std::map<TileAddress, std::size_t> dist{{center, 0}};
  std::vector<TileAddress> frontier{center};
  for (std::size_t d = 1; d <= radius && !frontier.empty(); ++d)
  {
    std::vector<TileAddress> next;
    for (const auto& t : frontier)
    {
      for (const auto& n : neighbors(t))
      {
        if (dist.emplace(n, d).second)
          next.push_back(n);
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

std::vector<std::size_t> geometric_ring_counts(std::size_t radius)
{
  const auto& k = tiling_constants();
  std::vector<Isometry> edge_moves;
  for (int e = 0; e < 4; ++e)
    edge_moves.push_back(Isometry::rotation(edge_angle(EdgeIndex(e))) * k.step_translation);

  const auto same = [](const HPoint& a, const HPoint& b) { return hyperbolic_distance(a, b) < 1e-6; };

  std::vector<std::vector<Isometry>> rings{{Isometry::identity()}};
  std::vector<std::vector<HPoint>> centers{{apex()}};
  for (std::size_t r = 1; r <= radius; ++r)
  {
    std::vector<Isometry> ring;
    std::vector<HPoint> ring_centers;
    for (const auto& frame : rings[r - 1])
    {
      for (const auto& m : edge_moves)
      {
        const Isometry next = (frame * m).renormalized();
        const HPoint c = tile_center(next);
        const auto seen = [&](const std::vector<HPoint>& pts)
          { return std::any_of(pts.begin(), pts.end(), [&](const HPoint& p) { return same(p, c); }); };
        if (seen(ring_centers) || seen(centers[r - 1]) || (r >= 2 && seen(centers[r - 2])))
          continue;
        ring.push_back(next);
        ring_centers.push_back(c);
      }
    }
    rings.push_back(std::move(ring));
    centers.push_back(std::move(ring_centers));
  }

  std::vector<std::size_t> counts;
  for (const auto& ring : rings)
    counts.push_back(ring.size());
  return counts;
}

std::vector<TileAddress> vertex_cycle(const TileAddress& tile, int k)
{
  std::vector<TileAddress> out{tile};
  TileAddress t = tile;
  int corner = k;
  for (std::size_t i = 0; i < 16; ++i)
  {
    const TileAddress n = neighbors(t)[static_cast<std::size_t>((corner + 1) % 4)];
    const auto entry = edge_toward(n, t);
    if (!entry)
      throw std::logic_error("neighbour relation is not symmetric at " + t.to_string());
    t = n;
    corner = entry->value();
    if (t == tile && corner == k)
      return out;
    out.push_back(t);
  }
  throw std::logic_error("vertex walk did not close");
}

std::size_t vertex_cycle_length(const TileAddress& tile, int k, std::size_t limit)
{
  TileAddress t = tile;
  int corner = k;
  for (std::size_t i = 1; i <= limit; ++i)
  {
    const TileAddress n = neighbors(t)[static_cast<std::size_t>((corner + 1) % 4)];
    const auto entry = edge_toward(n, t);
    if (!entry)
      return 0;
    t = n;
    corner = entry->value();
    if (t == tile && corner == k)
      return i;
  }
  return 0;
}

double corner_angle(const Isometry& frame, int k)
{
  const auto corners = tile_corners(frame);
  const Eigen::Vector3d p = corners[static_cast<std::size_t>(k)].vec();
  const auto tangent = [&](int j)
    {
      const Eigen::Vector3d q = corners[static_cast<std::size_t>((j + 4) % 4)].vec();
      return Eigen::Vector3d(q + minkowski_dot(p, q) * p);
    };
  const Eigen::Vector3d a = tangent(k - 1);
  const Eigen::Vector3d b = tangent(k + 1);
  const double c = minkowski_dot(a, b) / std::sqrt(minkowski_dot(a, a) * minkowski_dot(b, b));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

bool interiors_overlap(const std::vector<DiskPoint>& a, const std::vector<DiskPoint>& b, double eps)
{
  const auto separated_along = [&](const std::vector<DiskPoint>& poly)
    {
      for (std::size_t i = 0; i < poly.size(); ++i)
      {
        const DiskPoint& p = poly[i];
        const DiskPoint& q = poly[(i + 1) % poly.size()];
        const double nx = -(q.v - p.v);
        const double ny = q.u - p.u;
        const auto project = [&](const std::vector<DiskPoint>& pts)
          {
            double lo = 1e300;
            double hi = -1e300;
            for (const auto& s : pts)
            {
              const double d = s.u * nx + s.v * ny;
              lo = std::min(lo, d);
              hi = std::max(hi, d);
            }
            return std::pair{lo, hi};
          };
        const auto [alo, ahi] = project(a);
        const auto [blo, bhi] = project(b);
        if (std::min(ahi, bhi) - std::max(alo, blo) <= eps)
          return true;
      }
      return false;
    };
  return !separated_along(a) && !separated_along(b);
}

//------------------------------------------------------------------------------
namespace {

std::size_t forward_count(const std::vector<Move>& moves)
{
  return static_cast<std::size_t>(std::count(moves.begin(), moves.end(), Move::StepForward));
}

} // namespace

std::optional<std::size_t> ucs_cost(const WalkerState& start, const TileAddress& goal, std::size_t max_cost)
{
  std::unordered_map<WalkerState, std::size_t, WalkerStateHash> best{{start, 0}};
  std::deque<std::pair<WalkerState, std::size_t>> open{{start, 0}};
  std::unordered_map<WalkerState, bool, WalkerStateHash> done;
  while (!open.empty())
  {
    const auto [s, d] = open.front();
    open.pop_front();
    if (done[s])
      continue;
    done[s] = true;
    if (s.tile == goal)
      return d;
    for (Move m : {Move::TurnLeft, Move::TurnRight, Move::StepForward})
    {
      if (!is_legal(s, m))
        continue;
      const std::size_t w = m == Move::StepForward ? 1 : 0;
      if (d + w > max_cost)
        continue;
      const WalkerState n = apply_move(s, m);
      const auto it = best.find(n);
      if (it != best.end() && it->second <= d + w)
        continue;
      best[n] = d + w;
      if (w == 0)
        open.emplace_front(n, d);
      else
        open.emplace_back(n, d + 1);
    }
  }
  return std::nullopt;
}

std::optional<std::size_t> replay_cost(
  const WalkerState& start, const std::vector<Move>& moves, const TileAddress& goal)
{
  WalkerState s = start;
  for (Move m : moves)
  {
    if (!is_legal(s, m))
      return std::nullopt;
    s = apply_move(s, m);
  }
  if (s.tile != goal)
    return std::nullopt;
  return forward_count(moves);
}

bool is_prefix_of_optimal(const WalkerState& start, const std::vector<Move>& moves, const TileAddress& goal)
{
  WalkerState s = start;
  for (Move m : moves)
  {
    if (!is_legal(s, m))
      return false;
    s = apply_move(s, m);
  }
  const auto total = ucs_cost(start, goal);
  const auto rest = ucs_cost(s, goal);
  return total && rest && forward_count(moves) + *rest == *total;
}

std::size_t brute_tour_cost(
  const WalkerState& start,
  const std::vector<TileAddress>& objectives_in,
  const std::optional<TileAddress>& final)
{
  std::vector<TileAddress> objectives = objectives_in;
  std::sort(objectives.begin(), objectives.end());
  objectives.erase(std::unique(objectives.begin(), objectives.end()), objectives.end());
  if (objectives.empty())
    return 0;

  constexpr std::size_t field_radius = 9;
  std::map<TileAddress, std::map<TileAddress, std::size_t>> fields;
  for (const auto& o : objectives)
    fields[o] = bfs_ball(o, field_radius);
  const auto dist = [&](const TileAddress& from, const TileAddress& objective)
    {
      const auto& f = fields.at(objective);
      const auto it = f.find(from);
      return it == f.end() ? field_radius + 1 : it->second;
    };

  std::vector<std::size_t> order(objectives.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  do
  {
    if (final && objectives[order.back()] != *final)
      continue;

    const std::size_t n = order.size();
    // Lower bound on the remaining legs after reaching objective k.
    std::vector<std::size_t> tail(n, 0);
    for (std::size_t k = n - 1; k-- > 0;)
      tail[k] = tail[k + 1] + dist(objectives[order[k]], objectives[order[k + 1]]);

    const auto advance = [&](const WalkerState& s, std::size_t k)
      {
        while (k < n && s.tile == objectives[order[k]])
          ++k;
        return k;
      };
    const auto h = [&](const WalkerState& s, std::size_t k)
      {
        return k == n ? 0 : dist(s.tile, objectives[order[k]]) + tail[k];
      };

    using Node = std::pair<WalkerState, std::size_t>;
    struct NodeHash
    {
      std::size_t operator()(const Node& x) const { return WalkerStateHash{}(x.first) * 31 + x.second; }
    };
    std::unordered_map<Node, std::size_t, NodeHash> g;
    using Entry = std::tuple<std::size_t, std::size_t, std::size_t>;  // f, g, node id
    std::vector<Node> nodes;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;

    const Node first{start, advance(start, 0)};
    g[first] = 0;
    nodes.push_back(first);
    open.emplace(h(first.first, first.second), 0, 0);
    std::size_t cost = std::numeric_limits<std::size_t>::max();
    while (!open.empty())
    {
      const auto [f, d, id] = open.top();
      open.pop();
      const Node node = nodes[id];
      if (g.at(node) < d)
        continue;
      if (f >= best)
        break;
      if (node.second == n)
      {
        cost = d;
        break;
      }
      for (Move m : {Move::TurnLeft, Move::TurnRight, Move::StepForward})
      {
        if (!is_legal(node.first, m))
          continue;
        const WalkerState s = apply_move(node.first, m);
        const Node next{s, advance(s, node.second)};
        const std::size_t nd = d + (m == Move::StepForward ? 1 : 0);
        const auto it = g.find(next);
        if (it != g.end() && it->second <= nd)
          continue;
        g[next] = nd;
        nodes.push_back(next);
        open.emplace(nd + h(next.first, next.second), nd, nodes.size() - 1);
      }
    }
    best = std::min(best, cost);
  } while (std::next_permutation(order.begin(), order.end()));
  return best;
}

//------------------------------------------------------------------------------
namespace {

bool labels_fit(const Catalog& catalog, const std::string& a, const std::string& b)
{
  std::set<std::string> paired;
  for (const auto& [x, y] : catalog.complements())
  {
    paired.insert(x);
    paired.insert(y);
  }
  if (!paired.contains(a) && !paired.contains(b))
    return a == b;
  for (const auto& [x, y] : catalog.complements())
  {
    if ((x == a && y == b) || (y == a && x == b))
      return true;
  }
  return false;
}

std::string label_at(const Catalog& catalog, std::size_t variant, int edge)
{
  const Variant& v = catalog.variants().at(variant);
  const ObjectKind& kind = catalog.objects().at(v.object);
  // Orientation k carries the kind's edge j to edge j + k.
  return kind.connectors[static_cast<std::size_t>(((edge - v.orientation.value()) % 4 + 4) % 4)];
}

} // namespace

std::vector<std::string> audit_world(const WorldState& world, const Catalog& catalog)
{
  std::vector<std::string> problems;
  for (const auto& [tile, content] : world.contents)
  {
    const Variant& v = catalog.variants().at(content.variant);
    const ObjectKind& kind = catalog.objects().at(v.object);

    const auto tag = world.biomes.find(tile);
    if (tag == world.biomes.end())
      problems.push_back(tile.to_string() + ": no biome");
    else if (tag->second.biome != content.biome)
      problems.push_back(tile.to_string() + ": content biome differs from biome map");
    const std::string& biome = catalog.biomes().at(content.biome).name;
    if (!kind.biomes.empty() && std::find(kind.biomes.begin(), kind.biomes.end(), biome) == kind.biomes.end())
      problems.push_back(tile.to_string() + ": " + kind.name + " is not allowed in " + biome);

    const auto nbrs = neighbors(tile);
    for (int e = 0; e < 4; ++e)
    {
      const TileAddress& n = nbrs[static_cast<std::size_t>(e)];
      if (!(tile < n))
        continue;
      const auto other = world.contents.find(n);
      if (other == world.contents.end())
        continue;
      const auto back = edge_toward(n, tile);
      if (!back)
      {
        problems.push_back(tile.to_string() + ": asymmetric neighbour " + n.to_string());
        continue;
      }
      const std::string a = label_at(catalog, content.variant, e);
      const std::string b = label_at(catalog, other->second.variant, back->value());
      if (!labels_fit(catalog, a, b))
        problems.push_back(tile.to_string() + "/" + n.to_string() + ": " + a + " meets " + b);
    }
  }
  return problems;
}

std::size_t count_solutions(const std::vector<TileAddress>& region, const Catalog& catalog, std::size_t limit)
{
  std::vector<TileAddress> order = region;
  std::map<TileAddress, std::size_t> assigned;
  const std::size_t nv = catalog.variants().size();
  std::size_t found = 0;

  const auto consistent = [&](const TileAddress& t, std::size_t v)
    {
      const auto nbrs = neighbors(t);
      for (int e = 0; e < 4; ++e)
      {
        const auto it = assigned.find(nbrs[static_cast<std::size_t>(e)]);
        if (it == assigned.end())
          continue;
        const auto back = edge_toward(it->first, t);
        if (!labels_fit(catalog, label_at(catalog, v, e), label_at(catalog, it->second, back->value())))
          return false;
      }
      return true;
    };

  const auto search = [&](auto&& self, std::size_t i) -> void
    {
      if (found >= limit)
        return;
      if (i == order.size())
      {
        ++found;
        return;
      }
      for (std::size_t v = 0; v < nv; ++v)
      {
        if (!consistent(order[i], v))
          continue;
        assigned[order[i]] = v;
        self(self, i + 1);
        assigned.erase(order[i]);
      }
    };
  search(search, 0);
  return found;
}

//------------------------------------------------------------------------------
WalkerState random_state(std::mt19937_64& rng, std::size_t radius)
{
  WalkerState s;
  s.tile = random_tile(rng, TileAddress::origin(), radius);
  s.facing = EdgeIndex(static_cast<int>(rng() % 4));
  s.cell = Cell::from_index(static_cast<int>(rng() % 9));
  s.heading = static_cast<PhysHeading>(rng() % 4);
  return s;
}

TileAddress random_tile(std::mt19937_64& rng, const TileAddress& center, std::size_t radius)
{
  const auto ball = bfs_ball(center, radius);
  auto it = ball.begin();
  std::advance(it, static_cast<long>(rng() % ball.size()));
  return it->first;
}

std::optional<SubstructureWitness> find_substructure_violation(std::mt19937_64& rng, std::size_t attempts)
{
  for (std::size_t i = 0; i < attempts; ++i)
  {
    const WalkerState start = random_state(rng, 2);
    const TileAddress goal = random_tile(rng, start.tile, 4);
    const auto optimal = ucs_cost(start, goal);
    if (!optimal)
      continue;
    const Path p = astar(start, goal);
    if (replay_cost(start, p.moves, goal) != optimal)
      continue;

    WalkerState s = start;
    std::size_t cost = 0;
    std::set<TileAddress> seen{start.tile};
    for (Move m : p.moves)
    {
      s = apply_move(s, m);
      if (m != Move::StepForward)
        continue;
      ++cost;
      if (s.tile == goal || !seen.insert(s.tile).second)
        continue;
      const auto via = ucs_cost(start, s.tile);
      if (via && *via < cost)
        return SubstructureWitness{start, s.tile, goal, p.moves, cost, *via};
    }
  }
  return std::nullopt;
}

} // namespace holonomy::oracle
