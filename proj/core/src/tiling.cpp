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

#include <holonomy/tiling.hpp>

#include <algorithm>
#include <list>
#include <mutex>
#include <unordered_set>

namespace holonomy {

struct AddressAccess
{
  static TileAddress make(Branch branch, std::vector<Step> steps)
  {
    return TileAddress(branch, std::move(steps));
  }
};

namespace {

TileAddress branch_root(Branch b)
{
  return AddressAccess::make(b, {});
}

int turn_of(Step s)
{
  switch (s)
  {
    case Step::F: return 0;
    case Step::L: return -1;
    case Step::R: return 1;
  }
  return 0;
}

//==============================================================================
// Bounded LRU memo for tile_distance keyed on unordered address pairs.
class DistanceMemo
{
public:
  explicit DistanceMemo(std::size_t capacity)
  : _capacity(capacity)
  {
  }

  std::optional<std::size_t> find(const std::string& key)
  {
    std::lock_guard<std::mutex> lock(_mutex);
    const auto it = _index.find(key);
    if (it == _index.end())
      return std::nullopt;
    _order.splice(_order.begin(), _order, it->second);
    return it->second->second;
  }

  void insert(const std::string& key, std::size_t value)
  {
    std::lock_guard<std::mutex> lock(_mutex);
    const auto it = _index.find(key);
    if (it != _index.end())
    {
      it->second->second = value;
      _order.splice(_order.begin(), _order, it->second);
      return;
    }

    _order.emplace_front(key, value);
    _index.emplace(key, _order.begin());
    while (_index.size() > _capacity)
    {
      _index.erase(_order.back().first);
      _order.pop_back();
    }
  }

  void clear()
  {
    std::lock_guard<std::mutex> lock(_mutex);
    _index.clear();
    _order.clear();
  }

private:
  using Entry = std::pair<std::string, std::size_t>;

  std::size_t _capacity;
  std::mutex _mutex;
  std::list<Entry> _order;
  std::unordered_map<std::string, std::list<Entry>::iterator> _index;
};

DistanceMemo& distance_memo()
{
  static DistanceMemo memo(1 << 16);
  return memo;
}

std::size_t bidirectional_distance(const TileAddress& a, const TileAddress& b)
{
  if (a == b)
    return 0;

  using Labels = std::unordered_map<TileAddress, std::size_t, TileAddressHash>;
  Labels from_a{{a, 0}};
  Labels from_b{{b, 0}};
  std::vector<TileAddress> frontier_a{a};
  std::vector<TileAddress> frontier_b{b};
  std::size_t radius_a = 0;
  std::size_t radius_b = 0;

  while (true)
  {
    const bool grow_a = frontier_a.size() <= frontier_b.size();
    auto& own = grow_a ? from_a : from_b;
    auto& other = grow_a ? from_b : from_a;
    auto& frontier = grow_a ? frontier_a : frontier_b;
    auto& radius = grow_a ? radius_a : radius_b;

    std::optional<std::size_t> best;
    std::vector<TileAddress> next;
    for (const auto& tile : frontier)
    {
      for (auto& n : neighbors(tile))
      {
        if (own.contains(n))
          continue;

        const auto hit = other.find(n);
        if (hit != other.end())
        {
          const std::size_t candidate = radius + 1 + hit->second;
          if (!best || candidate < *best)
            best = candidate;
        }
        own.emplace(n, radius + 1);
        next.push_back(std::move(n));
      }
    }

    if (best)
      return *best;

    frontier = std::move(next);
    ++radius;
  }
}

} // namespace

//==============================================================================
Branch rotate_right(Branch b)
{
  return static_cast<Branch>((static_cast<int>(b) + 1) % 4);
}

Branch rotate_left(Branch b)
{
  return static_cast<Branch>((static_cast<int>(b) + 3) % 4);
}

Step rotate_right(Step s)
{
  switch (s)
  {
    case Step::L: return Step::F;
    case Step::F: return Step::R;
    case Step::R: break;
  }
  throw std::logic_error("a right step has no right rotation");
}

Step rotate_left(Step s)
{
  switch (s)
  {
    case Step::R: return Step::F;
    case Step::F: return Step::L;
    case Step::L: break;
  }
  throw std::logic_error("a left step has no left rotation");
}

char to_char(Branch b)
{
  static constexpr char letters[] = {'N', 'E', 'S', 'W'};
  return letters[static_cast<int>(b)];
}

char to_char(Step s)
{
  static constexpr char letters[] = {'f', 'l', 'r'};
  return letters[static_cast<int>(s)];
}

//==============================================================================
TileAddress TileAddress::from_walk(Branch branch, std::span<const Step> steps)
{
  return normalize(branch, steps);
}

TileAddress TileAddress::parse(std::string_view text)
{
  if (text == "O")
    return origin();
  if (text.empty())
    throw std::invalid_argument("empty tile address");

  Branch branch;
  switch (text.front())
  {
    case 'N': branch = Branch::N; break;
    case 'E': branch = Branch::E; break;
    case 'S': branch = Branch::S; break;
    case 'W': branch = Branch::W; break;
    default:
      throw std::invalid_argument(
        "tile address must start with O, N, E, S or W: '" + std::string(text) + "'");
  }

  std::vector<Step> steps;
  steps.reserve(text.size() - 1);
  for (const char c : text.substr(1))
  {
    switch (c)
    {
      case 'f': steps.push_back(Step::F); break;
      case 'l': steps.push_back(Step::L); break;
      case 'r': steps.push_back(Step::R); break;
      default:
        throw std::invalid_argument(
          "tile address steps must be f, l or r: '" + std::string(text) + "'");
    }
  }

  return normalize(branch, steps);
}

Branch TileAddress::branch() const
{
  if (!_branch)
    throw std::logic_error("the origin has no branch");
  return *_branch;
}

std::string TileAddress::to_string() const
{
  if (is_origin())
    return "O";

  std::string out;
  out.reserve(_steps.size() + 1);
  out.push_back(to_char(*_branch));
  for (const Step s : _steps)
    out.push_back(to_char(s));
  return out;
}

std::strong_ordering TileAddress::operator<=>(const TileAddress& other) const
{
  const char head_a = is_origin() ? 'O' : to_char(*_branch);
  const char head_b = other.is_origin() ? 'O' : to_char(*other._branch);
  if (head_a != head_b)
    return head_a <=> head_b;

  const std::size_t n = std::min(_steps.size(), other._steps.size());
  for (std::size_t i = 0; i < n; ++i)
  {
    const char ca = to_char(_steps[i]);
    const char cb = to_char(other._steps[i]);
    if (ca != cb)
      return ca <=> cb;
  }
  return _steps.size() <=> other._steps.size();
}

std::size_t TileAddress::hash() const
{
  std::uint64_t h = 1469598103934665603ull;
  const auto mix = [&h](std::uint64_t v)
    {
      h ^= v;
      h *= 1099511628211ull;
    };

  mix(is_origin() ? 7u : static_cast<std::uint64_t>(*_branch));
  for (const Step s : _steps)
    mix(static_cast<std::uint64_t>(s) + 11u);
  return static_cast<std::size_t>(h);
}

//==============================================================================
bool is_valid_step(std::span<const Step> steps, Step next)
{
  switch (next)
  {
    case Step::F:
      return true;
    case Step::R:
      return steps.empty() || steps.back() != Step::R;
    case Step::L:
    {
      for (auto it = steps.rbegin(); it != steps.rend(); ++it)
      {
        if (*it == Step::R)
          return true;
        if (*it == Step::L)
          return false;
      }
      return true;
    }
  }
  return false;
}

bool is_valid_sequence(std::span<const Step> steps)
{
  for (std::size_t i = 0; i < steps.size(); ++i)
  {
    if (!is_valid_step(steps.first(i), steps[i]))
      return false;
  }
  return true;
}

TileAddress append_step(const TileAddress& addr, Step step)
{
  if (addr.is_origin())
    throw std::invalid_argument("the origin has no step frame; use a branch");

  const auto& steps = addr.steps();
  if (is_valid_step(steps, step))
  {
    std::vector<Step> out = steps;
    out.push_back(step);
    return AddressAccess::make(addr.branch(), std::move(out));
  }

  Branch branch = addr.branch();
  std::vector<Step> out;

  if (step == Step::R)
  {
    // {x, (r f)^n, r, r} -> {r(x), l, f^n}, taking the longest (r f) run.
    std::size_t run_start = steps.size() - 1;
    while (run_start >= 2
      && steps[run_start - 1] == Step::F
      && steps[run_start - 2] == Step::R)
    {
      run_start -= 2;
    }
    const std::size_t n = (steps.size() - 1 - run_start) / 2;

    if (run_start == 0)
    {
      branch = rotate_right(branch);
    }
    else
    {
      out.assign(steps.begin(), steps.begin() + static_cast<long>(run_start - 1));
      out.push_back(rotate_right(steps[run_start - 1]));
    }
    out.push_back(Step::L);
    out.insert(out.end(), n, Step::F);
  }
  else
  {
    // {x, l, f^n, l} -> {l(x), (r f)^n, r}.
    std::size_t last_left = steps.size() - 1;
    while (steps[last_left] != Step::L)
      --last_left;
    const std::size_t n = steps.size() - 1 - last_left;

    if (last_left == 0)
    {
      branch = rotate_left(branch);
    }
    else
    {
      out.assign(steps.begin(), steps.begin() + static_cast<long>(last_left - 1));
      out.push_back(rotate_left(steps[last_left - 1]));
    }
    for (std::size_t i = 0; i < n; ++i)
    {
      out.push_back(Step::R);
      out.push_back(Step::F);
    }
    out.push_back(Step::R);
  }

  return AddressAccess::make(branch, std::move(out));
}

std::array<TileAddress, 4> neighbors(const TileAddress& addr)
{
  if (addr.is_origin())
  {
    return {
      branch_root(Branch::N),
      branch_root(Branch::E),
      branch_root(Branch::S),
      branch_root(Branch::W)};
  }

  return {
    *parent(addr),
    append_step(addr, Step::L),
    append_step(addr, Step::F),
    append_step(addr, Step::R)};
}

std::optional<EdgeIndex> edge_toward(const TileAddress& addr, const TileAddress& of)
{
  const auto around = neighbors(addr);
  for (int e = 0; e < 4; ++e)
  {
    if (around[static_cast<std::size_t>(e)] == of)
      return EdgeIndex(e);
  }
  return std::nullopt;
}

std::optional<TileAddress> parent(const TileAddress& addr)
{
  if (addr.is_origin())
    return std::nullopt;
  if (addr.steps().empty())
    return TileAddress::origin();

  std::vector<Step> steps = addr.steps();
  steps.pop_back();
  return AddressAccess::make(addr.branch(), std::move(steps));
}

TileAddress normalize(Branch branch, std::span<const Step> steps)
{
  TileAddress current = branch_root(branch);
  // Direction of travel, expressed as an edge of `current`.
  EdgeIndex heading(2);

  for (const Step s : steps)
  {
    const EdgeIndex exit = heading.plus(turn_of(s));
    if (heading.value() == 2 && !current.is_origin()
      && is_valid_step(current.steps(), s))
    {
      current = append_step(current, s);
      continue;
    }

    TileAddress next = neighbors(current)[static_cast<std::size_t>(exit.value())];
    heading = edge_toward(next, current)->opposite();
    current = std::move(next);
  }

  return current;
}

//==============================================================================
std::size_t tile_distance(const TileAddress& a, const TileAddress& b)
{
  if (a == b)
    return 0;

  std::string ka = a.to_string();
  std::string kb = b.to_string();
  if (kb < ka)
    std::swap(ka, kb);
  const std::string key = ka + "|" + kb;

  auto& memo = distance_memo();
  if (const auto hit = memo.find(key))
    return *hit;

  const std::size_t d = bidirectional_distance(a, b);
  memo.insert(key, d);
  return d;
}

void clear_distance_cache()
{
  distance_memo().clear();
}

std::vector<std::pair<TileAddress, std::size_t>> tiles_within_with_distance(
  const TileAddress& center, std::size_t radius)
{
  std::unordered_set<TileAddress, TileAddressHash> seen{center};
  std::vector<std::pair<TileAddress, std::size_t>> out{{center, 0}};
  std::vector<TileAddress> frontier{center};

  for (std::size_t r = 1; r <= radius; ++r)
  {
    std::vector<TileAddress> next;
    for (const auto& tile : frontier)
    {
      for (auto& n : neighbors(tile))
      {
        if (seen.insert(n).second)
        {
          out.emplace_back(n, r);
          next.push_back(std::move(n));
        }
      }
    }
    frontier = std::move(next);
  }

  std::sort(out.begin(), out.end(),
    [](const auto& x, const auto& y)
    {
      if (x.second != y.second)
        return x.second < y.second;
      return x.first < y.first;
    });
  return out;
}

std::vector<TileAddress> tiles_within(const TileAddress& center, std::size_t radius)
{
  std::vector<TileAddress> out;
  for (auto& [tile, d] : tiles_within_with_distance(center, radius))
    out.push_back(std::move(tile));
  return out;
}

//==============================================================================
DistanceField::DistanceField(std::vector<TileAddress> sources)
: _sources(std::move(sources))
{
  if (_sources.empty())
    throw std::invalid_argument("a distance field needs at least one source");

  for (const auto& s : _sources)
  {
    if (_dist.emplace(s, 0).second)
      _frontier.push_back(s);
  }
}

std::size_t DistanceField::distance(const TileAddress& tile)
{
  while (true)
  {
    const auto it = _dist.find(tile);
    if (it != _dist.end())
      return it->second;
    grow();
  }
}

void DistanceField::grow()
{
  std::vector<TileAddress> next;
  for (const auto& tile : _frontier)
  {
    for (auto& n : neighbors(tile))
    {
      if (_dist.emplace(n, _radius + 1).second)
        next.push_back(std::move(n));
    }
  }
  _frontier = std::move(next);
  ++_radius;
}

//==============================================================================
namespace {

// Tiles along the spanning-tree path from `a` to `b`, both included.
std::vector<TileAddress> tree_path(const TileAddress& a, const TileAddress& b)
{
  std::size_t common = 0;
  bool same_branch = !a.is_origin() && !b.is_origin() && a.branch() == b.branch();
  if (same_branch)
  {
    const auto& sa = a.steps();
    const auto& sb = b.steps();
    while (common < sa.size() && common < sb.size() && sa[common] == sb[common])
      ++common;
  }

  // Depth of the lowest common ancestor.
  const std::size_t lca_depth = same_branch ? common + 1 : 0;

  std::vector<TileAddress> up;
  TileAddress t = a;
  while (t.depth() > lca_depth)
  {
    up.push_back(t);
    t = *parent(t);
  }
  up.push_back(t);

  std::vector<TileAddress> down;
  t = b;
  while (t.depth() > lca_depth)
  {
    down.push_back(t);
    t = *parent(t);
  }

  up.insert(up.end(), down.rbegin(), down.rend());
  return up;
}

} // namespace

TileAddress rotate_about(
  const TileAddress& anchor, int quarter_turns, const TileAddress& tile)
{
  if (tile == anchor)
    return anchor;

  const auto path = tree_path(anchor, tile);

  TileAddress image = anchor;
  EdgeIndex exit = edge_toward(path[0], path[1])->plus(quarter_turns);
  for (std::size_t i = 1; i < path.size(); ++i)
  {
    TileAddress next = neighbors(image)[static_cast<std::size_t>(exit.value())];
    if (i + 1 < path.size())
    {
      const EdgeIndex entry_orig = *edge_toward(path[i], path[i - 1]);
      const EdgeIndex exit_orig = *edge_toward(path[i], path[i + 1]);
      const EdgeIndex entry_image = *edge_toward(next, image);
      exit = entry_image.plus(exit_orig.value() - entry_orig.value());
    }
    image = std::move(next);
  }
  return image;
}

} // namespace holonomy
