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


#include <holonomy/worldgen.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <unordered_set>

namespace holonomy {

namespace {

constexpr double entropy_tie = 1e-12;

std::uint64_t splitmix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t draw(std::uint64_t seed, const TileAddress& tile, std::uint64_t counter)
{
  return splitmix(splitmix(seed ^ splitmix(tile.hash())) ^ counter);
}

double unit(std::uint64_t bits)
{
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

template<typename F>
void for_each_bit(std::uint64_t mask, F&& f)
{
  while (mask)
  {
    const int b = std::countr_zero(mask);
    f(static_cast<std::size_t>(b));
    mask &= mask - 1;
  }
}

} // namespace

//==============================================================================
Catalog::Catalog(
  std::vector<ObjectKind> objects,
  std::vector<Biome> biomes,
  std::vector<std::pair<std::string, std::string>> complements)
: _objects(std::move(objects)),
  _biomes(std::move(biomes)),
  _complements(std::move(complements))
{
  if (_objects.empty())
    throw std::invalid_argument("a catalog needs at least one object");
  if (_biomes.empty())
    _biomes.push_back(Biome{"default", 0});

  for (std::size_t o = 0; o < _objects.size(); ++o)
  {
    const auto& obj = _objects[o];
    if (!(obj.weight > 0.0))
      throw std::invalid_argument("object '" + obj.name + "' needs a positive weight");
    for (const auto& b : obj.biomes)
    {
      if (!biome_index(b))
        throw std::invalid_argument("object '" + obj.name + "' names unknown biome '" + b + "'");
    }

    const int turns = obj.rotatable ? 4 : 1;
    for (int k = 0; k < turns; ++k)
    {
      std::array<std::string, 4> rotated;
      for (int e = 0; e < 4; ++e)
        rotated[static_cast<std::size_t>(e)] = obj.connectors[static_cast<std::size_t>(((e - k) % 4 + 4) % 4)];

      const bool duplicate = std::any_of(_variants.begin(), _variants.end(),
        [&](const Variant& v) { return v.object == o && v.connectors == rotated; });
      if (!duplicate)
        _variants.push_back(Variant{o, EdgeIndex(k), rotated});
    }
  }

  if (_variants.size() > 64)
    throw std::invalid_argument("a catalog supports at most 64 oriented variants");

  const std::size_t n = _variants.size();
  _all = n == 64 ? ~0ull : ((1ull << n) - 1ull);

  _biome_masks.assign(_biomes.size(), 0);
  for (std::size_t v = 0; v < n; ++v)
  {
    const auto& allowed = _objects[_variants[v].object].biomes;
    for (std::size_t b = 0; b < _biomes.size(); ++b)
    {
      if (allowed.empty()
        || std::find(allowed.begin(), allowed.end(), _biomes[b].name) != allowed.end())
      {
        _biome_masks[b] |= 1ull << v;
      }
    }
  }

  _support.assign(16 * n, 0);
  for (int mine = 0; mine < 4; ++mine)
    for (int theirs = 0; theirs < 4; ++theirs)
      for (std::size_t v = 0; v < n; ++v)
      {
        std::uint64_t mask = 0;
        for (std::size_t w = 0; w < n; ++w)
        {
          if (fits(_variants[v].connectors[static_cast<std::size_t>(mine)],
                _variants[w].connectors[static_cast<std::size_t>(theirs)]))
          {
            mask |= 1ull << w;
          }
        }
        _support[static_cast<std::size_t>(mine * 4 + theirs) * n + v] = mask;
      }
}

std::uint64_t Catalog::supported(EdgeIndex mine, EdgeIndex theirs, std::size_t variant) const
{
  return _support[static_cast<std::size_t>(mine.value() * 4 + theirs.value()) * _variants.size() + variant];
}

bool Catalog::fits(const std::string& a, const std::string& b) const
{
  bool paired = false;
  for (const auto& [x, y] : _complements)
  {
    if ((x == a && y == b) || (x == b && y == a))
      return true;
    paired = paired || x == a || y == a;
  }
  return !paired && a == b;
}

std::optional<std::size_t> Catalog::object_index(const std::string& name) const
{
  for (std::size_t i = 0; i < _objects.size(); ++i)
  {
    if (_objects[i].name == name)
      return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Catalog::biome_index(const std::string& name) const
{
  for (std::size_t i = 0; i < _biomes.size(); ++i)
  {
    if (_biomes[i].name == name)
      return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> Catalog::variant_index(std::size_t object, EdgeIndex orientation) const
{
  for (std::size_t v = 0; v < _variants.size(); ++v)
  {
    if (_variants[v].object == object && _variants[v].orientation == orientation)
      return v;
  }
  return std::nullopt;
}

Catalog Catalog::forest()
{
  const std::string g = "grass";
  const std::string c = "creek";
  const std::string l = "log";
  return Catalog(
    {
      {"grass", 6.0, {g, g, g, g}, {}, false},
      {"flower", 2.0, {g, g, g, g}, {"meadow"}, false},
      {"tree", 4.0, {g, g, g, g}, {"woods"}, false},
      {"flag", 0.2, {g, g, g, g}, {}, false},
      {"creek_straight", 1.0, {c, g, c, g}, {}, true},
      {"creek_bend", 1.0, {c, c, g, g}, {}, true},
      {"creek_fork", 0.3, {c, c, g, c}, {}, true},
      {"creek_pond", 0.5, {c, g, g, g}, {}, true},
      {"log_half", 0.8, {l, g, g, g}, {"woods"}, true},
    },
    {{"meadow", 0}, {"woods", 0}});
}

Catalog Catalog::from_json(const nlohmann::json& j)
{
  std::vector<ObjectKind> objects;
  for (const auto& o : j.at("objects"))
  {
    ObjectKind k;
    k.name = o.at("name").get<std::string>();
    k.weight = o.value("weight", 1.0);
    const auto conn = o.at("connectors").get<std::vector<std::string>>();
    if (conn.size() != 4)
      throw std::invalid_argument("object '" + k.name + "' needs exactly 4 connectors");
    std::copy(conn.begin(), conn.end(), k.connectors.begin());
    k.biomes = o.value("biomes", std::vector<std::string>{});
    k.rotatable = o.value("rotatable", true);
    objects.push_back(std::move(k));
  }

  std::vector<Biome> biomes;
  for (const auto& b : j.value("biomes", nlohmann::json::array()))
    biomes.push_back(Biome{b.at("name").get<std::string>(), b.value("depth", std::size_t{0})});

  std::vector<std::pair<std::string, std::string>> complements;
  for (const auto& p : j.value("complements", nlohmann::json::array()))
    complements.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());

  return Catalog(std::move(objects), std::move(biomes), std::move(complements));
}

nlohmann::json Catalog::to_json() const
{
  nlohmann::json objects = nlohmann::json::array();
  for (const auto& o : _objects)
  {
    objects.push_back({
      {"name", o.name},
      {"weight", o.weight},
      {"connectors", o.connectors},
      {"biomes", o.biomes},
      {"rotatable", o.rotatable}});
  }

  nlohmann::json biomes = nlohmann::json::array();
  for (const auto& b : _biomes)
    biomes.push_back({{"name", b.name}, {"depth", b.depth}});

  nlohmann::json complements = nlohmann::json::array();
  for (const auto& [a, b] : _complements)
    complements.push_back({a, b});

  return {{"objects", objects}, {"biomes", biomes}, {"complements", complements}};
}

//==============================================================================
double entropy(std::uint64_t options, const Catalog& catalog, EntropyMode mode)
{
  if (options == 0)
    throw std::invalid_argument("entropy of an empty option set");

  if (mode == EntropyMode::OptionCount)
    return std::log(static_cast<double>(std::popcount(options)));

  double total = 0.0;
  for_each_bit(options, [&](std::size_t v)
    {
      total += catalog.objects()[catalog.variants()[v].object].weight;
    });

  double h = 0.0;
  for_each_bit(options, [&](std::size_t v)
    {
      const double p = catalog.objects()[catalog.variants()[v].object].weight / total;
      h -= p * std::log(p);
    });
  return std::max(0.0, h);
}

Contradiction::Contradiction(TileAddress tile)
: std::runtime_error("no options left at tile " + tile.to_string()),
  _tile(std::move(tile))
{
}

Unsatisfiable::Unsatisfiable(TileAddress tile, const std::string& why)
: std::runtime_error("world generation is unsatisfiable at tile " + tile.to_string() + ": " + why),
  _tile(std::move(tile))
{
}

//==============================================================================
Wave::Wave(const Catalog& catalog)
: _catalog(&catalog)
{
}

void Wave::add(const TileAddress& tile, std::uint64_t options)
{
  const auto [it, inserted] = _options.emplace(tile, options);
  if (!inserted)
    it->second &= options;
}

std::set<TileAddress> Wave::restrict(const TileAddress& tile, std::uint64_t mask)
{
  auto& opts = _options.at(tile);
  const std::uint64_t next = opts & mask;
  if (next == opts)
    return {};
  opts = next;
  if (next == 0)
    throw Contradiction(tile);
  return propagate({tile});
}

std::set<TileAddress> Wave::collapse(const TileAddress& tile, std::size_t variant)
{
  return restrict(tile, 1ull << variant);
}

std::set<TileAddress> Wave::propagate(const std::vector<TileAddress>& seeds)
{
  std::set<TileAddress> changed;
  std::deque<TileAddress> queue(seeds.begin(), seeds.end());
  std::unordered_set<TileAddress, TileAddressHash> queued(seeds.begin(), seeds.end());
  const std::unordered_set<TileAddress, TileAddressHash> seed_set(seeds.begin(), seeds.end());

  while (!queue.empty())
  {
    const TileAddress tile = std::move(queue.front());
    queue.pop_front();
    queued.erase(tile);

    const std::uint64_t mine = _options.at(tile);
    const auto around = neighbors(tile);
    for (int e = 0; e < 4; ++e)
    {
      const TileAddress& other = around[static_cast<std::size_t>(e)];
      const auto it = _options.find(other);
      if (it == _options.end())
        continue;

      const EdgeIndex theirs = *edge_toward(other, tile);
      std::uint64_t allowed = 0;
      for_each_bit(mine, [&](std::size_t v)
        {
          allowed |= _catalog->supported(EdgeIndex(e), theirs, v);
        });

      const std::uint64_t next = it->second & allowed;
      if (next == it->second)
        continue;
      it->second = next;
      if (!seed_set.contains(other))
        changed.insert(other);
      if (next == 0)
        throw Contradiction(other);
      if (queued.insert(other).second)
        queue.push_back(other);
    }
  }
  return changed;
}

//==============================================================================
namespace {

bool connected(const std::vector<TileAddress>& tiles)
{
  if (tiles.empty())
    return true;
  const std::unordered_set<TileAddress, TileAddressHash> members(tiles.begin(), tiles.end());
  std::unordered_set<TileAddress, TileAddressHash> seen{tiles.front()};
  std::vector<TileAddress> stack{tiles.front()};
  while (!stack.empty())
  {
    const TileAddress t = stack.back();
    stack.pop_back();
    for (auto& n : neighbors(t))
    {
      if (members.contains(n) && seen.insert(n).second)
        stack.push_back(std::move(n));
    }
  }
  return seen.size() == members.size();
}

std::size_t pick_weighted(
  std::uint64_t options, const Catalog& catalog, double u)
{
  double total = 0.0;
  for_each_bit(options, [&](std::size_t v)
    {
      total += catalog.objects()[catalog.variants()[v].object].weight;
    });

  double acc = 0.0;
  std::size_t chosen = static_cast<std::size_t>(std::countr_zero(options));
  bool done = false;
  for_each_bit(options, [&](std::size_t v)
    {
      if (done)
        return;
      acc += catalog.objects()[catalog.variants()[v].object].weight;
      chosen = v;
      if (u * total < acc)
        done = true;
    });
  return chosen;
}

// One generate or extend call: targets collapse, the halo around them only
// constrains, already collapsed tiles are fixed.
class BatchSolver
{
public:
  BatchSolver(
    WorldState& world,
    std::vector<TileAddress> targets,
    const Catalog& catalog,
    const WorldgenOptions& options)
  : _world(world),
    _targets(std::move(targets)),
    _catalog(catalog),
    _options(options),
    _wave(catalog)
  {
    _batch = _world.batches.size();
    _world.batches.push_back(_targets);

    const std::unordered_set<TileAddress, TileAddressHash> target_set(
      _targets.begin(), _targets.end());
    std::vector<TileAddress> halo;
    for (const auto& t : _targets)
    {
      for (auto& n : neighbors(t))
      {
        if (!target_set.contains(n) && !_world.contents.contains(n)
          && std::find(halo.begin(), halo.end(), n) == halo.end())
        {
          halo.push_back(std::move(n));
        }
      }
    }

    std::vector<TileAddress> seeds;
    const auto add_open = [&](const TileAddress& t)
      {
        std::uint64_t opts = _catalog.all_options();
        if (const auto it = _world.biomes.find(t); it != _world.biomes.end())
          opts &= _catalog.biome_options(it->second.biome);
        _wave.add(t, opts);
        seeds.push_back(t);
        for (const auto& n : neighbors(t))
        {
          if (const auto it = _world.contents.find(n); it != _world.contents.end())
          {
            if (!_wave.contains(n))
            {
              _wave.add(n, 1ull << it->second.variant);
              seeds.push_back(n);
            }
          }
        }
      };
    for (const auto& t : _targets)
      add_open(t);
    for (const auto& t : halo)
      add_open(t);

    for (const auto& t : _targets)
    {
      if (_wave.options(t) == 0)
        throw Unsatisfiable(t, "no object fits the tile's biome");
    }
    try
    {
      _wave.propagate(seeds);
    }
    catch (const Contradiction& c)
    {
      throw Unsatisfiable(c.tile(), "the fixed boundary leaves no options");
    }
  }

  void run()
  {
    while (true)
    {
      const auto next = select();
      if (!next)
        break;

      Frame frame{_wave, _world.biomes, _world.log.size(), _decided, next->first, 0};
      _pending.reset();
      try
      {
        decide(next->first, next->second);
        frame.variant = *_pending;
        _frames.push_back(std::move(frame));
      }
      catch (const Contradiction&)
      {
        // A failure before a variant was drawn condemns the previous decision.
        if (_pending)
        {
          frame.variant = *_pending;
          _frames.push_back(std::move(frame));
        }
        else
        {
          restore(frame);
        }
        backtrack();
      }
    }
    commit();
  }

  void replay(const std::vector<Decision>& log)
  {
    for (const auto& d : log)
    {
      if (d.kind == Decision::Kind::Exclude)
      {
        _wave.restrict(d.tile, ~(1ull << d.variant));
        _world.log.push_back(d);
        continue;
      }

      if (d.seeded_biome)
        seed_biome(d.tile, *d.seeded_biome);
      _wave.collapse(d.tile, d.variant);
      _decided.insert(d.tile);
      _world.log.push_back(d);
    }
    commit();
  }

private:
  struct Frame
  {
    Wave wave;
    std::map<TileAddress, BiomeTag> biomes;
    std::size_t log_size;
    std::unordered_set<TileAddress, TileAddressHash> decided;
    TileAddress tile;
    std::size_t variant;
  };

  std::optional<std::pair<TileAddress, double>> select()
  {
    std::optional<double> lowest;
    std::vector<std::pair<TileAddress, double>> tied;
    for (const auto& t : _targets)
    {
      if (_decided.contains(t))
        continue;
      const double h = entropy(_wave.options(t), _catalog, _options.entropy);
      if (!lowest || h < *lowest - entropy_tie)
      {
        lowest = h;
        tied.clear();
      }
      if (h <= *lowest + entropy_tie)
        tied.emplace_back(t, h);
    }
    if (tied.empty())
      return std::nullopt;

    const std::uint64_t counter = _world.draws++;
    std::size_t best = 0;
    std::uint64_t best_draw = draw(_world.seed, tied[0].first, counter);
    for (std::size_t i = 1; i < tied.size(); ++i)
    {
      const std::uint64_t d = draw(_world.seed, tied[i].first, counter);
      if (d < best_draw)
      {
        best = i;
        best_draw = d;
      }
    }
    _min_entropy = *lowest;
    return tied[best];
  }

  void restore(Frame& frame)
  {
    _wave = std::move(frame.wave);
    _world.biomes = std::move(frame.biomes);
    _world.log.resize(frame.log_size);
    _decided = std::move(frame.decided);
  }

  void decide(const TileAddress& tile, double tile_entropy)
  {
    Decision d;
    d.batch = _batch;
    d.tile = tile;
    d.entropy = tile_entropy;
    d.min_entropy = _min_entropy;

    if (!_world.biomes.contains(tile))
    {
      std::vector<std::size_t> fitting;
      for (std::size_t b = 0; b < _catalog.biomes().size(); ++b)
      {
        if (_wave.options(tile) & _catalog.biome_options(b))
          fitting.push_back(b);
      }
      if (fitting.empty())
        throw Contradiction(tile);
      const double u = unit(draw(_world.seed, tile, _world.draws++));
      const std::size_t b = fitting[std::min(
        fitting.size() - 1, static_cast<std::size_t>(u * static_cast<double>(fitting.size())))];
      d.seeded_biome = b;
    }

    const std::uint64_t opts = _wave.options(tile)
      & (d.seeded_biome ? _catalog.biome_options(*d.seeded_biome)
                        : _catalog.biome_options(_world.biomes.at(tile).biome));
    if (opts == 0)
      throw Contradiction(tile);
    d.variant = pick_weighted(opts, _catalog, unit(draw(_world.seed, tile, _world.draws++)));
    _pending = d.variant;

    if (d.seeded_biome)
      seed_biome(tile, *d.seeded_biome);
    _wave.collapse(tile, d.variant);
    _decided.insert(tile);
    _world.log.push_back(d);
  }

  void seed_biome(const TileAddress& tile, std::size_t b)
  {
    const std::size_t depth = _catalog.biomes()[b].depth > 0
      ? _catalog.biomes()[b].depth
      : _options.biome_depth;
    _world.biomes[tile] = BiomeTag{b, depth};
    _wave.restrict(tile, _catalog.biome_options(b));

    std::deque<TileAddress> queue{tile};
    while (!queue.empty())
    {
      const TileAddress t = std::move(queue.front());
      queue.pop_front();
      const std::size_t d = _world.biomes.at(t).depth;
      if (d == 0)
        continue;
      for (auto& n : neighbors(t))
      {
        if (!_wave.contains(n) || _world.biomes.contains(n) || _world.contents.contains(n))
          continue;
        if ((_wave.options(n) & _catalog.biome_options(b)) == 0)
          continue;
        _world.biomes[n] = BiomeTag{b, d - 1};
        _wave.restrict(n, _catalog.biome_options(b));
        queue.push_back(std::move(n));
      }
    }
  }

  void backtrack()
  {
    while (true)
    {
      if (_frames.empty())
        throw Unsatisfiable(_last_tile(), "backtracking exhausted every decision");
      if (++_world.backtracks > _options.undo_budget)
        throw Unsatisfiable(_frames.back().tile, "undo budget exhausted");

      Frame frame = std::move(_frames.back());
      _frames.pop_back();
      restore(frame);

      Decision ex;
      ex.kind = Decision::Kind::Exclude;
      ex.batch = _batch;
      ex.tile = frame.tile;
      ex.variant = frame.variant;
      _world.log.push_back(ex);
      _failed = frame.tile;
      try
      {
        _wave.restrict(frame.tile, ~(1ull << frame.variant));
        return;
      }
      catch (const Contradiction&)
      {
        _world.log.pop_back();
      }
    }
  }

  TileAddress _last_tile() const { return _failed.value_or(_targets.front()); }

  void commit()
  {
    for (const auto& t : _targets)
    {
      const std::uint64_t opts = _wave.options(t);
      _world.contents[t] = TileContent{
        static_cast<std::size_t>(std::countr_zero(opts)), _world.biomes.at(t).biome};
    }
  }

  WorldState& _world;
  std::vector<TileAddress> _targets;
  const Catalog& _catalog;
  WorldgenOptions _options;
  Wave _wave;
  std::size_t _batch = 0;
  std::unordered_set<TileAddress, TileAddressHash> _decided;
  std::vector<Frame> _frames;
  std::optional<TileAddress> _failed;
  std::optional<std::size_t> _pending;
  double _min_entropy = 0.0;
};

std::vector<TileAddress> fresh_tiles(const WorldState& world, const std::vector<TileAddress>& tiles)
{
  std::vector<TileAddress> out;
  for (const auto& t : tiles)
  {
    if (!world.contents.contains(t) && std::find(out.begin(), out.end(), t) == out.end())
      out.push_back(t);
  }
  return out;
}

} // namespace

WorldState generate(
  const std::vector<TileAddress>& region,
  const Catalog& catalog,
  std::uint64_t seed,
  const WorldgenOptions& options)
{
  if (region.empty())
    throw std::invalid_argument("the region is empty");
  if (!connected(region))
    throw std::invalid_argument("the region is not connected");

  WorldState world;
  world.seed = seed;
  return extend(world, region, catalog, options);
}

WorldState extend(
  const WorldState& world,
  const std::vector<TileAddress>& new_tiles,
  const Catalog& catalog,
  const WorldgenOptions& options)
{
  std::vector<TileAddress> targets = fresh_tiles(world, new_tiles);
  if (targets.empty())
    return world;

  if (!world.contents.empty())
  {
    std::vector<TileAddress> all = targets;
    for (const auto& [t, c] : world.contents)
      all.push_back(t);
    if (!connected(all))
      throw std::invalid_argument("new tiles must connect to the existing region");
  }

  WorldState out = world;
  BatchSolver solver(out, std::move(targets), catalog, options);
  solver.run();
  return out;
}

WorldState replay(
  const std::vector<std::vector<TileAddress>>& batches,
  const std::vector<Decision>& log,
  const Catalog& catalog,
  std::uint64_t seed,
  const WorldgenOptions& options)
{
  WorldState world;
  world.seed = seed;
  for (std::size_t b = 0; b < batches.size(); ++b)
  {
    std::vector<Decision> part;
    for (const auto& d : log)
    {
      if (d.batch == b)
        part.push_back(d);
    }
    BatchSolver solver(world, fresh_tiles(world, batches[b]), catalog, options);
    solver.replay(part);
  }
  return world;
}

std::map<TileAddress, BiomeTag> assign_biomes(
  const std::vector<TileAddress>& region,
  const Catalog& catalog,
  std::size_t depth,
  std::uint64_t seed)
{
  if (depth == 0)
    throw std::invalid_argument("biome depth must be at least 1");

  const std::unordered_set<TileAddress, TileAddressHash> members(region.begin(), region.end());
  std::map<TileAddress, BiomeTag> out;
  std::uint64_t counter = 0;
  for (const auto& tile : region)
  {
    if (out.contains(tile))
      continue;

    const double u = unit(draw(seed, tile, counter++));
    const std::size_t n = catalog.biomes().size();
    const std::size_t b = std::min(n - 1, static_cast<std::size_t>(u * static_cast<double>(n)));
    const std::size_t d0 = catalog.biomes()[b].depth > 0 ? catalog.biomes()[b].depth : depth;
    out[tile] = BiomeTag{b, d0};

    std::deque<TileAddress> queue{tile};
    while (!queue.empty())
    {
      const TileAddress t = std::move(queue.front());
      queue.pop_front();
      const std::size_t d = out.at(t).depth;
      if (d == 0)
        continue;
      for (auto& nb : neighbors(t))
      {
        if (!members.contains(nb) || out.contains(nb))
          continue;
        out[nb] = BiomeTag{b, d - 1};
        queue.push_back(std::move(nb));
      }
    }
  }
  return out;
}

//==============================================================================
nlohmann::json world_to_json(const WorldState& world, const Catalog& catalog)
{
  const auto variant_json = [&](std::size_t v)
    {
      const auto& var = catalog.variants().at(v);
      return nlohmann::json{
        {"object", catalog.objects()[var.object].name},
        {"orientation", var.orientation.value()}};
    };

  nlohmann::json contents = nlohmann::json::object();
  for (const auto& [tile, c] : world.contents)
  {
    auto entry = variant_json(c.variant);
    entry["biome"] = catalog.biomes().at(c.biome).name;
    contents[tile.to_string()] = entry;
  }

  nlohmann::json biomes = nlohmann::json::object();
  for (const auto& [tile, tag] : world.biomes)
    biomes[tile.to_string()] = {{"biome", catalog.biomes().at(tag.biome).name}, {"depth", tag.depth}};

  nlohmann::json batches = nlohmann::json::array();
  for (const auto& batch : world.batches)
  {
    nlohmann::json list = nlohmann::json::array();
    for (const auto& t : batch)
      list.push_back(t.to_string());
    batches.push_back(list);
  }

  nlohmann::json log = nlohmann::json::array();
  for (const auto& d : world.log)
  {
    auto entry = variant_json(d.variant);
    entry["kind"] = d.kind == Decision::Kind::Collapse ? "collapse" : "exclude";
    entry["batch"] = d.batch;
    entry["tile"] = d.tile.to_string();
    if (d.seeded_biome)
      entry["seeded_biome"] = catalog.biomes().at(*d.seeded_biome).name;
    entry["entropy"] = d.entropy;
    entry["min_entropy"] = d.min_entropy;
    log.push_back(entry);
  }

  return {
    {"seed", world.seed},
    {"contents", contents},
    {"biomes", biomes},
    {"batches", batches},
    {"log", log},
    {"draws", world.draws},
    {"backtracks", world.backtracks}};
}

WorldState world_from_json(const nlohmann::json& j, const Catalog& catalog)
{
  const auto variant_of = [&](const nlohmann::json& e)
    {
      const std::string name = e.at("object").get<std::string>();
      const auto o = catalog.object_index(name);
      if (!o)
        throw std::invalid_argument("unknown object '" + name + "'");
      const auto v = catalog.variant_index(*o, EdgeIndex(e.at("orientation").get<int>()));
      if (!v)
        throw std::invalid_argument("object '" + name + "' has no such orientation");
      return *v;
    };
  const auto biome_of = [&](const nlohmann::json& name)
    {
      const auto b = catalog.biome_index(name.get<std::string>());
      if (!b)
        throw std::invalid_argument("unknown biome '" + name.get<std::string>() + "'");
      return *b;
    };

  WorldState world;
  world.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& [key, e] : j.at("contents").items())
    world.contents[TileAddress::parse(key)] = TileContent{variant_of(e), biome_of(e.at("biome"))};
  for (const auto& [key, e] : j.at("biomes").items())
    world.biomes[TileAddress::parse(key)] = BiomeTag{biome_of(e.at("biome")), e.at("depth").get<std::size_t>()};
  for (const auto& batch : j.at("batches"))
  {
    std::vector<TileAddress> tiles;
    for (const auto& t : batch)
      tiles.push_back(TileAddress::parse(t.get<std::string>()));
    world.batches.push_back(std::move(tiles));
  }
  for (const auto& e : j.at("log"))
  {
    Decision d;
    const std::string kind = e.at("kind").get<std::string>();
    if (kind != "collapse" && kind != "exclude")
      throw std::invalid_argument("unknown decision kind '" + kind + "'");
    d.kind = kind == "collapse" ? Decision::Kind::Collapse : Decision::Kind::Exclude;
    d.batch = e.at("batch").get<std::size_t>();
    d.tile = TileAddress::parse(e.at("tile").get<std::string>());
    d.variant = variant_of(e);
    if (e.contains("seeded_biome"))
      d.seeded_biome = biome_of(e.at("seeded_biome"));
    d.entropy = e.at("entropy").get<double>();
    d.min_entropy = e.at("min_entropy").get<double>();
    world.log.push_back(std::move(d));
  }
  world.draws = j.at("draws").get<std::uint64_t>();
  world.backtracks = j.at("backtracks").get<std::size_t>();
  return world;
}

} // namespace holonomy
