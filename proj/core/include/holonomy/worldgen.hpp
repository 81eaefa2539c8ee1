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


#ifndef HOLONOMY__WORLDGEN_HPP
#define HOLONOMY__WORLDGEN_HPP

#include <holonomy/tiling.hpp>

#include <nlohmann/json.hpp>

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace holonomy {

//==============================================================================
struct ObjectKind
{
  std::string name;
  double weight = 1.0;
  /// Connector label per edge, in EdgeIndex order, at orientation 0.
  std::array<std::string, 4> connectors;
  /// Biomes the object may appear in. Empty means every biome.
  std::vector<std::string> biomes;
  /// Whether the four quarter-turn orientations are offered.
  bool rotatable = true;
};

struct Biome
{
  std::string name;
  /// Propagation depth assigned when the biome is seeded; 0 uses the
  /// generator default.
  std::size_t depth = 0;
};

/// An object in one orientation, with its connectors rotated into place.
struct Variant
{
  std::size_t object;
  EdgeIndex orientation;
  std::array<std::string, 4> connectors;
};

/// Objects expanded into distinct oriented variants, plus the precomputed
/// edge compatibility tables used by the solver. At most 64 variants.
class Catalog
{
public:
  Catalog(
    std::vector<ObjectKind> objects,
    std::vector<Biome> biomes,
    std::vector<std::pair<std::string, std::string>> complements = {});

  /// Grass, flowers, flags, creek segments, trees and paired log halves over
  /// the "meadow" and "woods" biomes.
  static Catalog forest();

  static Catalog from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  const std::vector<ObjectKind>& objects() const { return _objects; }
  const std::vector<Biome>& biomes() const { return _biomes; }
  const std::vector<Variant>& variants() const { return _variants; }
  const std::vector<std::pair<std::string, std::string>>& complements() const
  {
    return _complements;
  }

  std::uint64_t all_options() const { return _all; }

  /// Variants allowed in biome `b`.
  std::uint64_t biome_options(std::size_t b) const { return _biome_masks.at(b); }

  /// Variants a neighbour may take across its edge `theirs`, given that this
  /// tile holds `variant` and shares its edge `mine`.
  std::uint64_t supported(EdgeIndex mine, EdgeIndex theirs, std::size_t variant) const;

  /// A label named in a complement pair fits only its complements, like a tab
  /// and a slot. Any other label fits itself.
  bool fits(const std::string& a, const std::string& b) const;

  std::optional<std::size_t> object_index(const std::string& name) const;
  std::optional<std::size_t> biome_index(const std::string& name) const;

  /// Variant of `object` at `orientation`, if offered.
  std::optional<std::size_t> variant_index(std::size_t object, EdgeIndex orientation) const;

private:
  std::vector<ObjectKind> _objects;
  std::vector<Biome> _biomes;
  std::vector<std::pair<std::string, std::string>> _complements;
  std::vector<Variant> _variants;
  std::uint64_t _all = 0;
  std::vector<std::uint64_t> _biome_masks;
  // [mine][theirs][variant]
  std::vector<std::uint64_t> _support;
};

//==============================================================================
enum class EntropyMode { Shannon, OptionCount };

/// Shannon entropy of the normalized weights of the variants in `options`,
/// or ln(count) in OptionCount mode. Throws std::invalid_argument on an empty
/// option set.
double entropy(std::uint64_t options, const Catalog& catalog, EntropyMode mode = EntropyMode::Shannon);

/// Raised by propagation when a tile runs out of options.
class Contradiction : public std::runtime_error
{
public:
  explicit Contradiction(TileAddress tile);
  const TileAddress& tile() const { return _tile; }

private:
  TileAddress _tile;
};

/// Raised when generation cannot complete.
class Unsatisfiable : public std::runtime_error
{
public:
  Unsatisfiable(TileAddress tile, const std::string& why);
  const TileAddress& tile() const { return _tile; }

private:
  TileAddress _tile;
};

//==============================================================================
/// Option sets over a finite set of tiles with arc-consistency propagation
/// along tile adjacency. Tiles outside the wave are unconstrained. Copyable,
/// which is how the generator takes snapshots.
class Wave
{
public:
  explicit Wave(const Catalog& catalog);

  /// Adds a tile with the given options, or intersects if already present.
  void add(const TileAddress& tile, std::uint64_t options);

  bool contains(const TileAddress& tile) const { return _options.contains(tile); }
  std::uint64_t options(const TileAddress& tile) const { return _options.at(tile); }
  std::size_t size() const { return _options.size(); }

  /// Intersects the options of `tile` with `mask`, then propagates. Returns
  /// the other tiles whose options shrank. Throws Contradiction.
  std::set<TileAddress> restrict(const TileAddress& tile, std::uint64_t mask);

  /// Restricts `tile` to the single `variant`.
  std::set<TileAddress> collapse(const TileAddress& tile, std::size_t variant);

  /// Arc-consistency wave from `seeds` to a fixpoint. Returns tiles whose
  /// options shrank, excluding the seeds. Throws Contradiction.
  std::set<TileAddress> propagate(const std::vector<TileAddress>& seeds);

  const std::unordered_map<TileAddress, std::uint64_t, TileAddressHash>& all() const
  {
    return _options;
  }

private:
  const Catalog* _catalog;
  std::unordered_map<TileAddress, std::uint64_t, TileAddressHash> _options;
};

//==============================================================================
struct BiomeTag
{
  std::size_t biome;
  std::size_t depth;

  bool operator==(const BiomeTag&) const = default;
};

struct TileContent
{
  std::size_t variant;
  std::size_t biome;

  bool operator==(const TileContent&) const = default;
};

struct Decision
{
  enum class Kind { Collapse, Exclude };

  Kind kind = Kind::Collapse;
  /// Index into WorldState::batches.
  std::size_t batch = 0;
  TileAddress tile;
  std::size_t variant = 0;
  /// Biome seeded at this tile just before collapsing, if it had none.
  std::optional<std::size_t> seeded_biome;
  /// Entropy of the tile when it was selected.
  double entropy = 0.0;
  /// Lowest entropy among all then-uncollapsed tiles.
  double min_entropy = 0.0;

  bool operator==(const Decision&) const = default;
};

struct WorldState
{
  std::uint64_t seed = 0;
  /// Collapsed tiles.
  std::map<TileAddress, TileContent> contents;
  /// Biome of every tile that has one, including tiles bordering the region.
  std::map<TileAddress, BiomeTag> biomes;
  /// Tile sets in the order they were requested from generate and extend.
  std::vector<std::vector<TileAddress>> batches;
  std::vector<Decision> log;
  std::uint64_t draws = 0;
  std::size_t backtracks = 0;

  bool operator==(const WorldState&) const = default;
};

struct WorldgenOptions
{
  std::size_t biome_depth = 3;
  std::size_t undo_budget = 10000;
  EntropyMode entropy = EntropyMode::Shannon;

  bool operator==(const WorldgenOptions&) const = default;
};

/// Collapses every tile of `region`. Tiles are selected by lowest entropy,
/// ties broken by a draw hashed from (seed, address, draw counter). Throws
/// std::invalid_argument for an empty or disconnected region and
/// Unsatisfiable when backtracking is exhausted.
WorldState generate(
  const std::vector<TileAddress>& region,
  const Catalog& catalog,
  std::uint64_t seed,
  const WorldgenOptions& options = {});

/// Collapses `new_tiles` around an existing world, whose collapsed tiles act
/// as fixed constraints and are never changed. Tiles already collapsed are
/// skipped. Throws Unsatisfiable.
WorldState extend(
  const WorldState& world,
  const std::vector<TileAddress>& new_tiles,
  const Catalog& catalog,
  const WorldgenOptions& options = {});

/// Biome of each region tile, seeding on demand in region order and
/// flooding to biome-less neighbours with decreasing depth.
std::map<TileAddress, BiomeTag> assign_biomes(
  const std::vector<TileAddress>& region,
  const Catalog& catalog,
  std::size_t depth,
  std::uint64_t seed);

/// Rebuilds a world by applying the decisions of `log` batch by batch,
/// without drawing any random numbers.
WorldState replay(
  const std::vector<std::vector<TileAddress>>& batches,
  const std::vector<Decision>& log,
  const Catalog& catalog,
  std::uint64_t seed,
  const WorldgenOptions& options = {});

nlohmann::json world_to_json(const WorldState& world, const Catalog& catalog);
WorldState world_from_json(const nlohmann::json& j, const Catalog& catalog);

} // namespace holonomy

#endif // HOLONOMY__WORLDGEN_HPP
