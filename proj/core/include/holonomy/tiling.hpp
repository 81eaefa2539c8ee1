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

#ifndef HOLONOMY__TILING_HPP
#define HOLONOMY__TILING_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace holonomy {

//==============================================================================
/// First symbol of a tile address: which of the four origin edges was crossed.
/// Values are listed in right-rotation order.
enum class Branch : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

/// Relative move taken from a tile, measured against the direction in which
/// the tile was entered from its spanning-tree parent.
enum class Step : std::uint8_t { F = 0, L = 1, R = 2 };

Branch rotate_right(Branch b);
Branch rotate_left(Branch b);

/// r(L) = F, r(F) = R. Rotating R to the right is undefined and throws.
Step rotate_right(Step s);

/// l(R) = F, l(F) = L. Rotating L to the left is undefined and throws.
Step rotate_left(Step s);

char to_char(Branch b);
char to_char(Step s);

//==============================================================================
/// Index of one of a tile's four edges. Indices run in the rightward
/// (clockwise in the standard embedding) cyclic order. For a non-origin tile
/// edge 0 leads to the spanning-tree parent, 1 is left, 2 is forward and 3 is
/// right, relative to the direction the tile was entered from its parent. For
/// the origin, edge k leads to branch k (N, E, S, W).
class EdgeIndex
{
public:
  constexpr EdgeIndex() = default;
  constexpr explicit EdgeIndex(int value)
  : _value(static_cast<std::uint8_t>(((value % 4) + 4) % 4))
  {
  }

  constexpr int value() const { return _value; }
  constexpr EdgeIndex opposite() const { return EdgeIndex(_value + 2); }
  constexpr EdgeIndex plus(int k) const { return EdgeIndex(_value + k); }

  constexpr auto operator<=>(const EdgeIndex&) const = default;

private:
  std::uint8_t _value = 0;
};

//==============================================================================
/// Canonical spanning-tree index of a square of the {4,5} tiling.
///
/// Either the origin, or a branch followed by a sequence of relative steps.
/// Instances built through the public factories are always canonical: every
/// step is valid given its prefix.
class TileAddress
{
public:
  /// The origin tile.
  TileAddress() = default;

  static TileAddress origin() { return TileAddress(); }

  /// Returns the canonical address reached by walking `steps` from the root of
  /// `branch`. Equivalent to normalize().
  static TileAddress from_walk(Branch branch, std::span<const Step> steps);

  /// Parses the text form: "O" for the origin, otherwise a branch letter
  /// followed by lowercase steps, e.g. "Nrf". Non-canonical input is
  /// normalized. Throws std::invalid_argument on malformed text.
  static TileAddress parse(std::string_view text);

  bool is_origin() const { return !_branch.has_value(); }

  /// Branch of a non-origin tile. Throws std::logic_error for the origin.
  Branch branch() const;

  const std::vector<Step>& steps() const { return _steps; }

  /// Tree depth: the number of symbols in the address, 0 for the origin. An
  /// upper bound on the graph distance to the origin.
  std::size_t depth() const
  {
    return is_origin() ? 0 : _steps.size() + 1;
  }

  std::string to_string() const;

  bool operator==(const TileAddress& other) const = default;

  /// Orders by text form.
  std::strong_ordering operator<=>(const TileAddress& other) const;

  std::size_t hash() const;

private:
  friend struct AddressAccess;

  TileAddress(Branch branch, std::vector<Step> steps)
  : _branch(branch), _steps(std::move(steps))
  {
  }

  std::optional<Branch> _branch;
  std::vector<Step> _steps;
};

struct TileAddressHash
{
  std::size_t operator()(const TileAddress& a) const { return a.hash(); }
};

//==============================================================================
/// True iff appending `next` to the valid sequence `steps` keeps it valid.
bool is_valid_step(std::span<const Step> steps, Step next);

/// True iff every step of `steps` is valid given its prefix.
bool is_valid_sequence(std::span<const Step> steps);

/// Canonical address of the tile reached from the root of `branch` by the walk
/// `steps`, where each step turns relative to the current direction of travel.
///
/// A canonical prefix followed by one invalid step collapses through a single
/// rewrite; arbitrary sequences are folded one step at a time, tracking the
/// offset between the direction of travel and the canonical frame of the
/// tile being walked through.
TileAddress normalize(Branch branch, std::span<const Step> steps);

/// Appends one step to a canonical address, collapsing the result with the
/// rewrite rules when the step is invalid. The origin has no step frame and is
/// rejected with std::invalid_argument.
TileAddress append_step(const TileAddress& addr, Step step);

/// The four adjacent tiles, indexed by EdgeIndex.
std::array<TileAddress, 4> neighbors(const TileAddress& addr);

/// Index of `of` in neighbors(addr), if adjacent.
std::optional<EdgeIndex> edge_toward(const TileAddress& addr, const TileAddress& of);

/// Spanning-tree parent; std::nullopt for the origin.
std::optional<TileAddress> parent(const TileAddress& addr);

/// Exact graph distance in the tile adjacency graph.
///
/// Computed by bidirectional breadth-first search and memoized in a bounded,
/// mutex-guarded LRU cache shared by all threads.
std::size_t tile_distance(const TileAddress& a, const TileAddress& b);

/// All tiles at graph distance <= radius from `center`, ordered by distance
/// and then by text form.
std::vector<TileAddress> tiles_within(const TileAddress& center, std::size_t radius);

/// Same as tiles_within, paired with each tile's distance to `center`.
std::vector<std::pair<TileAddress, std::size_t>> tiles_within_with_distance(
  const TileAddress& center, std::size_t radius);

/// Drops every entry of the shared tile_distance memo.
void clear_distance_cache();

//==============================================================================
/// Lazily grown multi-source breadth-first distance field.
///
/// distance(t) returns min over sources of the graph distance to t, growing
/// the search frontier one ring at a time until t is labelled. Not
/// thread-safe; intended to be owned by a single search.
class DistanceField
{
public:
  explicit DistanceField(std::vector<TileAddress> sources);

  std::size_t distance(const TileAddress& tile);

  /// Radius up to which every tile is labelled.
  std::size_t settled_radius() const { return _radius; }

  std::size_t labelled() const { return _dist.size(); }

  const std::vector<TileAddress>& sources() const { return _sources; }

private:
  void grow();

  std::vector<TileAddress> _sources;
  std::unordered_map<TileAddress, std::size_t, TileAddressHash> _dist;
  std::vector<TileAddress> _frontier;
  std::size_t _radius = 0;
};

/// Maps `tile` through the rotation of the tiling by `quarter_turns` quarter
/// turns about the centre of `anchor`. Edge k of `anchor` is carried to edge
/// k + quarter_turns.
TileAddress rotate_about(
  const TileAddress& anchor, int quarter_turns, const TileAddress& tile);

} // namespace holonomy

template<>
struct std::hash<holonomy::TileAddress>
{
  std::size_t operator()(const holonomy::TileAddress& a) const noexcept
  {
    return a.hash();
  }
};

#endif // HOLONOMY__TILING_HPP
