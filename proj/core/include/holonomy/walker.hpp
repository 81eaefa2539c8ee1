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


#ifndef HOLONOMY__WALKER_HPP
#define HOLONOMY__WALKER_HPP

#include <holonomy/tiling.hpp>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace holonomy {

//==============================================================================
/// Cell of the 3x3 move area. Row 0 is the southern row, column 0 the western
/// column.
struct Cell
{
  int row = 1;
  int col = 1;

  static constexpr int size = 3;

  bool in_bounds() const { return row >= 0 && row < size && col >= 0 && col < size; }
  int index() const { return row * size + col; }
  static Cell from_index(int index) { return {index / size, index % size}; }

  auto operator<=>(const Cell&) const = default;
};

/// Room-fixed compass heading. Values are in right-turn order.
enum class PhysHeading : std::uint8_t { N = 0, E = 1, S = 2, W = 3 };

PhysHeading turned(PhysHeading h, int quarter_turns);
char to_char(PhysHeading h);
PhysHeading heading_from_char(char c);

/// The cell one step ahead of `cell` in direction `h`; may be out of bounds.
Cell cell_ahead(Cell cell, PhysHeading h);

/// Rotates `cell` about the centre of the move area by `quarter_turns`
/// clockwise quarter turns.
Cell rotate_cell(Cell cell, int quarter_turns);

enum class Move : std::uint8_t { TurnLeft = 0, TurnRight = 1, StepForward = 2 };

char to_char(Move m);

/// Parses "L", "R" or "F". Throws std::invalid_argument otherwise.
Move move_from_char(char c);

std::string moves_to_string(const std::vector<Move>& moves);
std::vector<Move> moves_from_string(std::string_view text);

//==============================================================================
/// Coupled virtual and physical state of a walker.
struct WalkerState
{
  TileAddress tile;
  /// Tile edge the walker faces.
  EdgeIndex facing;
  Cell cell;
  PhysHeading heading = PhysHeading::N;

  bool operator==(const WalkerState&) const = default;

  /// Text form "<tile>:<facing>:<row><col>:<heading>", e.g. "Nr:2:11:N".
  std::string to_string() const;
  static WalkerState parse(std::string_view text);
};

struct WalkerStateHash
{
  std::size_t operator()(const WalkerState& s) const;
};

/// Walker standing on the origin tile in the centre cell, facing edge N with
/// the room heading N.
WalkerState initial_state();

/// Raised when a forward step would cross the hedge around the move area.
class OutOfBounds : public std::runtime_error
{
public:
  explicit OutOfBounds(const WalkerState& s);
};

//==============================================================================
WalkerState apply_move(const WalkerState& s, Move m);

/// Applies a sequence of moves, throwing OutOfBounds at the first illegal one.
WalkerState apply_moves(WalkerState s, const std::vector<Move>& moves);

bool is_legal(const WalkerState& s, Move m);

/// Legal moves in the order TurnLeft, TurnRight, StepForward.
std::vector<Move> legal_moves(const WalkerState& s);

struct AccessibleMap
{
  /// Tile reached by developing each cell, vertical leg first.
  std::map<Cell, TileAddress> tiles;
  /// Cells whose horizontal-first development reaches a different tile.
  std::vector<Cell> path_dependent;
};

/// Develops the move area onto the tiling from the walker's cell.
AccessibleMap accessible_tiles(const WalkerState& s);

//==============================================================================
/// Number of classes of the 144 per-tile states under combined room and
/// virtual-frame quarter turns.
inline constexpr int symmetry_class_count = 9;

/// Class of `s` in [0, 9): the move-area cell index after turning the room
/// until the heading is N. Facing is absorbed by the virtual rotation.
/// Throws std::invalid_argument if s.tile != anchor.
int symmetry_class(const WalkerState& s, const TileAddress& anchor);

/// Deterministic representative of a class on `anchor`: facing 0, heading N.
WalkerState symmetry_representative(int cls, const TileAddress& anchor);

/// Applies the room rotation by `quarter_turns` (cell and heading only).
WalkerState rotate_room(const WalkerState& s, int quarter_turns);

/// All 144 states on `tile`, in (facing, cell, heading) order.
std::vector<WalkerState> states_on(const TileAddress& tile);

} // namespace holonomy

#endif // HOLONOMY__WALKER_HPP
