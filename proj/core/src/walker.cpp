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


#include <holonomy/walker.hpp>

#include <algorithm>
#include <set>

namespace holonomy {

PhysHeading turned(PhysHeading h, int quarter_turns)
{
  return static_cast<PhysHeading>((((static_cast<int>(h) + quarter_turns) % 4) + 4) % 4);
}

char to_char(PhysHeading h)
{
  static constexpr char letters[] = {'N', 'E', 'S', 'W'};
  return letters[static_cast<int>(h)];
}

PhysHeading heading_from_char(char c)
{
  switch (c)
  {
    case 'N': return PhysHeading::N;
    case 'E': return PhysHeading::E;
    case 'S': return PhysHeading::S;
    case 'W': return PhysHeading::W;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown heading '") + c + "'");
}

Cell cell_ahead(Cell cell, PhysHeading h)
{
  switch (h)
  {
    case PhysHeading::N: ++cell.row; break;
    case PhysHeading::E: ++cell.col; break;
    case PhysHeading::S: --cell.row; break;
    case PhysHeading::W: --cell.col; break;
  }
  return cell;
}

Cell rotate_cell(Cell cell, int quarter_turns)
{
  int dx = cell.col - 1;
  int dy = cell.row - 1;
  for (int k = ((quarter_turns % 4) + 4) % 4; k > 0; --k)
  {
    const int x = dy;
    dy = -dx;
    dx = x;
  }
  return {dy + 1, dx + 1};
}

char to_char(Move m)
{
  static constexpr char letters[] = {'L', 'R', 'F'};
  return letters[static_cast<int>(m)];
}

Move move_from_char(char c)
{
  switch (c)
  {
    case 'L': return Move::TurnLeft;
    case 'R': return Move::TurnRight;
    case 'F': return Move::StepForward;
    default: break;
  }
  throw std::invalid_argument(std::string("unknown move '") + c + "'");
}

std::string moves_to_string(const std::vector<Move>& moves)
{
  std::string out;
  out.reserve(moves.size());
  for (const Move m : moves)
    out.push_back(to_char(m));
  return out;
}

std::vector<Move> moves_from_string(std::string_view text)
{
  std::vector<Move> out;
  out.reserve(text.size());
  for (const char c : text)
    out.push_back(move_from_char(c));
  return out;
}

//==============================================================================
std::string WalkerState::to_string() const
{
  std::string out = tile.to_string();
  out += ':';
  out += static_cast<char>('0' + facing.value());
  out += ':';
  out += static_cast<char>('0' + cell.row);
  out += static_cast<char>('0' + cell.col);
  out += ':';
  out += to_char(heading);
  return out;
}

WalkerState WalkerState::parse(std::string_view text)
{
  const auto bad = [&text]
    {
      return std::invalid_argument("malformed walker state '" + std::string(text) + "'");
    };

  const auto colon = text.find(':');
  if (colon == std::string_view::npos || text.size() != colon + 7
    || text[colon + 2] != ':' || text[colon + 5] != ':')
  {
    throw bad();
  }

  const char f = text[colon + 1];
  const char r = text[colon + 3];
  const char c = text[colon + 4];
  if (f < '0' || f > '3' || r < '0' || r > '2' || c < '0' || c > '2')
    throw bad();

  WalkerState s;
  s.tile = TileAddress::parse(text.substr(0, colon));
  s.facing = EdgeIndex(f - '0');
  s.cell = {r - '0', c - '0'};
  s.heading = heading_from_char(text[colon + 6]);
  return s;
}

std::size_t WalkerStateHash::operator()(const WalkerState& s) const
{
  const std::size_t local = static_cast<std::size_t>(
    (s.facing.value() * 9 + s.cell.index()) * 4 + static_cast<int>(s.heading));
  return s.tile.hash() * 1000003u ^ local;
}

WalkerState initial_state()
{
  return WalkerState{};
}

OutOfBounds::OutOfBounds(const WalkerState& s)
: std::runtime_error(
    "a hedge blocks the way: cell (" + std::to_string(s.cell.row) + ","
    + std::to_string(s.cell.col) + ") heading " + to_char(s.heading)
    + " is at the edge of the move area")
{
}

//==============================================================================
WalkerState apply_move(const WalkerState& s, Move m)
{
  WalkerState out = s;
  switch (m)
  {
    case Move::TurnLeft:
      out.facing = s.facing.plus(-1);
      out.heading = turned(s.heading, -1);
      return out;
    case Move::TurnRight:
      out.facing = s.facing.plus(1);
      out.heading = turned(s.heading, 1);
      return out;
    case Move::StepForward:
      break;
  }

  const Cell next = cell_ahead(s.cell, s.heading);
  if (!next.in_bounds())
    throw OutOfBounds(s);

  out.tile = neighbors(s.tile)[static_cast<std::size_t>(s.facing.value())];
  out.facing = edge_toward(out.tile, s.tile)->opposite();
  out.cell = next;
  return out;
}

WalkerState apply_moves(WalkerState s, const std::vector<Move>& moves)
{
  for (const Move m : moves)
    s = apply_move(s, m);
  return s;
}

bool is_legal(const WalkerState& s, Move m)
{
  return m != Move::StepForward || cell_ahead(s.cell, s.heading).in_bounds();
}

std::vector<Move> legal_moves(const WalkerState& s)
{
  std::vector<Move> out{Move::TurnLeft, Move::TurnRight};
  if (is_legal(s, Move::StepForward))
    out.push_back(Move::StepForward);
  return out;
}

//==============================================================================
namespace {

struct Developer
{
  TileAddress tile;
  EdgeIndex facing;
  PhysHeading heading;

  void go(PhysHeading direction)
  {
    const int turn = static_cast<int>(direction) - static_cast<int>(heading);
    facing = facing.plus(turn);
    heading = direction;
    TileAddress next = neighbors(tile)[static_cast<std::size_t>(facing.value())];
    facing = edge_toward(next, tile)->opposite();
    tile = std::move(next);
  }
};

TileAddress develop(const WalkerState& s, Cell target, bool vertical_first)
{
  Developer d{s.tile, s.facing, s.heading};
  const auto vertical = [&]
    {
      for (int r = s.cell.row; r != target.row; r += (target.row > r ? 1 : -1))
        d.go(target.row > r ? PhysHeading::N : PhysHeading::S);
    };
  const auto horizontal = [&]
    {
      for (int c = s.cell.col; c != target.col; c += (target.col > c ? 1 : -1))
        d.go(target.col > c ? PhysHeading::E : PhysHeading::W);
    };

  if (vertical_first)
  {
    vertical();
    horizontal();
  }
  else
  {
    horizontal();
    vertical();
  }
  return d.tile;
}

} // namespace

AccessibleMap accessible_tiles(const WalkerState& s)
{
  AccessibleMap out;
  for (int i = 0; i < Cell::size * Cell::size; ++i)
  {
    const Cell target = Cell::from_index(i);
    TileAddress a = develop(s, target, true);
    if (develop(s, target, false) != a)
      out.path_dependent.push_back(target);
    out.tiles.emplace(target, std::move(a));
  }
  return out;
}

//==============================================================================
WalkerState rotate_room(const WalkerState& s, int quarter_turns)
{
  WalkerState out = s;
  out.cell = rotate_cell(s.cell, quarter_turns);
  out.heading = turned(s.heading, quarter_turns);
  return out;
}

int symmetry_class(const WalkerState& s, const TileAddress& anchor)
{
  if (s.tile != anchor)
    throw std::invalid_argument("symmetry_class expects a state on the anchor tile");
  return rotate_room(s, -static_cast<int>(s.heading)).cell.index();
}

WalkerState symmetry_representative(int cls, const TileAddress& anchor)
{
  if (cls < 0 || cls >= symmetry_class_count)
    throw std::invalid_argument("symmetry class out of range");
  return WalkerState{anchor, EdgeIndex(0), Cell::from_index(cls), PhysHeading::N};
}

std::vector<WalkerState> states_on(const TileAddress& tile)
{
  std::vector<WalkerState> out;
  out.reserve(144);
  for (int f = 0; f < 4; ++f)
    for (int c = 0; c < 9; ++c)
      for (int h = 0; h < 4; ++h)
        out.push_back({tile, EdgeIndex(f), Cell::from_index(c), static_cast<PhysHeading>(h)});
  return out;
}

} // namespace holonomy
