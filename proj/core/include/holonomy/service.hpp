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


#ifndef HOLONOMY__SERVICE_HPP
#define HOLONOMY__SERVICE_HPP

#include <holonomy/geometry.hpp>
#include <holonomy/pathfind.hpp>
#include <holonomy/walker.hpp>
#include <holonomy/worldgen.hpp>

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace holonomy {

//==============================================================================
enum class GameMode { FindFlag, KeysAndChest };
enum class Role { Flag, Key, Chest };

std::string to_string(GameMode m);
std::string to_string(Role r);
GameMode game_mode_from_string(const std::string& s);
Role role_from_string(const std::string& s);

struct Objective
{
  TileAddress tile;
  Role role = Role::Flag;
  bool collected = false;

  bool operator==(const Objective&) const = default;
};

struct SessionConfig
{
  std::uint64_t seed = 0;
  GameMode mode = GameMode::FindFlag;
  /// Explicit objectives. When empty, objectives are drawn from the seed.
  std::vector<Objective> objectives;
  /// Keys drawn in KeysAndChest mode.
  std::size_t keys = 2;
  /// Distance band from the origin for drawn objectives.
  std::size_t min_distance = 2;
  std::size_t max_distance = 4;
  /// Mini-map and world generation radius around the walker.
  std::size_t view_radius = 3;
  /// Objectives farther than this switch guidance to the budgeted search.
  std::size_t guidance_threshold = 8;
  std::size_t anytime_budget = 20000;
  bool use_symmetry = false;
  WorldgenOptions worldgen;

  bool operator==(const SessionConfig&) const = default;
};

struct Session
{
  std::string id;
  SessionConfig config;
  WalkerState walker;
  WorldState world;
  std::vector<Objective> objectives;
  std::size_t step_counter = 0;
  /// Wall-clock seconds, recorded for display only.
  double elapsed = 0.0;
  GameMode mode = GameMode::FindFlag;
  bool complete = false;
  std::vector<Move> history;
  /// Incremented by every accepted move.
  std::uint64_t version = 0;

  bool operator==(const Session&) const = default;
};

/// Raised for requests that cannot be applied; `code` is a stable
/// machine-readable identifier.
class ServiceError : public std::runtime_error
{
public:
  ServiceError(std::string code, const std::string& message);
  const std::string& code() const { return _code; }

private:
  std::string _code;
};

//==============================================================================
struct MinimapTile
{
  TileAddress address;
  /// Poincare-disk outline in the walker's view: walker at the centre, facing
  /// up.
  std::vector<DiskPoint> polygon;
  std::size_t hotcold = 0;
  DiskPoint center;
  std::optional<std::string> biome;
  std::optional<std::string> object;
  int orientation = 0;
  std::optional<Role> objective;
};

struct MinimapFrame
{
  TileAddress center;
  std::size_t radius = 3;
  std::vector<MinimapTile> tiles;
  /// Projected tile centres along the guidance path, starting at the walker.
  std::optional<std::vector<DiskPoint>> path_overlay;
  /// Direction to the nearest remaining objective relative to facing, absent
  /// when the walker stands on it.
  std::optional<double> direction_arrow;
};

struct Guidance
{
  Path path;
  /// Exact optimal forward steps when `exact`, else the tile-distance lower
  /// bound.
  std::size_t optimal_steps = 0;
  bool exact = true;
  std::vector<TourLeg> legs;
  /// Session version the guidance was computed for.
  std::uint64_t version = 0;
};

//==============================================================================
/// Builds a session: walker at the origin in the centre cell, world generated
/// over the view radius, objectives fixed or drawn from the seed. Throws
/// ServiceError("invalid-config") or Unsatisfiable.
Session new_session(const SessionConfig& config, const Catalog& catalog);

/// Objectives still to visit, in the order they may be completed: keys before
/// the chest.
std::vector<TileAddress> remaining_targets(const Session& s);

/// Applies one move. Throws ServiceError("out-of-bounds") for a forward step
/// into the hedge, leaving the session unchanged, and Unsatisfiable if the
/// world cannot be extended.
void do_move(Session& s, Move m, const Catalog& catalog);

MinimapFrame minimap(const Session& s, const Catalog& catalog, const Guidance* guidance = nullptr);

Guidance get_guidance(const Session& s);

nlohmann::json save(const Session& s, const Catalog& catalog);

/// Throws ServiceError("version-mismatch") or ServiceError("malformed-document").
Session load(const nlohmann::json& doc, const Catalog& catalog);

inline constexpr int session_format_version = 1;

//==============================================================================
nlohmann::json to_json(const Path& p);
nlohmann::json to_json(const Guidance& g);
nlohmann::json to_json(const MinimapFrame& f);
nlohmann::json session_summary(const Session& s);

struct SvgOptions
{
  /// Hot-cold distance mapped to pure blue.
  std::size_t hotcold_max = 6;
  int decimals = 2;
};

/// Renders a frame onto a 1000x1000 viewport, unit disk filling the square.
std::string minimap_svg(const MinimapFrame& frame, const SvgOptions& options = {});

//==============================================================================
/// Thread-safe session registry and JSON request dispatcher. Requests are
/// objects {"op": ..., ...}; responses are {"ok": true, ...} or
/// {"ok": false, "error": {"code": ..., "message": ...}}.
class Service
{
public:
  explicit Service(Catalog catalog = Catalog::forest(), std::uint64_t default_seed = 0);

  nlohmann::json handle(const nlohmann::json& request);

  /// Called with (session id, frame) after every accepted move.
  using FrameListener = std::function<void(const std::string&, const nlohmann::json&)>;
  std::size_t subscribe(FrameListener listener);
  void unsubscribe(std::size_t token);

  const Catalog& catalog() const { return _catalog; }

  /// Copy of a stored session. Throws ServiceError("unknown-session").
  Session snapshot(const std::string& id) const;

private:
  struct Entry
  {
    mutable std::shared_mutex mutex;
    Session session;
  };

  std::shared_ptr<Entry> find(const std::string& id) const;
  std::string insert(Session session);

  nlohmann::json op_new_session(const nlohmann::json& req);
  nlohmann::json op_move(const nlohmann::json& req);
  nlohmann::json op_state(const nlohmann::json& req);
  nlohmann::json op_guidance(const nlohmann::json& req);
  nlohmann::json op_minimap(const nlohmann::json& req);
  nlohmann::json op_save(const nlohmann::json& req);
  nlohmann::json op_load(const nlohmann::json& req);

  Catalog _catalog;
  std::uint64_t _default_seed;
  mutable std::mutex _mutex;
  std::map<std::string, std::shared_ptr<Entry>> _sessions;
  std::map<std::size_t, FrameListener> _listeners;
  std::size_t _next_listener = 0;
};

SessionConfig config_from_json(const nlohmann::json& j, std::uint64_t default_seed);
nlohmann::json config_to_json(const SessionConfig& c);

} // namespace holonomy

#endif // HOLONOMY__SERVICE_HPP
