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


#include <holonomy/service.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace holonomy {

namespace {

using nlohmann::json;

std::uint64_t mix(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::string hex(std::uint64_t v)
{
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

} // namespace

//==============================================================================
std::string to_string(GameMode m)
{
  return m == GameMode::FindFlag ? "find-flag" : "keys-and-chest";
}

std::string to_string(Role r)
{
  switch (r)
  {
    case Role::Flag: return "flag";
    case Role::Key: return "key";
    case Role::Chest: return "chest";
  }
  return "flag";
}

GameMode game_mode_from_string(const std::string& s)
{
  if (s == "find-flag")
    return GameMode::FindFlag;
  if (s == "keys-and-chest")
    return GameMode::KeysAndChest;
  throw ServiceError("invalid-config", "unknown mode '" + s + "'");
}

Role role_from_string(const std::string& s)
{
  if (s == "flag")
    return Role::Flag;
  if (s == "key")
    return Role::Key;
  if (s == "chest")
    return Role::Chest;
  throw ServiceError("invalid-config", "unknown objective role '" + s + "'");
}

ServiceError::ServiceError(std::string code, const std::string& message)
: std::runtime_error(message), _code(std::move(code))
{
}

//==============================================================================
namespace {

void validate_objectives(const std::vector<Objective>& objectives, GameMode mode)
{
  std::size_t flags = 0;
  std::size_t keys = 0;
  std::size_t chests = 0;
  for (const auto& o : objectives)
  {
    flags += o.role == Role::Flag;
    keys += o.role == Role::Key;
    chests += o.role == Role::Chest;
  }
  for (std::size_t i = 0; i < objectives.size(); ++i)
    for (std::size_t j = i + 1; j < objectives.size(); ++j)
      if (objectives[i].tile == objectives[j].tile)
        throw ServiceError("invalid-config", "two objectives share tile " + objectives[i].tile.to_string());

  if (objectives.size() > max_tour_objectives)
    throw ServiceError("invalid-config", "too many objectives");
  if (mode == GameMode::FindFlag && (flags == 0 || keys + chests > 0))
    throw ServiceError("invalid-config", "find-flag needs flag objectives only");
  if (mode == GameMode::KeysAndChest && (chests != 1 || keys == 0 || flags > 0))
    throw ServiceError("invalid-config", "keys-and-chest needs keys and exactly one chest");
}

std::vector<Objective> draw_objectives(const SessionConfig& c)
{
  std::vector<TileAddress> candidates;
  for (const auto& [tile, d] : tiles_within_with_distance(TileAddress::origin(), c.max_distance))
  {
    if (d >= c.min_distance)
      candidates.push_back(tile);
  }

  const std::size_t wanted = c.mode == GameMode::FindFlag ? 1 : c.keys + 1;
  if (candidates.size() < wanted)
    throw ServiceError("invalid-config", "not enough tiles in the objective distance band");

  std::vector<Objective> out;
  std::uint64_t state = mix(c.seed ^ 0x6f626a6563746976ull);
  while (out.size() < wanted)
  {
    state = mix(state);
    const TileAddress& t = candidates[state % candidates.size()];
    if (std::any_of(out.begin(), out.end(), [&](const Objective& o) { return o.tile == t; }))
      continue;
    Role role = Role::Flag;
    if (c.mode == GameMode::KeysAndChest)
      role = out.size() + 1 == wanted ? Role::Chest : Role::Key;
    out.push_back(Objective{t, role, false});
  }
  return out;
}

void visit(Session& s)
{
  const auto keys_done = [&s]
    {
      return std::all_of(s.objectives.begin(), s.objectives.end(),
        [](const Objective& o) { return o.role != Role::Key || o.collected; });
    };

  for (auto& o : s.objectives)
  {
    if (o.collected || o.tile != s.walker.tile)
      continue;
    if (o.role == Role::Chest && !keys_done())
      continue;
    o.collected = true;
  }

  s.complete = std::all_of(s.objectives.begin(), s.objectives.end(),
    [](const Objective& o) { return o.collected; });
}

// Eligible targets for the arrow and far guidance: keys before the chest.
std::vector<TileAddress> eligible_targets(const Session& s)
{
  std::vector<TileAddress> keys;
  std::vector<TileAddress> rest;
  for (const auto& o : s.objectives)
  {
    if (o.collected)
      continue;
    (o.role == Role::Key ? keys : rest).push_back(o.tile);
  }
  return keys.empty() ? rest : keys;
}

std::optional<TileAddress> nearest(const TileAddress& from, const std::vector<TileAddress>& targets)
{
  std::optional<TileAddress> best;
  std::size_t best_d = 0;
  for (const auto& t : targets)
  {
    const std::size_t d = tile_distance(from, t);
    if (!best || d < best_d || (d == best_d && t < *best))
    {
      best = t;
      best_d = d;
    }
  }
  return best;
}

std::vector<TileAddress> view_region(const Session& s)
{
  return tiles_within(s.walker.tile, s.config.view_radius);
}

} // namespace

Session new_session(const SessionConfig& config, const Catalog& catalog)
{
  if (config.view_radius == 0)
    throw ServiceError("invalid-config", "view_radius must be positive");
  if (config.min_distance > config.max_distance)
    throw ServiceError("invalid-config", "min_distance exceeds max_distance");
  if (config.anytime_budget == 0)
    throw ServiceError("invalid-config", "anytime_budget must be positive");
  if (config.mode == GameMode::KeysAndChest
    && (config.keys == 0 || config.keys + 1 > max_tour_objectives))
  {
    throw ServiceError("invalid-config", "keys must be between 1 and 5");
  }

  Session s;
  s.config = config;
  s.mode = config.mode;
  s.id = "s" + hex(mix(config.seed ^ 0x73657373696f6eull));
  s.objectives = config.objectives.empty() ? draw_objectives(config) : config.objectives;
  for (auto& o : s.objectives)
    o.collected = false;
  validate_objectives(s.objectives, config.mode);

  s.walker = initial_state();
  s.world = generate(view_region(s), catalog, config.seed, config.worldgen);
  visit(s);
  return s;
}

std::vector<TileAddress> remaining_targets(const Session& s)
{
  std::vector<TileAddress> out;
  std::optional<TileAddress> chest;
  for (const auto& o : s.objectives)
  {
    if (o.collected)
      continue;
    if (o.role == Role::Chest)
      chest = o.tile;
    else
      out.push_back(o.tile);
  }
  if (chest)
    out.push_back(*chest);
  return out;
}

void do_move(Session& s, Move m, const Catalog& catalog)
{
  if (!is_legal(s.walker, m))
    throw ServiceError("out-of-bounds", OutOfBounds(s.walker).what());

  Session next = s;
  next.walker = apply_move(s.walker, m);
  next.history.push_back(m);
  ++next.version;
  if (m == Move::StepForward)
  {
    ++next.step_counter;
    next.world = extend(next.world, view_region(next), catalog, next.config.worldgen);
    visit(next);
  }
  s = std::move(next);
}

//==============================================================================
MinimapFrame minimap(const Session& s, const Catalog& catalog, const Guidance* guidance)
{
  const double pi = std::numbers::pi;
  const Isometry view = Isometry::rotation(pi / 2.0 - edge_angle(s.walker.facing));

  MinimapFrame frame;
  frame.center = s.walker.tile;
  frame.radius = s.config.view_radius;

  std::vector<TileAddress> targets = remaining_targets(s);
  if (targets.empty())
  {
    for (const auto& o : s.objectives)
      targets.push_back(o.tile);
  }
  const auto hotcold = hotcold_field(s.walker.tile, frame.radius, targets);

  for (const auto& tile : tiles_within(s.walker.tile, frame.radius))
  {
    const Isometry placed = view * relative_frame(s.walker.tile, tile);
    MinimapTile mt;
    mt.address = tile;
    mt.polygon = tile_polygon(placed, 4);
    mt.center = to_poincare(tile_center(placed));
    mt.hotcold = hotcold.at(tile);
    if (const auto it = s.world.biomes.find(tile); it != s.world.biomes.end())
      mt.biome = catalog.biomes().at(it->second.biome).name;
    if (const auto it = s.world.contents.find(tile); it != s.world.contents.end())
    {
      const auto& v = catalog.variants().at(it->second.variant);
      mt.object = catalog.objects()[v.object].name;
      mt.orientation = v.orientation.value();
    }
    for (const auto& o : s.objectives)
    {
      if (o.tile == tile && !o.collected)
        mt.objective = o.role;
    }
    frame.tiles.push_back(std::move(mt));
  }

  if (const auto goal = nearest(s.walker.tile, eligible_targets(s)); goal && *goal != s.walker.tile)
    frame.direction_arrow = direction_angle(s.walker.tile, s.walker.facing, *goal);

  if (guidance)
  {
    std::vector<DiskPoint> overlay{DiskPoint{0.0, 0.0}};
    WalkerState w = s.walker;
    for (const Move m : guidance->path.moves)
    {
      w = apply_move(w, m);
      if (m == Move::StepForward)
        overlay.push_back(to_poincare(tile_center(view * relative_frame(s.walker.tile, w.tile))));
    }
    frame.path_overlay = std::move(overlay);
  }
  return frame;
}

Guidance get_guidance(const Session& s)
{
  Guidance g;
  g.version = s.version;

  const auto targets = remaining_targets(s);
  if (targets.empty())
  {
    g.path.complete = true;
    return g;
  }

  SearchOptions options;
  options.use_symmetry = s.config.use_symmetry;

  std::size_t farthest = 0;
  for (const auto& t : targets)
    farthest = std::max(farthest, heuristic(s.walker, t));

  if (farthest <= s.config.guidance_threshold)
  {
    if (targets.size() == 1)
    {
      g.path = astar(s.walker, targets.front(), options);
    }
    else
    {
      std::optional<TileAddress> chest;
      for (const auto& o : s.objectives)
      {
        if (o.role == Role::Chest && !o.collected)
          chest = o.tile;
      }
      Tour tour = plan_tour(s.walker, targets, chest, options);
      g.path = std::move(tour.path);
      g.legs = std::move(tour.legs);
    }
    g.optimal_steps = g.path.forward_steps;
    g.exact = true;
    return g;
  }

  const TileAddress goal = *nearest(s.walker.tile, eligible_targets(s));
  g.path = astar_anytime(s.walker, goal, SearchBudget{s.config.anytime_budget}, options);
  g.exact = g.path.complete && targets.size() == 1;
  g.optimal_steps = g.exact ? g.path.forward_steps : heuristic(s.walker, goal);
  return g;
}

//==============================================================================
namespace {

json objective_to_json(const Objective& o)
{
  return {{"tile", o.tile.to_string()}, {"role", to_string(o.role)}, {"collected", o.collected}};
}

Objective objective_from_json(const json& j)
{
  return Objective{
    TileAddress::parse(j.at("tile").get<std::string>()),
    role_from_string(j.at("role").get<std::string>()),
    j.value("collected", false)};
}

json point_json(const DiskPoint& p)
{
  return json::array({p.u, p.v});
}

} // namespace

nlohmann::json config_to_json(const SessionConfig& c)
{
  json objectives = json::array();
  for (const auto& o : c.objectives)
    objectives.push_back({{"tile", o.tile.to_string()}, {"role", to_string(o.role)}});
  return {
    {"seed", c.seed},
    {"mode", to_string(c.mode)},
    {"objectives", objectives},
    {"keys", c.keys},
    {"min_distance", c.min_distance},
    {"max_distance", c.max_distance},
    {"view_radius", c.view_radius},
    {"guidance_threshold", c.guidance_threshold},
    {"anytime_budget", c.anytime_budget},
    {"use_symmetry", c.use_symmetry},
    {"biome_depth", c.worldgen.biome_depth},
    {"undo_budget", c.worldgen.undo_budget},
    {"entropy", c.worldgen.entropy == EntropyMode::Shannon ? "shannon" : "count"}};
}

SessionConfig config_from_json(const nlohmann::json& j, std::uint64_t default_seed)
{
  if (!j.is_object())
    throw ServiceError("invalid-config", "config must be an object");

  SessionConfig c;
  try
  {
    c.seed = j.value("seed", default_seed);
    c.mode = game_mode_from_string(j.value("mode", std::string("find-flag")));
    for (const auto& o : j.value("objectives", json::array()))
      c.objectives.push_back(objective_from_json(o));
    c.keys = j.value("keys", c.keys);
    c.min_distance = j.value("min_distance", c.min_distance);
    c.max_distance = j.value("max_distance", c.max_distance);
    c.view_radius = j.value("view_radius", c.view_radius);
    c.guidance_threshold = j.value("guidance_threshold", c.guidance_threshold);
    c.anytime_budget = j.value("anytime_budget", c.anytime_budget);
    c.use_symmetry = j.value("use_symmetry", c.use_symmetry);
    c.worldgen.biome_depth = j.value("biome_depth", c.worldgen.biome_depth);
    c.worldgen.undo_budget = j.value("undo_budget", c.worldgen.undo_budget);
    const std::string ent = j.value("entropy", std::string("shannon"));
    if (ent != "shannon" && ent != "count")
      throw ServiceError("invalid-config", "entropy must be 'shannon' or 'count'");
    c.worldgen.entropy = ent == "shannon" ? EntropyMode::Shannon : EntropyMode::OptionCount;
  }
  catch (const json::exception& e)
  {
    throw ServiceError("invalid-config", e.what());
  }
  catch (const std::invalid_argument& e)
  {
    throw ServiceError("invalid-config", e.what());
  }
  if (c.worldgen.biome_depth == 0)
    throw ServiceError("invalid-config", "biome_depth must be at least 1");
  return c;
}

nlohmann::json to_json(const Path& p)
{
  return {
    {"moves", p.to_string()},
    {"forward_steps", p.forward_steps},
    {"complete", p.complete}};
}

nlohmann::json to_json(const Guidance& g)
{
  json legs = json::array();
  for (const auto& leg : g.legs)
  {
    legs.push_back({
      {"objective", leg.objective.to_string()},
      {"moves", moves_to_string(leg.moves)},
      {"forward_steps", leg.forward_steps}});
  }
  return {
    {"path", to_json(g.path)},
    {"optimal_steps", g.optimal_steps},
    {"exact", g.exact},
    {"legs", legs},
    {"version", g.version}};
}

nlohmann::json to_json(const MinimapFrame& f)
{
  json tiles = json::array();
  for (const auto& t : f.tiles)
  {
    json polygon = json::array();
    for (const auto& p : t.polygon)
      polygon.push_back(point_json(p));
    json entry = {
      {"address", t.address.to_string()},
      {"polygon", polygon},
      {"center", point_json(t.center)},
      {"hotcold", t.hotcold},
      {"biome", t.biome ? json(*t.biome) : json(nullptr)},
      {"object", t.object ? json(*t.object) : json(nullptr)},
      {"orientation", t.orientation},
      {"objective", t.objective ? json(to_string(*t.objective)) : json(nullptr)}};
    tiles.push_back(std::move(entry));
  }

  json overlay = nullptr;
  if (f.path_overlay)
  {
    overlay = json::array();
    for (const auto& p : *f.path_overlay)
      overlay.push_back(point_json(p));
  }

  return {
    {"center", f.center.to_string()},
    {"radius", f.radius},
    {"tiles", tiles},
    {"path_overlay", overlay},
    {"direction_arrow", f.direction_arrow ? json(*f.direction_arrow) : json(nullptr)}};
}

nlohmann::json session_summary(const Session& s)
{
  json objectives = json::array();
  for (const auto& o : s.objectives)
    objectives.push_back(objective_to_json(o));
  return {
    {"id", s.id},
    {"mode", to_string(s.mode)},
    {"walker", s.walker.to_string()},
    {"tile", s.walker.tile.to_string()},
    {"facing", s.walker.facing.value()},
    {"cell", json::array({s.walker.cell.row, s.walker.cell.col})},
    {"heading", std::string(1, to_char(s.walker.heading))},
    {"step_counter", s.step_counter},
    {"elapsed", s.elapsed},
    {"complete", s.complete},
    {"objectives", objectives},
    {"history", moves_to_string(s.history)},
    {"version", s.version}};
}

//==============================================================================
nlohmann::json save(const Session& s, const Catalog& catalog)
{
  json objectives = json::array();
  for (const auto& o : s.objectives)
    objectives.push_back(objective_to_json(o));

  return {
    {"format", "holonomy-session"},
    {"version", session_format_version},
    {"session", {
      {"id", s.id},
      {"config", config_to_json(s.config)},
      {"walker", s.walker.to_string()},
      {"world", world_to_json(s.world, catalog)},
      {"objectives", objectives},
      {"step_counter", s.step_counter},
      {"elapsed", s.elapsed},
      {"mode", to_string(s.mode)},
      {"complete", s.complete},
      {"history", moves_to_string(s.history)},
      {"version", s.version}}}};
}

Session load(const nlohmann::json& doc, const Catalog& catalog)
{
  if (!doc.is_object() || doc.value("format", std::string()) != "holonomy-session")
    throw ServiceError("malformed-document", "not a holonomy session document");
  if (!doc.contains("version") || !doc.at("version").is_number_integer())
    throw ServiceError("malformed-document", "missing document version");
  if (doc.at("version").get<int>() != session_format_version)
  {
    throw ServiceError("version-mismatch",
      "unsupported session document version " + doc.at("version").dump());
  }

  try
  {
    const json& j = doc.at("session");
    Session s;
    s.id = j.at("id").get<std::string>();
    s.config = config_from_json(j.at("config"), 0);
    s.walker = WalkerState::parse(j.at("walker").get<std::string>());
    s.world = world_from_json(j.at("world"), catalog);
    for (const auto& o : j.at("objectives"))
      s.objectives.push_back(objective_from_json(o));
    s.step_counter = j.at("step_counter").get<std::size_t>();
    s.elapsed = j.at("elapsed").get<double>();
    s.mode = game_mode_from_string(j.at("mode").get<std::string>());
    s.complete = j.at("complete").get<bool>();
    s.history = moves_from_string(j.at("history").get<std::string>());
    s.version = j.at("version").get<std::uint64_t>();

    const auto forward = static_cast<std::size_t>(
      std::count(s.history.begin(), s.history.end(), Move::StepForward));
    if (forward != s.step_counter)
      throw ServiceError("malformed-document", "step_counter disagrees with the move history");
    if (apply_moves(initial_state(), s.history) != s.walker)
      throw ServiceError("malformed-document", "walker disagrees with the move history");
    validate_objectives(s.objectives, s.mode);
    return s;
  }
  catch (const ServiceError& e)
  {
    if (e.code() == "malformed-document")
      throw;
    throw ServiceError("malformed-document", e.what());
  }
  catch (const std::exception& e)
  {
    throw ServiceError("malformed-document", e.what());
  }
}

//==============================================================================
namespace {

std::string fixed(double v, int decimals)
{
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  // Avoid "-0.00" so golden files do not depend on the sign of tiny values.
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos)
    s.erase(0, 1);
  return s;
}

std::string hotcold_color(std::size_t d, std::size_t max)
{
  const double t = max == 0 ? 1.0 : std::min(1.0, static_cast<double>(d) / static_cast<double>(max));
  const double hue = 240.0 * t;
  const double sat = 0.75;
  const double light = 0.5;
  const double c = (1.0 - std::abs(2.0 * light - 1.0)) * sat;
  const double hp = hue / 60.0;
  const double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double r = 0, g = 0, b = 0;
  if (hp < 1) { r = c; g = x; }
  else if (hp < 2) { r = x; g = c; }
  else if (hp < 3) { g = c; b = x; }
  else { g = x; b = c; }
  const double m = light - c / 2.0;
  const auto to_byte = [m](double v) { return static_cast<int>(std::lround((v + m) * 255.0)); };
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", to_byte(r), to_byte(g), to_byte(b));
  return buf;
}

} // namespace

std::string minimap_svg(const MinimapFrame& frame, const SvgOptions& options)
{
  const int dp = options.decimals;
  const auto px = [dp](const DiskPoint& p)
    {
      return fixed(500.0 + 500.0 * p.u, dp) + "," + fixed(500.0 - 500.0 * p.v, dp);
    };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" viewBox=\"0 0 1000 1000\">\n";
  out += "<circle cx=\"500\" cy=\"500\" r=\"500\" fill=\"#10131c\"/>\n";
  out += "<g stroke=\"#1b1f2a\" stroke-width=\"1.5\" stroke-linejoin=\"round\">\n";
  for (const auto& t : frame.tiles)
  {
    out += "<polygon data-address=\"" + t.address.to_string() + "\" data-hotcold=\""
      + std::to_string(t.hotcold) + "\"";
    if (t.object)
      out += " data-object=\"" + *t.object + "\"";
    out += " fill=\"" + hotcold_color(t.hotcold, options.hotcold_max) + "\" points=\"";
    for (std::size_t i = 0; i < t.polygon.size(); ++i)
    {
      if (i)
        out += ' ';
      out += px(t.polygon[i]);
    }
    out += "\"/>\n";
  }
  out += "</g>\n";

  for (const auto& t : frame.tiles)
  {
    if (!t.objective)
      continue;
    const double r = 18.0 * (1.0 - t.center.norm() * t.center.norm());
    out += "<circle data-objective=\"" + to_string(*t.objective) + "\" cx=\""
      + fixed(500.0 + 500.0 * t.center.u, dp) + "\" cy=\"" + fixed(500.0 - 500.0 * t.center.v, dp)
      + "\" r=\"" + fixed(r, dp) + "\" fill=\"#ffd23f\" stroke=\"#000\"/>\n";
  }

  if (frame.path_overlay && frame.path_overlay->size() > 1)
  {
    out += "<polyline fill=\"none\" stroke=\"#ffffff\" stroke-width=\"4\" points=\"";
    for (std::size_t i = 0; i < frame.path_overlay->size(); ++i)
    {
      if (i)
        out += ' ';
      out += px((*frame.path_overlay)[i]);
    }
    out += "\"/>\n";
  }

  // Walker marker pointing up, along the facing edge.
  out += "<polygon fill=\"#ffffff\" points=\"500.00,470.00 485.00,520.00 515.00,520.00\"/>\n";

  if (frame.direction_arrow)
  {
    const double a = *frame.direction_arrow;
    const DiskPoint tip{-std::sin(a) * 0.2, std::cos(a) * 0.2};
    out += "<line stroke=\"#ffd23f\" stroke-width=\"6\" x1=\"500.00\" y1=\"500.00\" x2=\""
      + fixed(500.0 + 500.0 * tip.u, dp) + "\" y2=\"" + fixed(500.0 - 500.0 * tip.v, dp) + "\"/>\n";
  }

  out += "</svg>\n";
  return out;
}

//==============================================================================
Service::Service(Catalog catalog, std::uint64_t default_seed)
: _catalog(std::move(catalog)), _default_seed(default_seed)
{
}

std::size_t Service::subscribe(FrameListener listener)
{
  std::lock_guard<std::mutex> lock(_mutex);
  const std::size_t token = _next_listener++;
  _listeners.emplace(token, std::move(listener));
  return token;
}

void Service::unsubscribe(std::size_t token)
{
  std::lock_guard<std::mutex> lock(_mutex);
  _listeners.erase(token);
}

std::shared_ptr<Service::Entry> Service::find(const std::string& id) const
{
  std::lock_guard<std::mutex> lock(_mutex);
  const auto it = _sessions.find(id);
  if (it == _sessions.end())
    throw ServiceError("unknown-session", "no session '" + id + "'");
  return it->second;
}

std::string Service::insert(Session session)
{
  std::lock_guard<std::mutex> lock(_mutex);
  const std::string base = session.id;
  for (int n = 2; _sessions.contains(session.id); ++n)
    session.id = base + "-" + std::to_string(n);
  auto entry = std::make_shared<Entry>();
  const std::string id = session.id;
  entry->session = std::move(session);
  _sessions[id] = std::move(entry);
  return id;
}

Session Service::snapshot(const std::string& id) const
{
  const auto entry = find(id);
  std::shared_lock<std::shared_mutex> lock(entry->mutex);
  return entry->session;
}

nlohmann::json Service::handle(const nlohmann::json& request)
{
  const auto failure = [&request](const std::string& code, const std::string& message)
    {
      json r = {{"ok", false}, {"error", {{"code", code}, {"message", message}}}};
      if (request.is_object() && request.contains("id"))
        r["id"] = request.at("id");
      return r;
    };

  try
  {
    if (!request.is_object() || !request.contains("op") || !request.at("op").is_string())
      throw ServiceError("bad-request", "a request is an object with a string 'op'");

    const std::string op = request.at("op").get<std::string>();
    json response;
    if (op == "new-session")
      response = op_new_session(request);
    else if (op == "move")
      response = op_move(request);
    else if (op == "state")
      response = op_state(request);
    else if (op == "guidance")
      response = op_guidance(request);
    else if (op == "minimap")
      response = op_minimap(request);
    else if (op == "save")
      response = op_save(request);
    else if (op == "load")
      response = op_load(request);
    else
      throw ServiceError("bad-request", "unknown op '" + op + "'");

    response["ok"] = true;
    if (request.contains("id"))
      response["id"] = request.at("id");
    return response;
  }
  catch (const ServiceError& e)
  {
    json r = failure(e.code(), e.what());
    if (e.code() == "out-of-bounds")
      r["error"]["hedge"] = true;
    return r;
  }
  catch (const Unsatisfiable& e)
  {
    json r = failure("unsatisfiable", e.what());
    r["error"]["tile"] = e.tile().to_string();
    return r;
  }
  catch (const json::exception& e)
  {
    return failure("bad-request", e.what());
  }
  catch (const std::invalid_argument& e)
  {
    return failure("bad-request", e.what());
  }
}

namespace {

std::string session_id(const json& req)
{
  if (!req.contains("session") || !req.at("session").is_string())
    throw ServiceError("bad-request", "missing 'session'");
  return req.at("session").get<std::string>();
}

} // namespace

json Service::op_new_session(const json& req)
{
  const SessionConfig config = config_from_json(req.value("config", json::object()), _default_seed);
  Session s = new_session(config, _catalog);
  const std::string id = insert(std::move(s));
  const Session snap = snapshot(id);
  return {{"session", session_summary(snap)}, {"frame", to_json(minimap(snap, _catalog))}};
}

json Service::op_move(const json& req)
{
  const auto entry = find(session_id(req));
  std::string text;
  if (req.contains("move"))
    text = req.at("move").get<std::string>();
  else if (req.contains("moves"))
    text = req.at("moves").get<std::string>();
  else
    throw ServiceError("bad-request", "missing 'move'");

  std::vector<Move> moves;
  try
  {
    moves = moves_from_string(text);
  }
  catch (const std::invalid_argument& e)
  {
    throw ServiceError("bad-request", e.what());
  }

  Session updated;
  json frame;
  {
    std::unique_lock<std::shared_mutex> lock(entry->mutex);
    updated = entry->session;
    for (const Move m : moves)
      do_move(updated, m, _catalog);
    if (req.contains("elapsed"))
      updated.elapsed = req.at("elapsed").get<double>();
    entry->session = updated;
    frame = to_json(minimap(updated, _catalog));
  }

  std::map<std::size_t, FrameListener> listeners;
  {
    std::lock_guard<std::mutex> lock(_mutex);
    listeners = _listeners;
  }
  for (const auto& [token, listener] : listeners)
    listener(updated.id, frame);

  return {{"session", session_summary(updated)}, {"frame", frame}};
}

json Service::op_state(const json& req)
{
  return {{"session", session_summary(snapshot(session_id(req)))}};
}

json Service::op_guidance(const json& req)
{
  const auto entry = find(session_id(req));
  Session snap;
  {
    std::shared_lock<std::shared_mutex> lock(entry->mutex);
    snap = entry->session;
  }

  // Computed outside the lock; a move that lands meanwhile invalidates it.
  const Guidance g = get_guidance(snap);

  std::shared_lock<std::shared_mutex> lock(entry->mutex);
  if (entry->session.version != g.version)
    throw ServiceError("stale-guidance", "the session moved while guidance was computed");
  return {{"guidance", to_json(g)}};
}

json Service::op_minimap(const json& req)
{
  const Session snap = snapshot(session_id(req));
  std::optional<Guidance> g;
  if (req.value("with_path", false))
    g = get_guidance(snap);
  const MinimapFrame frame = minimap(snap, _catalog, g ? &*g : nullptr);
  json out = {{"frame", to_json(frame)}};
  if (req.value("svg", false))
    out["svg"] = minimap_svg(frame);
  return out;
}

json Service::op_save(const json& req)
{
  return {{"document", save(snapshot(session_id(req)), _catalog)}};
}

json Service::op_load(const json& req)
{
  if (!req.contains("document"))
    throw ServiceError("bad-request", "missing 'document'");
  Session s = load(req.at("document"), _catalog);
  {
    std::lock_guard<std::mutex> lock(_mutex);
    if (const auto it = _sessions.find(s.id); it != _sessions.end())
    {
      std::unique_lock<std::shared_mutex> entry_lock(it->second->mutex);
      it->second->session = s;
      return {{"session", session_summary(s)}};
    }
  }
  const std::string id = insert(std::move(s));
  return {{"session", session_summary(snapshot(id))}};
}

} // namespace holonomy
