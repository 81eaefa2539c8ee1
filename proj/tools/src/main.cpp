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


#include <holonomy/server.hpp>
#include <holonomy/service.hpp>

#include <CLI11.hpp>
#include <httplib.h>

#include <atomic>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace {

using namespace holonomy;
using nlohmann::json;

constexpr int exit_unsatisfiable = 2;
constexpr int exit_protocol = 3;

std::atomic<bool> g_stop{false};

std::uint64_t seed_from_env()
{
  const char* text = std::getenv("HOLONOMY_SEED");
  if (text == nullptr || *text == '\0')
    return 0;
  try
  {
    return std::stoull(text, nullptr, 0);
  }
  catch (const std::exception&)
  {
    throw std::invalid_argument(std::string("HOLONOMY_SEED is not an integer: ") + text);
  }
}

std::vector<TileAddress> parse_tiles(const std::vector<std::string>& texts)
{
  std::vector<TileAddress> out;
  for (const auto& t : texts)
    out.push_back(TileAddress::parse(t));
  return out;
}

Catalog load_catalog(const std::string& path)
{
  if (path.empty())
    return Catalog::forest();
  std::ifstream in(path);
  if (!in)
    throw std::invalid_argument("cannot read catalog '" + path + "'");
  return Catalog::from_json(json::parse(in));
}

WalkerState parse_start(const std::string& text)
{
  if (text.empty())
    return initial_state();
  if (text.find(':') != std::string::npos)
    return WalkerState::parse(text);
  WalkerState s = initial_state();
  s.tile = TileAddress::parse(text);
  return s;
}

json path_json(const Path& p, const SearchStats& stats)
{
  json j = to_json(p);
  j["expanded"] = stats.expanded;
  return j;
}

void write_output(const std::string& path, const std::string& text)
{
  if (path.empty() || path == "-")
  {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out)
    throw std::invalid_argument("cannot write '" + path + "'");
  out << text;
}

/// Applies a move script to a fresh session; hedge collisions are fatal.
Session scripted_session(const SessionConfig& config, const Catalog& catalog, const std::string& script)
{
  Session s = new_session(config, catalog);
  for (Move m : moves_from_string(script))
    do_move(s, m, catalog);
  return s;
}

void print_room(std::ostream& out, const Session& s)
{
  // Row 2 (north) first.
  for (int row = 2; row >= 0; --row)
  {
    out << "  ";
    for (int col = 0; col <= 2; ++col)
    {
      const Cell c{row, col};
      if (c == s.walker.cell)
        out << "^>v<"[static_cast<int>(s.walker.heading)];
      else
        out << '.';
    }
    out << '\n';
  }
  out << "state " << s.walker.to_string()
      << "  steps " << s.step_counter
      << "  remaining " << remaining_targets(s).size()
      << (s.complete ? "  COMPLETE" : "") << '\n';
}

int run_walk(const SessionConfig& config, const Catalog& catalog, std::istream& in, bool echo)
{
  Session s = new_session(config, catalog);
  std::cout << "session " << s.id << '\n';
  print_room(std::cout, s);
  std::string line;
  while ((echo && std::cout << "> " << std::flush), std::getline(in, line))
  {
    std::istringstream words(line);
    std::string word;
    words >> word;
    if (word.empty())
      continue;
    if (word == "q" || word == "quit")
      break;
    if (word == "guide")
    {
      const Guidance g = get_guidance(s);
      std::cout << "guide " << (g.path.moves.empty() ? "-" : g.path.to_string())
                << "  optimal " << g.optimal_steps << (g.exact ? "" : " (lower bound)") << '\n';
      continue;
    }
    if (word == "save")
    {
      std::cout << save(s, catalog).dump() << '\n';
      continue;
    }
    try
    {
      for (Move m : moves_from_string(word))
        do_move(s, m, catalog);
    }
    catch (const ServiceError& e)
    {
      std::cout << "error " << e.code() << ": " << e.what() << '\n';
    }
    catch (const std::invalid_argument& e)
    {
      std::cout << "error: " << e.what() << " (moves are L, R, F; also guide, save, quit)\n";
    }
    print_room(std::cout, s);
  }
  return 0;
}

int run_serve(Service& service, bool stdio, int port, int http_port, const std::string& host)
{
  std::signal(SIGINT, [](int) { g_stop = true; });
  std::signal(SIGTERM, [](int) { g_stop = true; });

  if (stdio)
    return serve_stream(service, std::cin, std::cout) == 0 ? 0 : exit_protocol;

  httplib::Server http;
  std::thread http_thread;
  if (http_port >= 0)
  {
    register_http(http, service);
    const int bound = http_port == 0 ? http.bind_to_any_port(host) : (http.bind_to_port(host, http_port) ? http_port : -1);
    if (bound < 0)
      throw std::runtime_error("cannot bind http port " + std::to_string(http_port));
    std::cerr << "http listening on " << host << ":" << bound << '\n';
    http_thread = std::thread([&http] { http.listen_after_bind(); });
  }

  if (port >= 0)
  {
    serve_tcp(service, host, port, g_stop, [&host](int p)
      { std::cerr << "stream listening on " << host << ":" << p << '\n'; });
  }
  else
  {
    while (!g_stop)
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
  }

  if (http_thread.joinable())
  {
    http.stop();
    http_thread.join();
  }
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Navigation engine for the order-5 square tiling of the hyperbolic plane"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string catalog_path;
  app.add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { seed = v; seed_given = true; },
    "Seed (default: $HOLONOMY_SEED, else 0)");
  app.add_option("--catalog", catalog_path, "Object catalog JSON (default: built-in forest)");

  // solve
  std::string from;
  std::string to;
  std::size_t budget = 0;
  bool symmetry = false;
  auto* solve = app.add_subcommand("solve", "Shortest move sequence to a tile");
  solve->add_option("--from", from, "Start: walker state (Nr:2:11:N) or tile address");
  solve->add_option("--to", to, "Goal tile address")->required();
  solve->add_option("--budget", budget, "Expansion budget; 0 searches exactly");
  solve->add_flag("--symmetry", symmetry, "Compress room rotations");

  // tour
  std::vector<std::string> objectives;
  std::string final;
  auto* tour = app.add_subcommand("tour", "Shortest walk visiting several tiles");
  tour->add_option("--from", from, "Start: walker state or tile address");
  tour->add_option("--objective,-o", objectives, "Objective tile (repeatable)")->required();
  tour->add_option("--final", final, "Objective to visit last");
  tour->add_flag("--symmetry", symmetry, "Compress room rotations");

  // gen
  std::size_t radius = 3;
  std::string center = "O";
  std::string out_path;
  std::size_t biome_depth = WorldgenOptions{}.biome_depth;
  auto* gen = app.add_subcommand("gen", "Populate a disk of tiles");
  gen->add_option("--radius", radius, "Disk radius in tiles");
  gen->add_option("--center", center, "Disk centre tile");
  gen->add_option("--biome-depth", biome_depth, "Biome flood depth");
  gen->add_option("--out", out_path, "Output file (default stdout)");

  // map
  std::string moves;
  std::vector<std::string> flags;
  bool with_path = false;
  std::string mode = "find-flag";
  auto* map = app.add_subcommand("map", "Export the mini-map as SVG");
  map->add_option("--moves", moves, "Move script applied first (e.g. FFRF)");
  map->add_option("--flag", flags, "Fixed flag tile (repeatable); default drawn from the seed");
  map->add_option("--mode", mode, "find-flag or keys-and-chest");
  map->add_flag("--path", with_path, "Overlay the guidance path");
  map->add_option("--out", out_path, "Output file (default stdout)");

  // walk
  std::string script;
  auto* walk = app.add_subcommand("walk", "Interactive walk in the terminal");
  walk->add_option("--mode", mode, "find-flag or keys-and-chest");
  walk->add_option("--script", script, "Read commands from this file instead of stdin");

  // serve
  bool stdio = false;
  int port = -1;
  int http_port = -1;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "Serve the JSON protocol");
  serve->add_flag("--stdio", stdio, "Line-delimited JSON on stdin/stdout");
  serve->add_option("--port", port, "Line-delimited JSON over TCP (0 = any)");
  serve->add_option("--http-port", http_port, "HTTP endpoints (0 = any)");
  serve->add_option("--host", host, "Bind address");

  CLI11_PARSE(app, argc, argv);

  try
  {
    if (!seed_given)
      seed = seed_from_env();
    const Catalog catalog = load_catalog(catalog_path);
    SearchOptions search;
    search.use_symmetry = symmetry;

    if (*solve)
    {
      SearchStats stats;
      const WalkerState start = parse_start(from);
      const TileAddress goal = TileAddress::parse(to);
      const Path p = budget == 0
        ? astar(start, goal, search, &stats)
        : astar_anytime(start, goal, SearchBudget{budget}, search, &stats);
      std::cout << path_json(p, stats).dump() << '\n';
    }
    else if (*tour)
    {
      SearchStats stats;
      std::optional<TileAddress> last;
      if (!final.empty())
        last = TileAddress::parse(final);
      const Tour t = plan_tour(parse_start(from), parse_tiles(objectives), last, search, &stats);
      json j = path_json(t.path, stats);
      j["legs"] = json::array();
      for (const auto& leg : t.legs)
        j["legs"].push_back({
          {"objective", leg.objective.to_string()},
          {"moves", moves_to_string(leg.moves)},
          {"forward_steps", leg.forward_steps}});
      std::cout << j.dump() << '\n';
    }
    else if (*gen)
    {
      WorldgenOptions options;
      options.biome_depth = biome_depth;
      const WorldState world = generate(tiles_within(TileAddress::parse(center), radius), catalog, seed, options);
      write_output(out_path, world_to_json(world, catalog).dump(1) + "\n");
    }
    else if (*map)
    {
      SessionConfig config;
      config.seed = seed;
      config.mode = game_mode_from_string(mode);
      for (const auto& t : parse_tiles(flags))
        config.objectives.push_back({t, Role::Flag, false});
      const Session s = scripted_session(config, catalog, moves);
      std::optional<Guidance> g;
      if (with_path)
        g = get_guidance(s);
      write_output(out_path, minimap_svg(minimap(s, catalog, g ? &*g : nullptr)));
    }
    else if (*walk)
    {
      SessionConfig config;
      config.seed = seed;
      config.mode = game_mode_from_string(mode);
      if (script.empty())
        return run_walk(config, catalog, std::cin, true);
      std::ifstream in(script);
      if (!in)
        throw std::invalid_argument("cannot read script '" + script + "'");
      return run_walk(config, catalog, in, false);
    }
    else if (*serve)
    {
      if (!stdio && port < 0 && http_port < 0)
        throw std::invalid_argument("serve needs --stdio, --port or --http-port");
      Service service(catalog, seed);
      return run_serve(service, stdio, port, http_port, host);
    }
  }
  catch (const Unsatisfiable& e)
  {
    std::cerr << "unsatisfiable: " << e.what() << '\n';
    return exit_unsatisfiable;
  }
  catch (const ServiceError& e)
  {
    std::cerr << e.code() << ": " << e.what() << '\n';
    return exit_protocol;
  }
  catch (const std::invalid_argument& e)
  {
    std::cerr << "invalid input: " << e.what() << '\n';
    return exit_protocol;
  }
  catch (const json::exception& e)
  {
    std::cerr << "invalid input: " << e.what() << '\n';
    return exit_protocol;
  }
  catch (const OutOfBounds& e)
  {
    std::cerr << "out-of-bounds: " << e.what() << '\n';
    return exit_protocol;
  }
  return 0;
}
