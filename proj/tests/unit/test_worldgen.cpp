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

#include <holonomy/worldgen.hpp>

#include <doctest.h>

#include <cmath>
#include <set>

using namespace holonomy;

namespace {

TileAddress A(const char* text) { return TileAddress::parse(text); }

ObjectKind uniform(const std::string& name, const std::string& label, double weight = 1.0)
{
  return ObjectKind{name, weight, {label, label, label, label}, {}, false};
}

Catalog one_biome(std::vector<ObjectKind> objects, std::vector<std::pair<std::string, std::string>> complements = {})
{
  return Catalog(std::move(objects), {{"any", 0}}, std::move(complements));
}

// Tabs (x) fit only slots (y), so tab and slot tiles must alternate. Plain
// tiles (z) fit only themselves.
Catalog alternating(bool with_plain)
{
  std::vector<ObjectKind> objects{uniform("tab", "x", 10.0), uniform("slot", "y", 10.0)};
  if (with_plain)
    objects.push_back(uniform("plain", "z", 1.0));
  return one_biome(objects, {{"x", "y"}});
}

std::size_t variant_of(const Catalog& c, const std::string& object, int orientation = 0)
{
  return *c.variant_index(*c.object_index(object), EdgeIndex(orientation));
}

} // namespace

TEST_SUITE("worldgen")
{
  TEST_CASE("forest catalog")
  {
    const Catalog c = Catalog::forest();
    CHECK(c.objects().size() == 9);
    CHECK(c.biomes().size() == 2);
    CHECK(c.variants().size() == 22);
    CHECK(c.fits("creek", "creek"));
    CHECK_FALSE(c.fits("creek", "grass"));

    const Catalog again = Catalog::from_json(c.to_json());
    CHECK(again.variants().size() == c.variants().size());
    CHECK(again.to_json() == c.to_json());
  }

  TEST_CASE("catalog validation")
  {
    CHECK_THROWS_AS(Catalog({{"a", 0.0, {"x", "x", "x", "x"}, {}, false}}, {{"any", 0}}), std::invalid_argument);
    CHECK_THROWS_AS(Catalog({{"a", 1.0, {"x", "x", "x", "x"}, {"nowhere"}, false}}, {{"any", 0}}), std::invalid_argument);
    std::vector<ObjectKind> many;
    for (int i = 0; i < 17; ++i)
      many.push_back({"o" + std::to_string(i), 1.0, {"a", "b", "c", "d"}, {}, true});
    CHECK_THROWS_AS(Catalog(many, {{"any", 0}}), std::invalid_argument);
    CHECK_THROWS(Catalog::from_json(nlohmann::json{{"objects", {{{"name", "a"}, {"connectors", {"x"}}}}}}));
  }

  TEST_CASE("complement labels")
  {
    const Catalog c = alternating(true);
    CHECK(c.fits("x", "y"));
    CHECK(c.fits("y", "x"));
    CHECK_FALSE(c.fits("x", "x"));
    CHECK(c.fits("z", "z"));
    CHECK_FALSE(c.fits("z", "x"));
  }

  TEST_CASE("entropy")
  {
    const Catalog c = one_biome({uniform("light", "x", 1.0), uniform("heavy", "x", 3.0), uniform("other", "x", 1.0)});
    CHECK(entropy(0b001, c) == doctest::Approx(0.0));
    CHECK(entropy(0b101, c) == doctest::Approx(std::log(2.0)));
    CHECK(entropy(0b011, c) == doctest::Approx(-(0.25 * std::log(0.25) + 0.75 * std::log(0.75))));
    CHECK(entropy(0b011, c, EntropyMode::OptionCount) == doctest::Approx(std::log(2.0)));
    CHECK_THROWS_AS(entropy(0, c), std::invalid_argument);
  }

  TEST_CASE("wave propagation")
  {
    SUBCASE("compatible neighbours are untouched")
    {
      const Catalog c = one_biome({uniform("a", "x"), uniform("b", "x")});
      Wave w(c);
      w.add(A("O"), c.all_options());
      w.add(A("N"), c.all_options());
      CHECK(w.collapse(A("O"), 0).empty());
      CHECK(w.options(A("N")) == c.all_options());
    }
    SUBCASE("an incompatible option is removed")
    {
      const Catalog c = one_biome({uniform("a", "x"), uniform("b", "y")});
      Wave w(c);
      w.add(A("O"), c.all_options());
      w.add(A("N"), c.all_options());
      CHECK(w.collapse(A("O"), 0) == std::set<TileAddress>{A("N")});
      CHECK(w.options(A("N")) == 0b01);
    }
    SUBCASE("creek constraints travel along a chain")
    {
      const Catalog c = one_biome({
        uniform("grass", "g"),
        {"creek", 1.0, {"c", "g", "c", "g"}, {}, true}});
      REQUIRE(c.variants().size() == 3);
      const std::vector<TileAddress> chain{A("O"), A("N"), A("Nf"), A("Nff")};
      Wave w(c);
      for (const auto& t : chain)
        w.add(t, c.all_options());
      const std::size_t vertical = variant_of(c, "creek", 0);
      const auto changed = w.collapse(A("O"), vertical);
      CHECK(changed == std::set<TileAddress>{A("N"), A("Nf"), A("Nff")});
      for (const auto& t : chain)
        CHECK(w.options(t) == 1ull << vertical);
    }
    SUBCASE("contradiction")
    {
      const Catalog c = one_biome({uniform("a", "x"), uniform("b", "y")});
      Wave w(c);
      w.add(A("O"), c.all_options());
      w.add(A("N"), 0b10);
      CHECK_THROWS_AS(w.collapse(A("O"), 0), Contradiction);
    }
  }

  TEST_CASE("uniform catalog collapses everywhere to its object")
  {
    const Catalog c = one_biome({uniform("only", "x")});
    const WorldState w = generate(tiles_within(TileAddress::origin(), 2), c, 4);
    CHECK(w.contents.size() == 17);
    for (const auto& [t, content] : w.contents)
      CHECK(content.variant == 0);
    CHECK(w.backtracks == 0);
  }

  TEST_CASE("forest over radius 4 passes the audit")
  {
    const Catalog c = Catalog::forest();
    const auto region = tiles_within(TileAddress::origin(), 4);
    for (std::uint64_t seed : {1ull, 2ull, 3ull})
    {
      const WorldState w = generate(region, c, seed);
      CHECK(w.contents.size() == region.size());
      CHECK(oracle::audit_world(w, c).empty());

      // Log halves come in pairs joined at their log edge.
      const std::size_t log = *c.object_index("log_half");
      for (const auto& [t, content] : w.contents)
      {
        const Variant& v = c.variants()[content.variant];
        if (v.object != log)
          continue;
        const int e = v.orientation.value();
        const TileAddress n = neighbors(t)[static_cast<std::size_t>(e)];
        const auto other = w.contents.find(n);
        if (other == w.contents.end())
          continue;
        const Variant& u = c.variants()[other->second.variant];
        CHECK(u.object == log);
        CHECK(u.orientation == *edge_toward(n, t));
      }
    }
  }

  TEST_CASE("log halves stay paired across extension")
  {
    const Catalog c = Catalog::forest();
    const std::size_t log = *c.object_index("log_half");
    std::size_t seen = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed)
    {
      WorldState w = generate(tiles_within(TileAddress::origin(), 1), c, seed);
      w = extend(w, tiles_within(TileAddress::origin(), 3), c);
      CHECK(oracle::audit_world(w, c).empty());
      for (const auto& [t, content] : w.contents)
      {
        const Variant& v = c.variants()[content.variant];
        if (v.object != log || tile_distance(TileAddress::origin(), t) > 2)
          continue;
        ++seen;
        const TileAddress n = neighbors(t)[static_cast<std::size_t>(v.orientation.value())];
        REQUIRE(w.contents.contains(n));
        CHECK(c.variants()[w.contents.at(n).variant].object == log);
      }
    }
    CHECK(seen > 0);
  }

  TEST_CASE("backtracking out of a greedy trap")
  {
    const Catalog c = alternating(true);
    const auto ring = oracle::vertex_cycle(TileAddress::origin(), 0);
    REQUIRE(ring.size() == 5);
    // Five tiles round a corner form an odd cycle: only the plain tiling works.
    REQUIRE(oracle::count_solutions(ring, c) == 1);

    std::optional<WorldState> trapped;
    for (std::uint64_t seed = 0; seed < 50 && !trapped; ++seed)
    {
      WorldState w = generate(ring, c, seed);
      if (w.backtracks > 0)
        trapped = w;
    }
    REQUIRE(trapped.has_value());
    CHECK(oracle::audit_world(*trapped, c).empty());
    for (const auto& [t, content] : trapped->contents)
      CHECK(content.variant == variant_of(c, "plain"));

    // The failed choice is excluded and another option is tried on that tile.
    const auto ex = std::find_if(trapped->log.begin(), trapped->log.end(),
      [](const Decision& d) { return d.kind == Decision::Kind::Exclude; });
    REQUIRE(ex != trapped->log.end());
    const bool retried = std::any_of(ex, trapped->log.end(), [&](const Decision& d)
      { return d.kind == Decision::Kind::Collapse && d.tile == ex->tile && d.variant != ex->variant; })
      || trapped->contents.at(ex->tile).variant != ex->variant;
    CHECK(retried);

    // Replaying the log rebuilds the same world without search.
    const WorldState again = replay(trapped->batches, trapped->log, c, trapped->seed);
    CHECK(again.contents == trapped->contents);
  }

  TEST_CASE("unsatisfiable fixtures")
  {
    SUBCASE("odd cycle of tabs and slots")
    {
      const Catalog c = alternating(false);
      const auto ring = oracle::vertex_cycle(TileAddress::origin(), 2);
      REQUIRE(oracle::count_solutions(ring, c) == 0);
      CHECK_THROWS_AS(generate(ring, c, 1), Unsatisfiable);
    }
    SUBCASE("mixed fixed boundary")
    {
      const Catalog c = one_biome({uniform("a", "p"), uniform("b", "q")});
      WorldState w;
      w.seed = 3;
      w.contents[A("O")] = TileContent{0, 0};
      w.contents[A("Nf")] = TileContent{1, 0};
      w.biomes[A("O")] = BiomeTag{0, 0};
      w.biomes[A("Nf")] = BiomeTag{0, 0};
      CHECK_THROWS_AS(extend(w, {A("N")}, c), Unsatisfiable);
    }
    SUBCASE("undo budget")
    {
      const Catalog c = alternating(false);
      WorldgenOptions o;
      o.undo_budget = 1;
      CHECK_THROWS_AS(generate(oracle::vertex_cycle(TileAddress::origin(), 1), c, 1, o), Unsatisfiable);
    }
  }

  TEST_CASE("region checks")
  {
    const Catalog c = Catalog::forest();
    CHECK_THROWS_AS(generate({}, c, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate({A("O"), A("Nf")}, c, 1), std::invalid_argument);
  }

  TEST_CASE("biomes")
  {
    SUBCASE("single biome")
    {
      const Catalog c = one_biome({uniform("a", "x"), uniform("b", "x")});
      const WorldState w = generate(tiles_within(TileAddress::origin(), 2), c, 9);
      for (const auto& [t, tag] : w.biomes)
        CHECK(tag.biome == 0);
    }
    SUBCASE("deep flood covers the region")
    {
      WorldgenOptions o;
      o.biome_depth = 50;
      const WorldState w = generate(tiles_within(TileAddress::origin(), 3), Catalog::forest(), 5, o);
      std::set<std::size_t> kinds;
      for (const auto& [t, content] : w.contents)
        kinds.insert(content.biome);
      CHECK(kinds.size() == 1);
    }
    SUBCASE("shallow floods form patches around their seeds")
    {
      WorldgenOptions o;
      o.biome_depth = 2;
      const Catalog c = Catalog::forest();
      const auto region = tiles_within(TileAddress::origin(), 4);
      const WorldState w = generate(region, c, 6, o);
      std::set<TileAddress> seeds;
      for (const auto& d : w.log)
      {
        if (d.seeded_biome)
          seeds.insert(d.tile);
      }
      CHECK(seeds.size() > 1);
      for (const auto& t : region)
      {
        REQUIRE(w.biomes.contains(t));
        const BiomeTag tag = w.biomes.at(t);
        CHECK(tag.depth <= 2);
        if (seeds.contains(t))
        {
          CHECK(tag.depth == 2);
          continue;
        }
        // Flooded tiles hang off a deeper tile of the same biome.
        const auto nbrs = neighbors(t);
        CHECK(std::any_of(nbrs.begin(), nbrs.end(), [&](const TileAddress& n)
          {
            const auto it = w.biomes.find(n);
            return it != w.biomes.end() && it->second.biome == tag.biome && it->second.depth == tag.depth + 1;
          }));
      }
    }
    SUBCASE("assign_biomes is total")
    {
      const auto region = tiles_within(A("E"), 3);
      const auto tags = assign_biomes(region, Catalog::forest(), 2, 12);
      for (const auto& t : region)
        CHECK(tags.contains(t));
    }
  }

  TEST_CASE("extension")
  {
    const Catalog c = Catalog::forest();
    const WorldState base = generate(tiles_within(TileAddress::origin(), 2), c, 17);
    CHECK(extend(base, {}, c) == base);
    CHECK(extend(base, tiles_within(TileAddress::origin(), 1), c) == base);

    const WorldState grown = extend(base, tiles_within(TileAddress::origin(), 3), c);
    for (const auto& [t, content] : base.contents)
      CHECK(grown.contents.at(t) == content);
    CHECK(grown.contents.size() == tiles_within(TileAddress::origin(), 3).size());
    CHECK(oracle::audit_world(grown, c).empty());

    CHECK_THROWS_AS(extend(base, {A("Nfff")}, c), std::invalid_argument);
  }

  TEST_CASE("determinism and replay")
  {
    const Catalog c = Catalog::forest();
    const auto visit = [&](std::uint64_t seed)
      {
        WorldState w = generate(tiles_within(TileAddress::origin(), 2), c, seed);
        w = extend(w, tiles_within(A("N"), 2), c);
        return extend(w, tiles_within(A("Nf"), 2), c);
      };
    const WorldState a = visit(42);
    CHECK(a == visit(42));
    CHECK(a.contents != visit(43).contents);

    const WorldState r = replay(a.batches, a.log, c, a.seed);
    CHECK(r.contents == a.contents);
    CHECK(r.biomes == a.biomes);
    CHECK(r.log == a.log);
    CHECK(world_from_json(world_to_json(a, c), c) == a);
  }
}
