#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <filesystem>

#include "support.hpp"
#include "xplore/errors.hpp"
#include "xplore/rng.hpp"
#include "xplore/world.hpp"

using namespace xplore;
using xplore::testing::flat_level;
using xplore::testing::object;

namespace {

int tile_index(const TileSet& ts, const std::string& name) {
    for (const auto& t : ts.tiles()) {
        if (t.name == name) return t.id;
    }
    throw std::runtime_error("no tile " + name);
}

// Rotation by +angle from +x toward +z, written independently of rotate_offset.
Vec2 rotate_oracle(Vec2 p, double degrees) {
    const double a = degrees * std::numbers::pi / 180.0;
    return {p.x * std::cos(a) - p.z * std::sin(a), p.x * std::sin(a) + p.z * std::cos(a)};
}

// Breadth-first shortest path length in cells, or -1.
int bfs_cost(const NavGrid& nav, Cell from, Cell to) {
    if (!nav.walkable(from) || !nav.walkable(to)) return -1;
    std::vector<int> dist(static_cast<std::size_t>(kNavCells * kNavCells), -1);
    auto idx = [](Cell c) { return static_cast<std::size_t>(c.iz * kNavCells + c.ix); };
    std::deque<Cell> q{from};
    dist[idx(from)] = 0;
    while (!q.empty()) {
        const Cell c = q.front();
        q.pop_front();
        if (c == to) return dist[idx(c)];
        const Cell next[4] = {{c.ix + 1, c.iz}, {c.ix - 1, c.iz}, {c.ix, c.iz + 1}, {c.ix, c.iz - 1}};
        for (const Cell& n : next) {
            if (!nav.walkable(n) || dist[idx(n)] >= 0) continue;
            dist[idx(n)] = dist[idx(c)] + 1;
            q.push_back(n);
        }
    }
    return -1;
}

}  // namespace

TEST(BuildLevel, FlatEmptyTilesGiveEmptyWalkableWorld) {
    const Level level = flat_level();
    EXPECT_TRUE(level.objects.empty());
    EXPECT_EQ(level.nav.walkable_count(), kNavCells * kNavCells);
    for (int iz = 0; iz < kLatticeSamples; ++iz) {
        for (int ix = 0; ix < kLatticeSamples; ++ix) EXPECT_EQ(level.heightfield.sample(ix, iz), 0.0);
    }
}

TEST(BuildLevel, DecorationAnchorsRotateAboutTileCenter) {
    TileSet ts = default_tileset();
    std::vector<TileDef> tiles = ts.tiles();
    tiles[0].decorations = {{"rock", {10, -5}, {2, 2, 4}, true},
                            {"flower", {-12, 3}, {1, 1, 1}, false},
                            {"crate", {0, 15}, {2, 2, 2}, true}};
    const TileSet custom(tiles, ts.compatibility());

    TileGrid grid = uniform_grid(1);
    grid[2][3] = {0, 90, 2, 3};
    const Level level = build_level(grid, custom, "rot");
    ASSERT_EQ(level.objects.size(), 3u);
    const Vec2 center{3.5 * kTileSize, 2.5 * kTileSize};
    for (std::size_t k = 0; k < 3; ++k) {
        const Vec2 expect = center + rotate_oracle(tiles[0].decorations[k].anchor, 90.0);
        EXPECT_NEAR(level.objects[k].position.x, expect.x, 1e-12);
        EXPECT_NEAR(level.objects[k].position.z, expect.z, 1e-12);
    }
    // Extents swap under a quarter turn.
    EXPECT_DOUBLE_EQ(level.objects[0].size.x, 4.0);
    EXPECT_DOUBLE_EQ(level.objects[0].size.z, 2.0);
}

TEST(BuildLevel, ObjectsRestOnTerrainInsideOneTile) {
    const TileSet ts = default_tileset();
    TileGrid grid = uniform_grid(tile_index(ts, "ruins"));
    grid[1][1] = {tile_index(ts, "hill"), 0, 1, 1};
    grid[4][2] = {tile_index(ts, "house"), 270, 4, 2};
    const Level level = build_level(grid, ts);
    for (const auto& o : level.objects) {
        EXPECT_TRUE(in_bounds(o.position.x, o.position.z));
        EXPECT_NEAR(o.position.y, level.heightfield.at(o.position.x, o.position.z) + o.size.y / 2, 1e-12);
        const int col = static_cast<int>(o.position.x / kTileSize);
        const int row = static_cast<int>(o.position.z / kTileSize);
        EXPECT_EQ(o.id.rfind("r" + std::to_string(row) + "c" + std::to_string(col) + "-", 0), 0u) << o.id;
    }
}

TEST(BuildLevel, CliffNextToFlatPassesWhenEdgesMatch) {
    const TileSet ts = default_tileset();
    TileGrid grid = uniform_grid(0);
    grid[3][3] = {tile_index(ts, "mesa"), 0, 3, 3};
    EXPECT_NO_THROW(build_level(grid, ts));
}

TEST(BuildLevel, MismatchedSocketsListOffendingPairs) {
    const TileSet ts = default_tileset();
    TileGrid grid = uniform_grid(0);
    grid[3][3] = {tile_index(ts, "highland"), 0, 3, 3};
    try {
        build_level(grid, ts);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        // Four neighbours, each failing sockets and heights.
        EXPECT_EQ(e.offenses().size(), 8u);
        for (const auto& o : e.offenses()) {
            const bool touches = (o.row == 3 && o.col == 3) || (o.neighbor_row == 3 && o.neighbor_col == 3);
            EXPECT_TRUE(touches);
        }
    }
}

TEST(BuildLevel, UnknownTileIsStructuralError) {
    TileGrid grid = uniform_grid(0);
    grid[0][0].tile_id = 99;
    EXPECT_THROW(build_level(grid, default_tileset()), StructuralError);
    grid = uniform_grid(0);
    grid[0][0].rotation = 45;
    EXPECT_THROW(build_level(grid, default_tileset()), StructuralError);
}

TEST(BuildLevel, IsDeterministic) {
    const TileSet ts = default_tileset();
    TileGrid grid = uniform_grid(tile_index(ts, "campsite"), 180);
    EXPECT_EQ(build_level(grid, ts), build_level(grid, ts));
}

TEST(Nav, SteepCellsAndBlockingFootprintsAreUnwalkable) {
    const TileSet ts = default_tileset();
    TileGrid grid = uniform_grid(0);
    grid[3][3] = {tile_index(ts, "mesa"), 0, 3, 3};
    const Level cliff = build_level(grid, ts);
    EXPECT_LT(cliff.nav.walkable_count(), kNavCells * kNavCells);

    // A 4x4 box centered on a cell corner touches four cells with positive area.
    const Level boxed = flat_level({object("b", "crate", 100, 100, {4, 4, 4})});
    EXPECT_EQ(boxed.nav.walkable_count(), kNavCells * kNavCells - 4);
    // Exactly one cell wide and aligned: one cell.
    const Level aligned = flat_level({object("b", "crate", 102.5, 102.5, {5, 5, 5})});
    EXPECT_EQ(aligned.nav.walkable_count(), kNavCells * kNavCells - 1);
    // Non-blocking objects never block.
    const Level soft = flat_level({object("f", "flower", 100, 100, {4, 1, 4}, false)});
    EXPECT_EQ(soft.nav.walkable_count(), kNavCells * kNavCells);
}

TEST(Raycast, HorizontalRayOverFlatWorldMisses) {
    const Level level = flat_level();
    for (double max_dist : {1.0, 115.0, 1000.0}) {
        EXPECT_FALSE(raycast(level, {175, 2, 175}, {1, 0, 0}, max_dist));
    }
}

TEST(Raycast, StraightDownHitsGround) {
    const Level level = flat_level();
    const auto hit = raycast(level, {100, 10, 100}, {0, -1, 0}, 50);
    ASSERT_TRUE(hit);
    EXPECT_NEAR(hit->distance, 10.0, kRayMarchStep);
    EXPECT_EQ(hit->kind, HitKind::Terrain);
}

TEST(Raycast, BoxDistanceMatchesAnalyticIntersection) {
    const Level level = flat_level({object("box", "crate", 150, 100, {10, 10, 10})});
    const auto hit = raycast(level, {100, 2, 100}, {1, 0, 0}, 115);
    ASSERT_TRUE(hit);
    EXPECT_EQ(hit->kind, HitKind::Object);
    EXPECT_NEAR(hit->distance, 45.0, 1.0);

    // Oblique rays: entry distance through the near x face, checked analytically.
    Rng rng(5);
    for (int i = 0; i < 200; ++i) {
        const double angle = rng.uniform(-0.09, 0.09);
        const Vec3 dir{std::cos(angle), 0.0, std::sin(angle)};
        const auto h = raycast(level, {100, 2, 100}, dir, 115);
        ASSERT_TRUE(h);
        EXPECT_NEAR(h->distance, 45.0 / std::cos(angle), 1e-9);
    }
}

TEST(Raycast, ShrinkingRangeOnlyTurnsHitIntoMiss) {
    Level level = flat_level({object("box", "crate", 150, 100, {10, 10, 10})});
    xplore::testing::raise_east(level, 250, 6);
    Rng rng(9);
    for (int i = 0; i < 100; ++i) {
        const double yaw = rng.uniform(-30, 30);
        const Vec2 d = yaw_vector(yaw);
        const Vec3 dir{d.x, 0.0, d.z};
        const auto full = raycast(level, {100, 2, 100}, dir, 300);
        const double shorter = rng.uniform(1, 300);
        const auto part = raycast(level, {100, 2, 100}, dir, shorter);
        if (part) {
            ASSERT_TRUE(full);
            EXPECT_NEAR(part->distance, full->distance, 1e-9);
        } else if (full) {
            EXPECT_GT(full->distance, shorter - kRayMarchStep);
        }
    }
}

TEST(Raycast, RejectsBadInput) {
    const Level level = flat_level();
    EXPECT_THROW(raycast(level, {-1, 2, 10}, {1, 0, 0}, 10), DomainError);
    EXPECT_THROW(raycast(level, {10, 2, 10}, {1, 0, 0}, 0), DomainError);
    EXPECT_THROW(raycast(level, {10, 2, 10}, {2, 0, 0}, 10), DomainError);
}

TEST(Raycast, IgnoresChosenObject) {
    const Level level = flat_level({object("box", "crate", 150, 100, {10, 10, 10})});
    EXPECT_FALSE(raycast(level, {100, 2, 100}, {1, 0, 0}, 115, 0));
}

TEST(FindPath, SamePointIsSingleWaypoint) {
    const Level level = flat_level();
    const auto p = find_path(level, {52, 52}, {53, 54});
    ASSERT_TRUE(p);
    EXPECT_EQ(p->cost, 0);
    EXPECT_EQ(p->waypoints.size(), 1u);
}

TEST(FindPath, OpenGridCostIsManhattan) {
    NavGrid nav;
    for (int iz = 0; iz < kNavCells; ++iz) {
        for (int ix = 0; ix < kNavCells; ++ix) nav.set_walkable({ix, iz}, ix < 10 && iz < 10);
    }
    const auto p = find_path(nav, {0, 0}, {9, 9});
    ASSERT_TRUE(p);
    EXPECT_EQ(p->cost, 18);
    EXPECT_EQ(p->waypoints.size(), 19u);
}

TEST(FindPath, CostMatchesBreadthFirstSearchOnRandomGrids) {
    Rng rng(2024);
    int solvable = 0;
    for (int instance = 0; instance < 100; ++instance) {
        NavGrid nav;
        for (int iz = 0; iz < kNavCells; ++iz) {
            for (int ix = 0; ix < kNavCells; ++ix) {
                const bool inside = ix < 30 && iz < 30;
                nav.set_walkable({ix, iz}, inside && rng.uniform() >= 0.2);
            }
        }
        const Cell a{static_cast<int>(rng.below(30)), static_cast<int>(rng.below(30))};
        const Cell b{static_cast<int>(rng.below(30)), static_cast<int>(rng.below(30))};
        nav.set_walkable(a, true);
        nav.set_walkable(b, true);
        const int oracle = bfs_cost(nav, a, b);
        const auto path = find_path(nav, a, b);
        if (oracle < 0) {
            EXPECT_FALSE(path) << "instance " << instance;
            continue;
        }
        ++solvable;
        ASSERT_TRUE(path) << "instance " << instance;
        EXPECT_EQ(path->cost, oracle) << "instance " << instance;
        ASSERT_EQ(path->waypoints.size(), static_cast<std::size_t>(oracle + 1));
        for (std::size_t i = 0; i < path->waypoints.size(); ++i) {
            const Cell c = NavGrid::cell_of(path->waypoints[i].x, path->waypoints[i].z);
            EXPECT_TRUE(nav.walkable(c));
            if (i > 0) {
                const Cell pc = NavGrid::cell_of(path->waypoints[i - 1].x, path->waypoints[i - 1].z);
                EXPECT_EQ(std::abs(c.ix - pc.ix) + std::abs(c.iz - pc.iz), 1);
            }
        }
    }
    EXPECT_GT(solvable, 50);
}

TEST(FindPath, SnapsBlockedEndpointsWithinTwoCells) {
    const Level level = flat_level({object("b", "house", 100, 100, {10, 10, 10})});
    // The house covers cells 19..20 on both axes; its center snaps out.
    EXPECT_TRUE(find_path(level, {100, 100}, {200, 200}));
    const Level big = flat_level({object("b", "house", 100, 100, {40, 10, 40})});
    EXPECT_FALSE(find_path(big, {100, 100}, {200, 200}));
}

TEST(FindPath, DisconnectedComponentsHaveNoPath) {
    NavGrid nav;
    for (int iz = 0; iz < kNavCells; ++iz) nav.set_walkable({35, iz}, false);
    EXPECT_FALSE(find_path(nav, {10, 10}, {60, 10}));
}

TEST(LevelFile, RoundTrips) {
    const TileSet ts = default_tileset();
    TileGrid grid = uniform_grid(tile_index(ts, "well"), 90);
    Level level = build_level(grid, ts, "trip");
    level.tileset_ref = "builtin:default";
    level.preset = "A";
    level.seed = 17;
    const auto path = std::filesystem::temp_directory_path() / "xplore_level_roundtrip.json";
    save_level(level, path);
    EXPECT_EQ(load_level(path, ts), level);

    const Level custom = flat_level({object("x", "boulder", 120.25, 80.5, {3, 4, 5})}, "custom");
    EXPECT_EQ(level_from_json(level_to_json(custom), ts), custom);
    std::filesystem::remove(path);
}

TEST(LevelFile, RejectsWrongTileCount) {
    nlohmann::json j = level_to_json(flat_level());
    j["tiles"].erase(0);
    EXPECT_THROW(level_from_json(j, default_tileset()), StructuralError);
}
