#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xplore/errors.hpp"
#include "xplore/geometry.hpp"
#include "xplore/tileset.hpp"

namespace xplore {

inline constexpr double kLatticeStep = 5.0;                                        // heightfield and nav resolution
inline constexpr int kNavCells = static_cast<int>(kWorldSize / kLatticeStep);      // 70
inline constexpr int kLatticeSamples = kNavCells + 1;                              // 71
inline constexpr double kMaxWalkableRise = 5.0;                                    // 45 degrees over one cell

struct PlacedTile {
    int tile_id = 0;
    int rotation = 0;  // degrees: 0, 90, 180 or 270
    int row = 0;
    int col = 0;

    friend bool operator==(const PlacedTile&, const PlacedTile&) = default;
};

using TileGrid = std::array<std::array<PlacedTile, kGridSize>, kGridSize>;

// A grid of one tile everywhere with consistent row/col fields.
TileGrid uniform_grid(int tile_id, int rotation = 0);

struct WorldObject {
    std::string id;
    std::string kind;
    Vec3 position;  // center of the bounding box
    Vec3 size;      // full extents
    bool blocking = true;

    double volume() const { return size.x * size.y * size.z; }
    friend bool operator==(const WorldObject&, const WorldObject&) = default;
};

// Heights on the (kLatticeSamples x kLatticeSamples) vertex lattice, row-major
// by z then x. Queries between vertices are bilinear.
class Heightfield {
public:
    Heightfield() : samples_(static_cast<std::size_t>(kLatticeSamples * kLatticeSamples), 0.0) {}

    double sample(int ix, int iz) const { return samples_[index(ix, iz)]; }
    void set(int ix, int iz, double h) { samples_[index(ix, iz)] = h; }
    double at(double x, double z) const;
    double max_height() const;

    friend bool operator==(const Heightfield&, const Heightfield&) = default;

private:
    static std::size_t index(int ix, int iz) {
        return static_cast<std::size_t>(iz) * kLatticeSamples + static_cast<std::size_t>(ix);
    }
    std::vector<double> samples_;
};

struct Cell {
    int ix = 0;  // column along x
    int iz = 0;  // row along z
    friend bool operator==(const Cell&, const Cell&) = default;
};

class NavGrid {
public:
    NavGrid() : walkable_(static_cast<std::size_t>(kNavCells * kNavCells), 1) {}

    static constexpr double cell_size = kLatticeStep;
    static constexpr int width = kNavCells;

    static bool in_range(Cell c) { return c.ix >= 0 && c.iz >= 0 && c.ix < width && c.iz < width; }
    static Cell cell_of(double x, double z);
    static Vec2 center_of(Cell c) { return {(c.ix + 0.5) * cell_size, (c.iz + 0.5) * cell_size}; }

    bool walkable(Cell c) const { return in_range(c) && walkable_[index(c)] != 0; }
    bool walkable_at(double x, double z) const;
    void set_walkable(Cell c, bool w) { walkable_[index(c)] = w ? 1 : 0; }
    int walkable_count() const;

    friend bool operator==(const NavGrid&, const NavGrid&) = default;

private:
    static std::size_t index(Cell c) {
        return static_cast<std::size_t>(c.iz) * width + static_cast<std::size_t>(c.ix);
    }
    std::vector<unsigned char> walkable_;
};

/// The world under evaluation. Immutable once built.
struct Level {
    std::string id;
    std::string tileset_ref;
    TileGrid tiles{};
    std::vector<WorldObject> objects;
    Heightfield heightfield;
    NavGrid nav;
    bool objects_overridden = false;

    // Free-form provenance (generator preset and seed) carried by level files.
    std::string preset;
    std::optional<std::uint64_t> seed;

    const WorldObject* find_object(const std::string& object_id) const;
    friend bool operator==(const Level&, const Level&) = default;
};

bool in_bounds(double x, double z);

// Ground-plane distance from p to the object's footprint rectangle (0 inside).
double footprint_distance(Vec2 p, const WorldObject& object);

/// Assemble heightfield, objects and navigation from a tile arrangement.
/// Throws StructuralError for unknown tile ids or bad rotations and
/// ValidationError listing every adjacent pair whose sockets are
/// incompatible or whose shared edge heights differ.
Level build_level(const TileGrid& tiles, const TileSet& tileset, std::string id = "level",
                  std::optional<std::vector<WorldObject>> objects_override = std::nullopt);

// Socket and edge-height checks used by build_level; empty when the grid fits.
std::vector<ValidationError::Offense> check_grid(const TileGrid& tiles, const TileSet& tileset);

// Recompute each object's y so it rests on the heightfield.
void settle_objects(std::vector<WorldObject>& objects, const Heightfield& hf);

// Nav cells: walkable iff the terrain rise along every cell edge is at most
// kMaxWalkableRise and no blocking footprint overlaps the cell.
NavGrid derive_nav(const Heightfield& hf, const std::vector<WorldObject>& objects);

enum class HitKind { Terrain, Object };

struct Hit {
    double distance = 0.0;
    Vec3 point;
    HitKind kind = HitKind::Terrain;
    int object_index = -1;
};

inline constexpr double kRayMarchStep = 0.5;

/// Nearest intersection with the heightfield or a blocking object's box
/// within max_dist. Terrain is marched at kRayMarchStep and refined by
/// bisection; boxes use the slab test. Rays that leave the world footprint
/// stop there (open boundless space). `ignore_object` excludes one object.
std::optional<Hit> raycast(const Level& level, const Vec3& origin, const Vec3& direction, double max_dist,
                           int ignore_object = -1);

struct Path {
    std::vector<Vec2> waypoints;  // cell centers, start first
    int cost = 0;                 // number of cell moves
};

/// A* over the nav grid, 4-connected, unit step cost, Euclidean heuristic.
/// Endpoints on blocked cells snap to the nearest walkable cell within
/// `snap_radius` cells. Returns nullopt when no path exists.
std::optional<Path> find_path(const Level& level, Vec2 from, Vec2 to, int snap_radius = 2);
std::optional<Path> find_path(const NavGrid& nav, Cell from, Cell to);

// Nearest walkable cell within a Chebyshev ring radius, ties by (distance, iz, ix).
std::optional<Cell> nearest_walkable(const NavGrid& nav, Vec2 p, int radius);

// Level files carry the tile arrangement; the world is rebuilt on load.
nlohmann::json level_to_json(const Level& level);
Level level_from_json(const nlohmann::json& j, const TileSet& tileset);
Level load_level(const std::filesystem::path& path, const TileSet& tileset);
void save_level(const Level& level, const std::filesystem::path& path);

}  // namespace xplore
