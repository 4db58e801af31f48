#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "xplore/geometry.hpp"

namespace xplore {

inline constexpr int kGridSize = 7;
inline constexpr double kTileSize = 50.0;
inline constexpr double kWorldSize = kGridSize * kTileSize;  // 350
inline constexpr int kTileCount = 35;
inline constexpr int kRotations = 4;

enum class Dir : int { North = 0, East = 1, South = 2, West = 3 };

inline constexpr std::array<Dir, 4> kDirs = {Dir::North, Dir::East, Dir::South, Dir::West};

inline Dir opposite(Dir d) { return static_cast<Dir>((static_cast<int>(d) + 2) % 4); }

// Grid offsets: North is toward row 0 (smaller z).
inline constexpr std::array<std::pair<int, int>, 4> kDirOffsets = {
    std::pair{-1, 0}, std::pair{0, 1}, std::pair{1, 0}, std::pair{0, -1}};

enum class Shape { Flat, Slope, Plateau };

/// Terrain of one tile in its authoring frame. The base surface is the
/// bilinear blend of the four corner heights (NW, NE, SE, SW, clockwise),
/// so every edge is a straight segment between its two corners. A plateau
/// adds a square raised block in the interior that falls to zero before
/// reaching the tile edge, leaving edge heights untouched.
struct ElevationProfile {
    std::array<double, 4> corners{0.0, 0.0, 0.0, 0.0};
    Shape shape = Shape::Flat;
    double plateau_height = 0.0;
    double plateau_half = 0.0;  // half side of the flat top
    double plateau_ramp = 0.0;  // horizontal run of the side ramps

    friend bool operator==(const ElevationProfile&, const ElevationProfile&) = default;
};

struct Decoration {
    std::string kind;
    Vec2 anchor;  // offset from the tile center, authoring frame
    Vec3 size;    // extents along x, y (vertical), z
    bool blocking = true;

    friend bool operator==(const Decoration&, const Decoration&) = default;
};

struct TileDef {
    int id = 0;
    std::string name;
    std::array<std::string, 4> sockets;  // N, E, S, W in the authoring frame
    double weight_a = 0.0;
    double weight_b = 0.0;
    ElevationProfile elevation;
    std::vector<Decoration> decorations;

    friend bool operator==(const TileDef&, const TileDef&) = default;
};

enum class Preset { A, B };

Preset parse_preset(const std::string& s);
const char* preset_name(Preset p);

class TileSet {
public:
    TileSet() = default;
    TileSet(std::vector<TileDef> tiles, std::vector<std::pair<std::string, std::string>> compatible);

    const std::vector<TileDef>& tiles() const { return tiles_; }
    const TileDef& tile(int id) const;
    int size() const { return static_cast<int>(tiles_.size()); }

    // Unordered pairs of socket labels that may face each other.
    const std::vector<std::pair<std::string, std::string>>& compatibility() const { return compatible_; }
    bool compatible(const std::string& a, const std::string& b) const;
    bool declares(const std::string& label) const;

    double weight(int id, Preset p) const;

    // Throws StructuralError on the first violated invariant.
    void validate() const;

    friend bool operator==(const TileSet&, const TileSet&) = default;

private:
    std::vector<TileDef> tiles_;
    std::vector<std::pair<std::string, std::string>> compatible_;
};

// Rotation is clockwise seen from above, in quarter turns 0..3.
int rotation_steps(int degrees);

// Socket on world-facing side `d` of a tile placed with `quarter_turns`.
const std::string& rotated_socket(const TileDef& t, int quarter_turns, Dir d);

// Rotate an authoring-frame offset into the world frame.
Vec2 rotate_offset(Vec2 local, int quarter_turns);
Vec3 rotate_extent(Vec3 size, int quarter_turns);

// Height at a world-frame offset from the center of a placed tile.
double tile_height(const TileDef& t, int quarter_turns, Vec2 offset);

// Heights at the two ends of a world-facing edge, walking it clockwise.
std::pair<double, double> edge_heights(const TileDef& t, int quarter_turns, Dir d);

/// The shipped 35-tile set: five empty meadows, eighteen decorated ground
/// tiles, four interior elevation features (hill, mound, cliffed mesa,
/// knoll) and eight two-level terrain tiles built on corner heights
/// (corner, ramp, saddle, inner corner, highland and three decorated
/// highland variants). Preset A favors decorated and elevated tiles,
/// preset B favors empty meadows and a few plain tree/bush tiles.
TileSet default_tileset();

nlohmann::json to_json(const TileSet& ts);
TileSet tileset_from_json(const nlohmann::json& j);
TileSet load_tileset(const std::filesystem::path& path);
void save_tileset(const TileSet& ts, const std::filesystem::path& path);

}  // namespace xplore
