#include "xplore/world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <queue>

namespace xplore {

using nlohmann::json;

TileGrid uniform_grid(int tile_id, int rotation) {
    TileGrid g{};
    for (int r = 0; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) g[r][c] = {tile_id, rotation, r, c};
    }
    return g;
}

bool in_bounds(double x, double z) { return x >= 0.0 && z >= 0.0 && x <= kWorldSize && z <= kWorldSize; }

double footprint_distance(Vec2 p, const WorldObject& o) {
    const double dx = std::max(std::abs(p.x - o.position.x) - o.size.x / 2.0, 0.0);
    const double dz = std::max(std::abs(p.z - o.position.z) - o.size.z / 2.0, 0.0);
    return std::hypot(dx, dz);
}

double Heightfield::at(double x, double z) const {
    const double fx = std::clamp(x, 0.0, kWorldSize) / kLatticeStep;
    const double fz = std::clamp(z, 0.0, kWorldSize) / kLatticeStep;
    const int ix = std::min(static_cast<int>(fx), kNavCells - 1);
    const int iz = std::min(static_cast<int>(fz), kNavCells - 1);
    const double s = fx - ix;
    const double t = fz - iz;
    const double h00 = sample(ix, iz);
    const double h10 = sample(ix + 1, iz);
    const double h01 = sample(ix, iz + 1);
    const double h11 = sample(ix + 1, iz + 1);
    return h00 * (1 - s) * (1 - t) + h10 * s * (1 - t) + h01 * (1 - s) * t + h11 * s * t;
}

double Heightfield::max_height() const { return *std::max_element(samples_.begin(), samples_.end()); }

Cell NavGrid::cell_of(double x, double z) {
    return {std::clamp(static_cast<int>(std::floor(x / cell_size)), 0, width - 1),
            std::clamp(static_cast<int>(std::floor(z / cell_size)), 0, width - 1)};
}

bool NavGrid::walkable_at(double x, double z) const {
    if (x < 0.0 || z < 0.0 || x >= kWorldSize || z >= kWorldSize) return false;
    return walkable(cell_of(x, z));
}

int NavGrid::walkable_count() const {
    return static_cast<int>(std::count(walkable_.begin(), walkable_.end(), 1));
}

const WorldObject* Level::find_object(const std::string& object_id) const {
    for (const auto& o : objects) {
        if (o.id == object_id) return &o;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Construction

std::vector<ValidationError::Offense> check_grid(const TileGrid& tiles, const TileSet& tileset) {
    std::vector<ValidationError::Offense> out;
    auto check = [&](const PlacedTile& a, const PlacedTile& b, Dir d) {
        const TileDef& ta = tileset.tile(a.tile_id);
        const TileDef& tb = tileset.tile(b.tile_id);
        const int ra = rotation_steps(a.rotation);
        const int rb = rotation_steps(b.rotation);
        const std::string& sa = rotated_socket(ta, ra, d);
        const std::string& sb = rotated_socket(tb, rb, opposite(d));
        if (!tileset.compatible(sa, sb)) {
            out.push_back({a.row, a.col, b.row, b.col, "sockets '" + sa + "' and '" + sb + "' are incompatible"});
        }
        // Both edges are walked clockwise, so the shared edge runs in opposite directions.
        const auto ea = edge_heights(ta, ra, d);
        const auto eb = edge_heights(tb, rb, opposite(d));
        if (std::abs(ea.first - eb.second) > 1e-9 || std::abs(ea.second - eb.first) > 1e-9) {
            out.push_back({a.row, a.col, b.row, b.col, "edge heights differ"});
        }
    };
    for (int r = 0; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) {
            if (c + 1 < kGridSize) check(tiles[r][c], tiles[r][c + 1], Dir::East);
            if (r + 1 < kGridSize) check(tiles[r][c], tiles[r + 1][c], Dir::South);
        }
    }
    return out;
}

void settle_objects(std::vector<WorldObject>& objects, const Heightfield& hf) {
    for (auto& o : objects) o.position.y = hf.at(o.position.x, o.position.z) + o.size.y / 2.0;
}

NavGrid derive_nav(const Heightfield& hf, const std::vector<WorldObject>& objects) {
    NavGrid nav;
    for (int iz = 0; iz < kNavCells; ++iz) {
        for (int ix = 0; ix < kNavCells; ++ix) {
            const double a = hf.sample(ix, iz);
            const double b = hf.sample(ix + 1, iz);
            const double c = hf.sample(ix + 1, iz + 1);
            const double d = hf.sample(ix, iz + 1);
            const double rise = std::max({std::abs(a - b), std::abs(b - c), std::abs(c - d), std::abs(d - a)});
            nav.set_walkable({ix, iz}, rise <= kMaxWalkableRise + 1e-9);
        }
    }
    for (const auto& o : objects) {
        if (!o.blocking) continue;
        const double x0 = o.position.x - o.size.x / 2.0;
        const double x1 = o.position.x + o.size.x / 2.0;
        const double z0 = o.position.z - o.size.z / 2.0;
        const double z1 = o.position.z + o.size.z / 2.0;
        const int ix0 = std::max(0, static_cast<int>(std::floor(x0 / kLatticeStep)));
        const int ix1 = std::min(kNavCells - 1, static_cast<int>(std::floor(x1 / kLatticeStep)));
        const int iz0 = std::max(0, static_cast<int>(std::floor(z0 / kLatticeStep)));
        const int iz1 = std::min(kNavCells - 1, static_cast<int>(std::floor(z1 / kLatticeStep)));
        for (int iz = iz0; iz <= iz1; ++iz) {
            for (int ix = ix0; ix <= ix1; ++ix) {
                // Only overlaps of positive area block a cell.
                const double ox = std::min(x1, (ix + 1) * kLatticeStep) - std::max(x0, ix * kLatticeStep);
                const double oz = std::min(z1, (iz + 1) * kLatticeStep) - std::max(z0, iz * kLatticeStep);
                if (ox > 1e-9 && oz > 1e-9) nav.set_walkable({ix, iz}, false);
            }
        }
    }
    return nav;
}

Level build_level(const TileGrid& tiles, const TileSet& tileset, std::string id,
                  std::optional<std::vector<WorldObject>> objects_override) {
    for (int r = 0; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) {
            const PlacedTile& p = tiles[r][c];
            tileset.tile(p.tile_id);
            rotation_steps(p.rotation);
            if (p.row != r || p.col != c) {
                throw StructuralError("tile at (" + std::to_string(r) + "," + std::to_string(c) +
                                      ") records grid position (" + std::to_string(p.row) + "," +
                                      std::to_string(p.col) + ")");
            }
        }
    }
    if (auto offenses = check_grid(tiles, tileset); !offenses.empty()) {
        std::string msg = "level '" + id + "' has mismatched neighbors:";
        for (const auto& o : offenses) {
            msg += " (" + std::to_string(o.row) + "," + std::to_string(o.col) + ")-(" + std::to_string(o.neighbor_row) +
                   "," + std::to_string(o.neighbor_col) + ") " + o.reason + ";";
        }
        throw ValidationError(msg, std::move(offenses));
    }

    Level level;
    level.id = std::move(id);
    level.tiles = tiles;

    const int per_tile = static_cast<int>(kTileSize / kLatticeStep);
    for (int iz = 0; iz < kLatticeSamples; ++iz) {
        for (int ix = 0; ix < kLatticeSamples; ++ix) {
            const int row = std::min(iz / per_tile, kGridSize - 1);
            const int col = std::min(ix / per_tile, kGridSize - 1);
            const PlacedTile& p = tiles[row][col];
            const Vec2 center{(col + 0.5) * kTileSize, (row + 0.5) * kTileSize};
            const Vec2 offset{ix * kLatticeStep - center.x, iz * kLatticeStep - center.z};
            level.heightfield.set(ix, iz, tile_height(tileset.tile(p.tile_id), rotation_steps(p.rotation), offset));
        }
    }

    if (objects_override) {
        level.objects = std::move(*objects_override);
        level.objects_overridden = true;
        for (const auto& o : level.objects) {
            if (!in_bounds(o.position.x, o.position.z)) throw StructuralError("object '" + o.id + "' lies outside bounds");
            if (!(o.size.x > 0 && o.size.y > 0 && o.size.z > 0)) throw StructuralError("object '" + o.id + "' needs positive size");
        }
    } else {
        for (int r = 0; r < kGridSize; ++r) {
            for (int c = 0; c < kGridSize; ++c) {
                const PlacedTile& p = tiles[r][c];
                const int q = rotation_steps(p.rotation);
                const Vec2 center{(c + 0.5) * kTileSize, (r + 0.5) * kTileSize};
                const auto& decos = tileset.tile(p.tile_id).decorations;
                for (std::size_t k = 0; k < decos.size(); ++k) {
                    const Vec2 w = center + rotate_offset(decos[k].anchor, q);
                    WorldObject o;
                    o.id = "r" + std::to_string(r) + "c" + std::to_string(c) + "-" + std::to_string(k);
                    o.kind = decos[k].kind;
                    o.position = {w.x, 0.0, w.z};
                    o.size = rotate_extent(decos[k].size, q);
                    o.blocking = decos[k].blocking;
                    level.objects.push_back(std::move(o));
                }
            }
        }
    }
    settle_objects(level.objects, level.heightfield);
    level.nav = derive_nav(level.heightfield, level.objects);
    return level;
}

// ---------------------------------------------------------------------------
// Raycast

namespace {

// Slab test; returns entry distance when the ray meets the box in [0, limit].
std::optional<double> ray_box(const Vec3& o, const Vec3& d, const WorldObject& obj, double limit) {
    double t0 = 0.0;
    double t1 = limit;
    const double lo[3] = {obj.position.x - obj.size.x / 2, obj.position.y - obj.size.y / 2,
                          obj.position.z - obj.size.z / 2};
    const double hi[3] = {obj.position.x + obj.size.x / 2, obj.position.y + obj.size.y / 2,
                          obj.position.z + obj.size.z / 2};
    const double org[3] = {o.x, o.y, o.z};
    const double dir[3] = {d.x, d.y, d.z};
    for (int a = 0; a < 3; ++a) {
        if (std::abs(dir[a]) < 1e-15) {
            if (org[a] < lo[a] || org[a] > hi[a]) return std::nullopt;
            continue;
        }
        double ta = (lo[a] - org[a]) / dir[a];
        double tb = (hi[a] - org[a]) / dir[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
        if (t0 > t1) return std::nullopt;
    }
    return t0;
}

// Distance at which the ray leaves the world footprint.
double exit_distance(const Vec3& o, const Vec3& d) {
    double t = std::numeric_limits<double>::infinity();
    if (d.x > 0) t = std::min(t, (kWorldSize - o.x) / d.x);
    if (d.x < 0) t = std::min(t, -o.x / d.x);
    if (d.z > 0) t = std::min(t, (kWorldSize - o.z) / d.z);
    if (d.z < 0) t = std::min(t, -o.z / d.z);
    return std::max(t, 0.0);
}

}  // namespace

std::optional<Hit> raycast(const Level& level, const Vec3& origin, const Vec3& direction, double max_dist,
                           int ignore_object) {
    if (!in_bounds(origin.x, origin.z)) throw DomainError("ray origin outside level bounds");
    if (!(max_dist > 0.0)) throw DomainError("max_dist must be positive");
    const double n = direction.norm();
    if (std::abs(n - 1.0) > 1e-6) throw DomainError("ray direction must be normalized");

    const double limit = std::min(max_dist, exit_distance(origin, direction));
    std::optional<Hit> best;

    const Heightfield& hf = level.heightfield;
    auto below = [&](double t) {
        const Vec3 p = origin + direction * t;
        return p.y <= hf.at(p.x, p.z);
    };
    // A ray above every sample that does not descend can never meet the terrain.
    const bool can_hit_terrain = !(origin.y > hf.max_height() && direction.y >= 0.0);
    if (can_hit_terrain) {
        double prev = 0.0;
        if (below(0.0)) {
            best = Hit{0.0, origin, HitKind::Terrain, -1};
        } else {
            for (int step = 1;; ++step) {
                const double t = std::min(step * kRayMarchStep, limit);
                if (below(t)) {
                    double lo = prev;
                    double hi = t;
                    for (int i = 0; i < 40; ++i) {
                        const double mid = 0.5 * (lo + hi);
                        (below(mid) ? hi : lo) = mid;
                    }
                    best = Hit{hi, origin + direction * hi, HitKind::Terrain, -1};
                    break;
                }
                if (t >= limit) break;
                prev = t;
            }
        }
    }

    for (std::size_t i = 0; i < level.objects.size(); ++i) {
        const WorldObject& obj = level.objects[i];
        if (!obj.blocking || static_cast<int>(i) == ignore_object) continue;
        const double lim = best ? best->distance : limit;
        if (auto t = ray_box(origin, direction, obj, lim)) {
            if (!best || *t < best->distance) {
                best = Hit{*t, origin + direction * *t, HitKind::Object, static_cast<int>(i)};
            }
        }
    }
    return best;
}

// ---------------------------------------------------------------------------
// Pathfinding

std::optional<Cell> nearest_walkable(const NavGrid& nav, Vec2 p, int radius) {
    const Cell c = NavGrid::cell_of(p.x, p.z);
    for (int d = 0; d <= radius; ++d) {
        std::optional<Cell> best;
        double best_dist = std::numeric_limits<double>::infinity();
        for (int iz = c.iz - d; iz <= c.iz + d; ++iz) {
            for (int ix = c.ix - d; ix <= c.ix + d; ++ix) {
                if (std::max(std::abs(ix - c.ix), std::abs(iz - c.iz)) != d) continue;
                const Cell q{ix, iz};
                if (!nav.walkable(q)) continue;
                const double dist = (NavGrid::center_of(q) - p).norm();
                if (dist < best_dist - 1e-12) {
                    best = q;
                    best_dist = dist;
                }
            }
        }
        if (best) return best;
    }
    return std::nullopt;
}

std::optional<Path> find_path(const NavGrid& nav, Cell from, Cell to) {
    if (!nav.walkable(from) || !nav.walkable(to)) return std::nullopt;
    const int w = NavGrid::width;
    const auto idx = [w](Cell c) { return c.iz * w + c.ix; };
    const auto heuristic = [&](Cell c) { return std::hypot(c.ix - to.ix, c.iz - to.iz); };

    std::vector<int> g(static_cast<std::size_t>(w * w), std::numeric_limits<int>::max());
    std::vector<int> parent(static_cast<std::size_t>(w * w), -1);
    std::vector<char> closed(static_cast<std::size_t>(w * w), 0);

    struct Node {
        double f;
        int g;
        int index;
        bool operator>(const Node& o) const {
            if (f != o.f) return f > o.f;
            if (g != o.g) return g < o.g;
            return index > o.index;
        }
    };
    std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
    g[static_cast<std::size_t>(idx(from))] = 0;
    open.push({heuristic(from), 0, idx(from)});

    while (!open.empty()) {
        const Node n = open.top();
        open.pop();
        if (closed[static_cast<std::size_t>(n.index)]) continue;
        closed[static_cast<std::size_t>(n.index)] = 1;
        if (n.index == idx(to)) break;
        const Cell c{n.index % w, n.index / w};
        for (const auto& [dr, dc] : kDirOffsets) {
            const Cell q{c.ix + dc, c.iz + dr};
            if (!nav.walkable(q)) continue;
            const auto qi = static_cast<std::size_t>(idx(q));
            if (closed[qi]) continue;
            const int ng = n.g + 1;
            if (ng < g[qi]) {
                g[qi] = ng;
                parent[qi] = n.index;
                open.push({ng + heuristic(q), ng, idx(q)});
            }
        }
    }
    const auto goal = static_cast<std::size_t>(idx(to));
    if (!closed[goal]) return std::nullopt;

    Path path;
    path.cost = g[goal];
    for (int i = idx(to); i != -1; i = parent[static_cast<std::size_t>(i)]) {
        path.waypoints.push_back(NavGrid::center_of({i % w, i / w}));
        if (i == idx(from)) break;
    }
    std::reverse(path.waypoints.begin(), path.waypoints.end());
    return path;
}

std::optional<Path> find_path(const Level& level, Vec2 from, Vec2 to, int snap_radius) {
    if (!in_bounds(from.x, from.z) || !in_bounds(to.x, to.z)) throw DomainError("path endpoints must lie inside bounds");
    const auto a = nearest_walkable(level.nav, from, snap_radius);
    const auto b = nearest_walkable(level.nav, to, snap_radius);
    if (!a || !b) return std::nullopt;
    return find_path(level.nav, *a, *b);
}

// ---------------------------------------------------------------------------
// Level files

json level_to_json(const Level& level) {
    json tiles = json::array();
    for (const auto& row : level.tiles) {
        for (const auto& p : row) {
            tiles.push_back({{"tile_id", p.tile_id}, {"rotation", p.rotation}, {"row", p.row}, {"col", p.col}});
        }
    }
    json j = {{"format", "xplore-level/1"}, {"id", level.id}, {"tileset_ref", level.tileset_ref}, {"tiles", tiles}};
    if (!level.preset.empty()) j["preset"] = level.preset;
    if (level.seed) j["seed"] = *level.seed;
    if (level.objects_overridden) {
        json objs = json::array();
        for (const auto& o : level.objects) {
            objs.push_back({{"id", o.id},
                            {"kind", o.kind},
                            {"position", {o.position.x, o.position.y, o.position.z}},
                            {"size", {o.size.x, o.size.y, o.size.z}},
                            {"blocking", o.blocking}});
        }
        j["objects_override"] = objs;
    }
    return j;
}

Level level_from_json(const json& j, const TileSet& tileset) {
    try {
        TileGrid grid{};
        const auto& tiles = j.at("tiles");
        if (tiles.size() != static_cast<std::size_t>(kGridSize * kGridSize)) {
            throw StructuralError("level must list exactly 49 tiles, found " + std::to_string(tiles.size()));
        }
        std::vector<char> seen(kGridSize * kGridSize, 0);
        for (const auto& t : tiles) {
            PlacedTile p{t.at("tile_id").get<int>(), t.at("rotation").get<int>(), t.at("row").get<int>(),
                         t.at("col").get<int>()};
            if (p.row < 0 || p.col < 0 || p.row >= kGridSize || p.col >= kGridSize) {
                throw StructuralError("tile grid position out of range");
            }
            auto& flag = seen[static_cast<std::size_t>(p.row * kGridSize + p.col)];
            if (flag) throw StructuralError("duplicate tile record for one grid position");
            flag = 1;
            grid[p.row][p.col] = p;
        }
        std::optional<std::vector<WorldObject>> override_objects;
        if (j.contains("objects_override")) {
            override_objects.emplace();
            for (const auto& o : j["objects_override"]) {
                WorldObject w;
                w.id = o.at("id").get<std::string>();
                w.kind = o.at("kind").get<std::string>();
                const auto& p = o.at("position");
                const auto& s = o.at("size");
                w.position = {p.at(0).get<double>(), p.size() > 2 ? p.at(1).get<double>() : 0.0,
                              p.at(p.size() > 2 ? 2 : 1).get<double>()};
                w.size = {s.at(0).get<double>(), s.at(1).get<double>(), s.at(2).get<double>()};
                w.blocking = o.value("blocking", true);
                override_objects->push_back(std::move(w));
            }
        }
        Level level = build_level(grid, tileset, j.at("id").get<std::string>(), std::move(override_objects));
        level.tileset_ref = j.value("tileset_ref", std::string{});
        level.preset = j.value("preset", std::string{});
        if (j.contains("seed")) level.seed = j["seed"].get<std::uint64_t>();
        return level;
    } catch (const json::exception& e) {
        throw StructuralError(std::string("malformed level: ") + e.what());
    }
}

Level load_level(const std::filesystem::path& path, const TileSet& tileset) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open level file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw StructuralError("cannot parse level file " + path.string() + ": " + e.what());
    }
    return level_from_json(j, tileset);
}

void save_level(const Level& level, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw StructuralError("cannot write " + path.string());
    out << level_to_json(level).dump(2) << '\n';
}

}  // namespace xplore
