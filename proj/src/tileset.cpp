#include "xplore/tileset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "xplore/errors.hpp"

namespace xplore {

using nlohmann::json;

Preset parse_preset(const std::string& s) {
    if (s == "A" || s == "a") return Preset::A;
    if (s == "B" || s == "b") return Preset::B;
    throw StructuralError("unknown preset '" + s + "' (expected A or B)");
}

const char* preset_name(Preset p) { return p == Preset::A ? "A" : "B"; }

TileSet::TileSet(std::vector<TileDef> tiles, std::vector<std::pair<std::string, std::string>> compatible)
    : tiles_(std::move(tiles)), compatible_(std::move(compatible)) {}

const TileDef& TileSet::tile(int id) const {
    if (id < 0 || id >= size()) throw StructuralError("unknown tile_id " + std::to_string(id));
    return tiles_[static_cast<std::size_t>(id)];
}

bool TileSet::compatible(const std::string& a, const std::string& b) const {
    return std::any_of(compatible_.begin(), compatible_.end(), [&](const auto& p) {
        return (p.first == a && p.second == b) || (p.first == b && p.second == a);
    });
}

bool TileSet::declares(const std::string& label) const {
    return std::any_of(compatible_.begin(), compatible_.end(),
                       [&](const auto& p) { return p.first == label || p.second == label; });
}

double TileSet::weight(int id, Preset p) const {
    const TileDef& t = tile(id);
    return p == Preset::A ? t.weight_a : t.weight_b;
}

void TileSet::validate() const {
    if (size() != kTileCount) {
        throw StructuralError("tileset must hold exactly 35 tiles, found " + std::to_string(size()));
    }
    bool any_a = false;
    bool any_b = false;
    for (int i = 0; i < size(); ++i) {
        const TileDef& t = tiles_[static_cast<std::size_t>(i)];
        const std::string where = "tile " + std::to_string(i) + " (" + t.name + "): ";
        if (t.id != i) throw StructuralError(where + "id must equal its index");
        for (double w : {t.weight_a, t.weight_b}) {
            if (!std::isfinite(w) || w < 0.0 || w > 1.0) throw StructuralError(where + "weights must lie in [0,1]");
        }
        any_a = any_a || t.weight_a > 0.0;
        any_b = any_b || t.weight_b > 0.0;
        for (const auto& s : t.sockets) {
            if (!declares(s)) throw StructuralError(where + "socket '" + s + "' is not declared in compatibility");
        }
        const ElevationProfile& e = t.elevation;
        for (double c : e.corners) {
            if (!std::isfinite(c)) throw StructuralError(where + "corner heights must be finite");
        }
        const bool level = std::all_of(e.corners.begin(), e.corners.end(),
                                       [&](double c) { return c == e.corners[0]; });
        switch (e.shape) {
            case Shape::Flat:
                if (!level || e.plateau_height != 0.0) throw StructuralError(where + "flat tile must have equal corners");
                break;
            case Shape::Slope:
                if (level || e.plateau_height != 0.0) throw StructuralError(where + "slope tile needs differing corners");
                break;
            case Shape::Plateau:
                if (!(e.plateau_height > 0.0) || e.plateau_half < 0.0 || !(e.plateau_ramp > 0.0) ||
                    e.plateau_half + e.plateau_ramp > kTileSize / 2.0) {
                    throw StructuralError(where + "plateau must have positive height and fit inside the tile");
                }
                break;
        }
        for (const auto& d : t.decorations) {
            if (d.kind.empty()) throw StructuralError(where + "decoration without kind");
            if (!(d.size.x > 0.0 && d.size.y > 0.0 && d.size.z > 0.0)) {
                throw StructuralError(where + "decoration '" + d.kind + "' needs positive extents");
            }
            const double half = kTileSize / 2.0;
            if (std::abs(d.anchor.x) + d.size.x / 2.0 > half || std::abs(d.anchor.z) + d.size.z / 2.0 > half ||
                std::abs(d.anchor.x) >= half || std::abs(d.anchor.z) >= half) {
                throw StructuralError(where + "decoration '" + d.kind + "' leaves the tile footprint");
            }
        }
    }
    if (!any_a || !any_b) throw StructuralError("each preset needs at least one tile with positive weight");
}

int rotation_steps(int degrees) {
    switch (degrees) {
        case 0: return 0;
        case 90: return 1;
        case 180: return 2;
        case 270: return 3;
        default: throw StructuralError("rotation must be 0, 90, 180 or 270, got " + std::to_string(degrees));
    }
}

const std::string& rotated_socket(const TileDef& t, int quarter_turns, Dir d) {
    const int src = (static_cast<int>(d) - quarter_turns % 4 + 4) % 4;
    return t.sockets[static_cast<std::size_t>(src)];
}

Vec2 rotate_offset(Vec2 p, int quarter_turns) {
    for (int i = 0; i < (quarter_turns % 4 + 4) % 4; ++i) p = {-p.z, p.x};
    return p;
}

Vec3 rotate_extent(Vec3 s, int quarter_turns) {
    if (quarter_turns % 2 != 0) std::swap(s.x, s.z);
    return s;
}

double tile_height(const TileDef& t, int quarter_turns, Vec2 offset) {
    // Undo the placement rotation to get back to the authoring frame.
    Vec2 p = offset;
    for (int i = 0; i < (quarter_turns % 4 + 4) % 4; ++i) p = {p.z, -p.x};
    const double half = kTileSize / 2.0;
    const double s = std::clamp((p.x + half) / kTileSize, 0.0, 1.0);
    const double r = std::clamp((p.z + half) / kTileSize, 0.0, 1.0);
    const auto& c = t.elevation.corners;
    double h = c[0] * (1 - s) * (1 - r) + c[1] * s * (1 - r) + c[2] * s * r + c[3] * (1 - s) * r;
    if (t.elevation.shape == Shape::Plateau) {
        const auto& e = t.elevation;
        const double cheb = std::max(std::abs(p.x), std::abs(p.z));
        if (cheb <= e.plateau_half) {
            h += e.plateau_height;
        } else if (cheb < e.plateau_half + e.plateau_ramp) {
            h += e.plateau_height * (1.0 - (cheb - e.plateau_half) / e.plateau_ramp);
        }
    }
    return h;
}

std::pair<double, double> edge_heights(const TileDef& t, int quarter_turns, Dir d) {
    const int src = (static_cast<int>(d) - quarter_turns % 4 + 4) % 4;
    const auto& c = t.elevation.corners;
    return {c[static_cast<std::size_t>(src)], c[static_cast<std::size_t>((src + 1) % 4)]};
}

// ---------------------------------------------------------------------------
// Shipped tileset

namespace {

constexpr double kHigh = 8.0;

std::string socket_for(double a, double b) {
    const bool ha = a > 0.0;
    const bool hb = b > 0.0;
    if (!ha && !hb) return "L";
    if (ha && hb) return "H";
    return ha ? "HL" : "LH";
}

struct Builder {
    std::vector<TileDef> tiles;

    TileDef& add(std::string name, double wa, double wb, std::array<double, 4> corners = {0, 0, 0, 0}) {
        TileDef t;
        t.id = static_cast<int>(tiles.size());
        t.name = std::move(name);
        t.weight_a = wa;
        t.weight_b = wb;
        t.elevation.corners = corners;
        const bool level = corners[0] == corners[1] && corners[1] == corners[2] && corners[2] == corners[3];
        t.elevation.shape = level ? Shape::Flat : Shape::Slope;
        for (int e = 0; e < 4; ++e) {
            t.sockets[static_cast<std::size_t>(e)] =
                socket_for(corners[static_cast<std::size_t>(e)], corners[static_cast<std::size_t>((e + 1) % 4)]);
        }
        tiles.push_back(std::move(t));
        return tiles.back();
    }
};

void deco(TileDef& t, const std::string& kind, double u, double v, Vec3 size, bool blocking) {
    t.decorations.push_back({kind, {u, v}, size, blocking});
}

void plateau(TileDef& t, double height, double half, double ramp) {
    t.elevation.shape = Shape::Plateau;
    t.elevation.plateau_height = height;
    t.elevation.plateau_half = half;
    t.elevation.plateau_ramp = ramp;
}

const Vec3 kTree{5, 12, 5};
const Vec3 kBush{3, 1.5, 3};
const Vec3 kRock{4, 3, 4};
const Vec3 kBoulder{10, 7, 10};
const Vec3 kRuinWall{12, 6, 2};
const Vec3 kPillar{2, 8, 2};
const Vec3 kHouse{16, 10, 14};
const Vec3 kWell{4, 3, 4};
const Vec3 kBarrel{1.5, 2, 1.5};
const Vec3 kFlower{1, 0.5, 1};
const Vec3 kStatue{3, 7, 3};
const Vec3 kCampfire{2, 1, 2};
const Vec3 kTent{6, 4, 6};
const Vec3 kLog{8, 1.5, 2};
const Vec3 kCrate{2, 2, 2};
const Vec3 kTower{8, 24, 8};
const Vec3 kMushroom{1, 1, 1};
const Vec3 kStump{2, 1, 2};
const Vec3 kSign{1, 3, 0.5};
const Vec3 kHaystack{4, 3, 4};

}  // namespace

TileSet default_tileset() {
    Builder b;
    const double H = kHigh;

    // Empty meadows.
    for (const char* name : {"meadow", "field", "clearing", "plain", "grassland"}) b.add(name, 0.10, 0.90);

    // Decorated ground tiles. Trees and bushes stay common under preset B.
    {
        auto& t = b.add("tree_grove", 0.60, 0.45);
        deco(t, "tree", -12, -10, kTree, true);
        deco(t, "tree", 10, -6, kTree, true);
        deco(t, "tree", -2, 12, kTree, true);
    }
    {
        auto& t = b.add("lone_tree", 0.50, 0.45);
        deco(t, "tree", 3, -4, kTree, true);
    }
    {
        auto& t = b.add("bushes", 0.50, 0.35);
        deco(t, "bush", -14, -14, kBush, false);
        deco(t, "bush", 12, -10, kBush, false);
        deco(t, "bush", -8, 12, kBush, false);
        deco(t, "bush", 14, 14, kBush, false);
    }
    {
        auto& t = b.add("rock_field", 0.50, 0.15);
        deco(t, "rock", -10, 8, kRock, true);
        deco(t, "rock", 6, -12, kRock, true);
        deco(t, "rock", 14, 10, kRock, true);
    }
    {
        auto& t = b.add("boulder", 0.45, 0.05);
        deco(t, "boulder", 2, 2, kBoulder, true);
        deco(t, "rock", -14, 12, kRock, true);
        deco(t, "mushroom", 14, -12, kMushroom, false);
        deco(t, "flower", -12, -14, kFlower, false);
    }
    {
        auto& t = b.add("ruins", 0.60, 0.05);
        deco(t, "ruin", -6, -12, kRuinWall, true);
        deco(t, "ruin", 8, 10, kRuinWall, true);
        deco(t, "pillar", -14, 8, kPillar, true);
        deco(t, "flower", 14, -8, kFlower, false);
        deco(t, "statue", -14, -16, kStatue, true);
    }
    {
        auto& t = b.add("house", 0.55, 0.05);
        deco(t, "house", 0, -2, kHouse, true);
        deco(t, "barrel", 12, 10, kBarrel, false);
        deco(t, "crate", -12, 12, kCrate, false);
        deco(t, "sign", 4, 14, kSign, false);
        deco(t, "flower", -16, -14, kFlower, false);
    }
    {
        auto& t = b.add("well", 0.45, 0.05);
        deco(t, "well", 0, 0, kWell, true);
        deco(t, "barrel", 8, 6, kBarrel, true);
        deco(t, "flower", -10, 8, kFlower, false);
        deco(t, "crate", 12, -10, kCrate, false);
        deco(t, "sign", -6, -12, kSign, false);
    }
    {
        auto& t = b.add("flowers", 0.50, 0.10);
        deco(t, "flower", -10, -4, kFlower, false);
        deco(t, "flower", 6, 8, kFlower, false);
        deco(t, "flower", 12, -12, kFlower, false);
        deco(t, "mushroom", -2, -14, kMushroom, false);
        deco(t, "stump", -12, 12, kStump, false);
    }
    {
        auto& t = b.add("statue", 0.50, 0.05);
        deco(t, "statue", 0, 0, kStatue, true);
        deco(t, "pillar", -12, -12, kPillar, true);
        deco(t, "pillar", 12, 12, kPillar, true);
        deco(t, "flower", -7, 7, kFlower, false);
        deco(t, "flower", 7, -7, kFlower, false);
    }
    {
        auto& t = b.add("campsite", 0.55, 0.05);
        deco(t, "campfire", 0, 0, kCampfire, false);
        deco(t, "tent", -12, -10, kTent, true);
        deco(t, "log", 2, 9, kLog, false);
        deco(t, "log", 12, -4, {2, 1.5, 8}, false);
        deco(t, "barrel", -4, -14, kBarrel, false);
        deco(t, "crate", 12, 12, kCrate, false);
    }
    {
        auto& t = b.add("crates", 0.50, 0.05);
        deco(t, "crate", -8, -8, kCrate, true);
        deco(t, "crate", -4, -9, kCrate, true);
        deco(t, "crate", 10, 6, kCrate, true);
        deco(t, "barrel", 6, 12, kBarrel, true);
    }
    {
        auto& t = b.add("tower", 0.50, 0.05);
        deco(t, "tower", 4, 4, kTower, true);
        deco(t, "crate", -12, 12, kCrate, false);
        deco(t, "barrel", -10, -12, kBarrel, false);
        deco(t, "sign", 14, -10, kSign, false);
    }
    {
        auto& t = b.add("mushrooms", 0.45, 0.05);
        deco(t, "mushroom", -12, 0, kMushroom, false);
        deco(t, "mushroom", -6, 10, kMushroom, false);
        deco(t, "mushroom", 8, 12, kMushroom, false);
        deco(t, "mushroom", 12, -8, kMushroom, false);
        deco(t, "stump", 2, -4, kStump, false);
        deco(t, "log", 2, -14, kLog, false);
    }
    {
        auto& t = b.add("fallen_logs", 0.40, 0.10);
        deco(t, "log", -6, -8, kLog, false);
        deco(t, "log", 8, 10, kLog, false);
        deco(t, "mushroom", -10, 6, kMushroom, false);
        deco(t, "stump", 12, -10, kStump, false);
    }
    {
        auto& t = b.add("stump", 0.35, 0.15);
        deco(t, "stump", -4, 6, kStump, false);
    }
    {
        auto& t = b.add("signpost", 0.40, 0.05);
        deco(t, "sign", 2, -3, kSign, false);
        deco(t, "stump", 10, 8, kStump, false);
        deco(t, "flower", -9, 9, kFlower, false);
    }
    {
        auto& t = b.add("haystacks", 0.45, 0.05);
        deco(t, "haystack", -8, 6, kHaystack, true);
        deco(t, "haystack", 10, -8, kHaystack, true);
        deco(t, "barrel", 12, 10, kBarrel, false);
        deco(t, "sign", -10, -10, kSign, false);
        deco(t, "crate", 2, 14, kCrate, false);
    }

    // Interior elevation features on low ground.
    {
        auto& t = b.add("hill", 0.55, 0.05);
        plateau(t, 6, 10, 12);
        deco(t, "statue", 0, 0, kStatue, true);
        deco(t, "flower", 4, 4, kFlower, false);
    }
    {
        auto& t = b.add("mound", 0.50, 0.05);
        plateau(t, 10, 8, 12);
        deco(t, "pillar", 0, 0, kPillar, true);
        deco(t, "mushroom", -18, 18, kMushroom, false);
    }
    {
        auto& t = b.add("mesa", 0.45, 0.03);
        plateau(t, 14, 12, 3);
        deco(t, "ruin", 0, -4, kRuinWall, true);
        deco(t, "tent", 0, 6, kTent, true);
    }
    {
        auto& t = b.add("knoll", 0.50, 0.03);
        plateau(t, 5, 10, 10);
        deco(t, "tree", 2, -2, kTree, true);
        deco(t, "flower", -4, 4, kFlower, false);
    }

    // Two-level terrain on corner heights; these connect low and high ground.
    {
        auto& t = b.add("slope_corner", 0.45, 0.05, {H, 0, 0, 0});
        deco(t, "rock", -12, -12, kRock, true);
        deco(t, "flower", 10, 8, kFlower, false);
        deco(t, "mushroom", -4, 12, kMushroom, false);
    }
    {
        auto& t = b.add("slope_ramp", 0.50, 0.05, {H, H, 0, 0});
        deco(t, "tree", -10, -12, kTree, true);
        deco(t, "stump", 8, 4, kStump, false);
        deco(t, "flower", -6, 12, kFlower, false);
    }
    {
        auto& t = b.add("slope_saddle", 0.30, 0.02, {H, 0, H, 0});
        deco(t, "pillar", -12, -12, kPillar, true);
        deco(t, "rock", 12, 12, kRock, true);
        deco(t, "sign", 0, 0, kSign, false);
    }
    {
        auto& t = b.add("slope_inner", 0.45, 0.05, {H, H, H, 0});
        deco(t, "log", 4, -10, kLog, false);
        deco(t, "barrel", -10, 4, kBarrel, false);
        deco(t, "flower", 12, 12, kFlower, false);
    }
    {
        auto& t = b.add("highland", 0.50, 0.05, {H, H, H, H});
        deco(t, "haystack", 6, -6, kHaystack, true);
        deco(t, "flower", -8, 10, kFlower, false);
    }
    {
        auto& t = b.add("high_ruins", 0.55, 0.03, {H, H, H, H});
        deco(t, "ruin", 4, -10, kRuinWall, true);
        deco(t, "pillar", -12, 6, kPillar, true);
        deco(t, "pillar", 12, 10, kPillar, true);
        deco(t, "statue", -2, 8, kStatue, true);
    }
    {
        auto& t = b.add("high_grove", 0.50, 0.03, {H, H, H, H});
        deco(t, "tree", -10, -8, kTree, true);
        deco(t, "tree", 8, 10, kTree, true);
        deco(t, "rock", 10, -12, kRock, true);
        deco(t, "mushroom", -4, 2, kMushroom, false);
        deco(t, "stump", 12, 2, kStump, false);
    }
    {
        auto& t = b.add("lookout", 0.45, 0.03, {H, H, H, H});
        deco(t, "tower", -6, -4, kTower, true);
        deco(t, "crate", 10, 10, kCrate, true);
        deco(t, "barrel", 12, 6, kBarrel, false);
        deco(t, "sign", -14, 12, kSign, false);
    }

    return TileSet(std::move(b.tiles), {{"L", "L"}, {"H", "H"}, {"LH", "HL"}});
}

// ---------------------------------------------------------------------------
// JSON

namespace {

const char* shape_name(Shape s) {
    switch (s) {
        case Shape::Flat: return "flat";
        case Shape::Slope: return "slope";
        case Shape::Plateau: return "plateau";
    }
    return "flat";
}

Shape parse_shape(const std::string& s) {
    if (s == "flat") return Shape::Flat;
    if (s == "slope") return Shape::Slope;
    if (s == "plateau") return Shape::Plateau;
    throw StructuralError("unknown elevation shape '" + s + "'");
}

}  // namespace

json to_json(const TileSet& ts) {
    json tiles = json::array();
    json wa = json::array();
    json wb = json::array();
    for (const TileDef& t : ts.tiles()) {
        json decorations = json::array();
        for (const auto& d : t.decorations) {
            decorations.push_back({{"kind", d.kind},
                                   {"anchor", {d.anchor.x, d.anchor.z}},
                                   {"size", {d.size.x, d.size.y, d.size.z}},
                                   {"blocking", d.blocking}});
        }
        const auto& e = t.elevation;
        json elevation = {{"corners", e.corners}, {"shape", shape_name(e.shape)}};
        if (e.shape == Shape::Plateau) {
            elevation["plateau"] = {{"height", e.plateau_height}, {"half", e.plateau_half}, {"ramp", e.plateau_ramp}};
        }
        tiles.push_back({{"id", t.id},
                         {"name", t.name},
                         {"sockets", t.sockets},
                         {"elevation", elevation},
                         {"decorations", decorations}});
        wa.push_back(t.weight_a);
        wb.push_back(t.weight_b);
    }
    json compat = json::array();
    for (const auto& [a, b] : ts.compatibility()) compat.push_back({a, b});
    return {{"format", "xplore-tileset/1"},
            {"compatible", compat},
            {"tiles", tiles},
            {"presets", {{"A", wa}, {"B", wb}}}};
}

TileSet tileset_from_json(const json& j) {
    try {
        std::vector<std::pair<std::string, std::string>> compat;
        for (const auto& p : j.at("compatible")) {
            compat.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
        }
        const auto& wa = j.at("presets").at("A");
        const auto& wb = j.at("presets").at("B");
        const auto& jt = j.at("tiles");
        if (wa.size() != jt.size() || wb.size() != jt.size()) {
            throw StructuralError("preset weight lists must have one entry per tile");
        }
        std::vector<TileDef> tiles;
        for (std::size_t i = 0; i < jt.size(); ++i) {
            const auto& x = jt[i];
            TileDef t;
            t.id = x.at("id").get<int>();
            t.name = x.value("name", std::string{});
            t.sockets = x.at("sockets").get<std::array<std::string, 4>>();
            t.weight_a = wa[i].get<double>();
            t.weight_b = wb[i].get<double>();
            const auto& e = x.at("elevation");
            t.elevation.corners = e.at("corners").get<std::array<double, 4>>();
            t.elevation.shape = parse_shape(e.at("shape").get<std::string>());
            if (e.contains("plateau")) {
                t.elevation.plateau_height = e["plateau"].at("height").get<double>();
                t.elevation.plateau_half = e["plateau"].at("half").get<double>();
                t.elevation.plateau_ramp = e["plateau"].at("ramp").get<double>();
            }
            for (const auto& d : x.value("decorations", json::array())) {
                Decoration dec;
                dec.kind = d.at("kind").get<std::string>();
                dec.anchor = {d.at("anchor").at(0).get<double>(), d.at("anchor").at(1).get<double>()};
                dec.size = {d.at("size").at(0).get<double>(), d.at("size").at(1).get<double>(),
                            d.at("size").at(2).get<double>()};
                dec.blocking = d.value("blocking", true);
                t.decorations.push_back(std::move(dec));
            }
            tiles.push_back(std::move(t));
        }
        TileSet ts(std::move(tiles), std::move(compat));
        ts.validate();
        return ts;
    } catch (const json::exception& e) {
        throw StructuralError(std::string("malformed tileset: ") + e.what());
    }
}

TileSet load_tileset(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot open tileset file " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw StructuralError("cannot parse tileset file " + path.string() + ": " + e.what());
    }
    return tileset_from_json(j);
}

void save_tileset(const TileSet& ts, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw StructuralError("cannot write " + path.string());
    out << to_json(ts).dump(2) << '\n';
}

}  // namespace xplore
