#pragma once

#include <string>
#include <vector>

#include "xplore/tileset.hpp"
#include "xplore/world.hpp"

namespace xplore::testing {

inline WorldObject object(std::string id, std::string kind, double x, double z, Vec3 size, bool blocking = true) {
    WorldObject o;
    o.id = std::move(id);
    o.kind = std::move(kind);
    o.position = {x, 0.0, z};
    o.size = size;
    o.blocking = blocking;
    return o;
}

// Tile 0 of the shipped set is an empty flat meadow.
inline Level flat_level(std::vector<WorldObject> objects = {}, std::string id = "flat") {
    return build_level(uniform_grid(0), default_tileset(), std::move(id), std::move(objects));
}

// Raise every lattice sample with x >= x_from to `height`; nav and objects are rebuilt.
inline void raise_east(Level& level, double x_from, double height) {
    for (int iz = 0; iz < kLatticeSamples; ++iz) {
        for (int ix = 0; ix < kLatticeSamples; ++ix) {
            if (ix * kLatticeStep >= x_from) level.heightfield.set(ix, iz, height);
        }
    }
    settle_objects(level.objects, level.heightfield);
    level.nav = derive_nav(level.heightfield, level.objects);
}

}  // namespace xplore::testing
