#pragma once

#include <cstdint>
#include <vector>

#include "xplore/rng.hpp"
#include "xplore/tileset.hpp"
#include "xplore/world.hpp"

namespace xplore {

// A (tile, rotation) pair flattened to tile_id * 4 + quarter_turns.
struct Candidate {
    int tile_id = 0;
    int quarter_turns = 0;
    int index() const { return tile_id * kRotations + quarter_turns; }
    static Candidate from_index(int i) { return {i / kRotations, i % kRotations}; }
};

/// Precomputed socket compatibility over every candidate pair and side.
class Adjacency {
public:
    explicit Adjacency(const TileSet& tileset);

    int candidates() const { return n_; }
    // May `b` sit on side `d` of `a`?
    bool allows(int a, Dir d, int b) const {
        return table_[(static_cast<std::size_t>(d) * n_ + a) * n_ + b] != 0;
    }

    // Bit-packed domain for support queries.
    std::vector<std::uint64_t> pack(const std::vector<unsigned char>& domain) const;
    // Does the packed domain on side `d` of `b` hold a candidate compatible with `b`?
    bool supported(const std::vector<std::uint64_t>& packed, Dir d, int b) const;

private:
    int n_ = 0;
    int words_ = 0;
    std::vector<unsigned char> table_;
    std::vector<std::uint64_t> support_;
};

struct WaveState {
    // domains[row * 7 + col][candidate] is 1 while the candidate is possible.
    std::vector<std::vector<unsigned char>> domains;
    std::uint64_t rng_seed = 0;

    int count(int cell) const;
    bool collapsed(int cell) const { return count(cell) == 1; }
    bool any_empty() const;
};

// Full domains restricted to candidates with positive weight under the preset.
WaveState initial_wave(const TileSet& tileset, Preset preset, std::uint64_t seed);

/// Restore arc consistency after `cell` changed: every surviving candidate
/// keeps at least one supporting candidate in each orthogonal neighbor.
/// Returns false as soon as a domain empties.
bool propagate(WaveState& state, const Adjacency& adjacency, int cell);

struct GenerateResult {
    TileGrid grid{};
    int restarts = 0;
    std::uint64_t final_seed = 0;
};

/// Tile-level wave function collapse. Cells are collapsed in order of the
/// lowest Shannon entropy of their weighted domain (ties broken uniformly
/// with the seeded generator) and each collapse samples a candidate in
/// proportion to its tile's preset weight. On contradiction the whole run
/// restarts with seed + 1; after 100 restarts ContradictionError is thrown.
GenerateResult generate(const TileSet& tileset, Preset preset, std::uint64_t seed);

inline constexpr int kMaxRestarts = 100;

// Shannon entropy (nats) of a domain under the preset weights.
double domain_entropy(const std::vector<unsigned char>& domain, const TileSet& tileset, Preset preset);

// Pairwise socket compatibility only (no heights); empty means valid.
std::vector<ValidationError::Offense> socket_violations(const TileGrid& grid, const TileSet& tileset);

}  // namespace xplore
