#include "xplore/wfc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "xplore/errors.hpp"

namespace xplore {

namespace {

constexpr int kCells = kGridSize * kGridSize;

int neighbor(int cell, Dir d) {
    const int r = cell / kGridSize + kDirOffsets[static_cast<std::size_t>(d)].first;
    const int c = cell % kGridSize + kDirOffsets[static_cast<std::size_t>(d)].second;
    if (r < 0 || c < 0 || r >= kGridSize || c >= kGridSize) return -1;
    return r * kGridSize + c;
}

double candidate_weight(const TileSet& ts, Preset p, int candidate) {
    return ts.weight(Candidate::from_index(candidate).tile_id, p);
}

}  // namespace

Adjacency::Adjacency(const TileSet& tileset) : n_(tileset.size() * kRotations) {
    table_.assign(static_cast<std::size_t>(4 * n_ * n_), 0);
    for (Dir d : kDirs) {
        for (int a = 0; a < n_; ++a) {
            const Candidate ca = Candidate::from_index(a);
            const std::string& sa = rotated_socket(tileset.tile(ca.tile_id), ca.quarter_turns, d);
            for (int b = 0; b < n_; ++b) {
                const Candidate cb = Candidate::from_index(b);
                const std::string& sb = rotated_socket(tileset.tile(cb.tile_id), cb.quarter_turns, opposite(d));
                table_[(static_cast<std::size_t>(d) * n_ + a) * n_ + b] = tileset.compatible(sa, sb) ? 1 : 0;
            }
        }
    }
    words_ = (n_ + 63) / 64;
    support_.assign(static_cast<std::size_t>(4 * n_ * words_), 0);
    for (Dir d : kDirs) {
        for (int b = 0; b < n_; ++b) {
            for (int a = 0; a < n_; ++a) {
                // `a` sits on side d of `b` iff `b` sits on side opposite(d) of `a`.
                if (allows(a, opposite(d), b)) {
                    support_[(static_cast<std::size_t>(d) * n_ + b) * words_ + a / 64] |= std::uint64_t{1} << (a % 64);
                }
            }
        }
    }
}

std::vector<std::uint64_t> Adjacency::pack(const std::vector<unsigned char>& domain) const {
    std::vector<std::uint64_t> out(static_cast<std::size_t>(words_), 0);
    for (int i = 0; i < n_; ++i) {
        if (domain[static_cast<std::size_t>(i)]) out[static_cast<std::size_t>(i / 64)] |= std::uint64_t{1} << (i % 64);
    }
    return out;
}

bool Adjacency::supported(const std::vector<std::uint64_t>& packed, Dir d, int b) const {
    const std::uint64_t* s = &support_[(static_cast<std::size_t>(d) * n_ + b) * words_];
    for (int w = 0; w < words_; ++w) {
        if (packed[static_cast<std::size_t>(w)] & s[w]) return true;
    }
    return false;
}

int WaveState::count(int cell) const {
    const auto& d = domains[static_cast<std::size_t>(cell)];
    return static_cast<int>(std::count(d.begin(), d.end(), 1));
}

bool WaveState::any_empty() const {
    for (int c = 0; c < static_cast<int>(domains.size()); ++c) {
        if (count(c) == 0) return true;
    }
    return false;
}

WaveState initial_wave(const TileSet& tileset, Preset preset, std::uint64_t seed) {
    const int n = tileset.size() * kRotations;
    std::vector<unsigned char> full(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) full[static_cast<std::size_t>(i)] = candidate_weight(tileset, preset, i) > 0.0 ? 1 : 0;
    WaveState s;
    s.domains.assign(kCells, full);
    s.rng_seed = seed;
    return s;
}

bool propagate(WaveState& state, const Adjacency& adjacency, int cell) {
    const int n = adjacency.candidates();
    std::deque<int> work{cell};
    std::vector<char> queued(kCells, 0);
    queued[static_cast<std::size_t>(cell)] = 1;
    while (!work.empty()) {
        const int cur = work.front();
        work.pop_front();
        queued[static_cast<std::size_t>(cur)] = 0;
        const auto& src = state.domains[static_cast<std::size_t>(cur)];
        for (Dir d : kDirs) {
            const int nb = neighbor(cur, d);
            if (nb < 0) continue;
            auto& dst = state.domains[static_cast<std::size_t>(nb)];
            const auto packed = adjacency.pack(src);
            bool changed = false;
            for (int b = 0; b < n; ++b) {
                if (!dst[static_cast<std::size_t>(b)]) continue;
                if (!adjacency.supported(packed, opposite(d), b)) {
                    dst[static_cast<std::size_t>(b)] = 0;
                    changed = true;
                }
            }
            if (changed) {
                if (state.count(nb) == 0) return false;
                if (!queued[static_cast<std::size_t>(nb)]) {
                    queued[static_cast<std::size_t>(nb)] = 1;
                    work.push_back(nb);
                }
            }
        }
    }
    return true;
}

double domain_entropy(const std::vector<unsigned char>& domain, const TileSet& tileset, Preset preset) {
    double sum = 0.0;
    double sum_wlogw = 0.0;
    for (std::size_t i = 0; i < domain.size(); ++i) {
        if (!domain[i]) continue;
        const double w = candidate_weight(tileset, preset, static_cast<int>(i));
        if (w <= 0.0) continue;
        sum += w;
        sum_wlogw += w * std::log(w);
    }
    if (sum <= 0.0) return 0.0;
    return std::log(sum) - sum_wlogw / sum;
}

namespace {

// One attempt; returns false on contradiction and reports the failing cell.
bool attempt(const TileSet& tileset, const Adjacency& adjacency, Preset preset, std::uint64_t seed, TileGrid& out,
             int& failed_cell) {
    WaveState state = initial_wave(tileset, preset, seed);
    Rng rng(seed);
    if (state.any_empty()) {
        failed_cell = 0;
        return false;
    }
    while (true) {
        // Lowest-entropy undecided cell.
        double best = std::numeric_limits<double>::infinity();
        std::vector<int> ties;
        for (int c = 0; c < kCells; ++c) {
            if (state.count(c) <= 1) continue;
            const double h = domain_entropy(state.domains[static_cast<std::size_t>(c)], tileset, preset);
            if (h < best - 1e-12) {
                best = h;
                ties.assign(1, c);
            } else if (std::abs(h - best) <= 1e-12) {
                ties.push_back(c);
            }
        }
        if (ties.empty()) break;
        const int cell = ties[static_cast<std::size_t>(rng.below(ties.size()))];

        auto& dom = state.domains[static_cast<std::size_t>(cell)];
        double total = 0.0;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (dom[i]) total += candidate_weight(tileset, preset, static_cast<int>(i));
        }
        double pick = rng.uniform() * total;
        int chosen = -1;
        for (std::size_t i = 0; i < dom.size(); ++i) {
            if (!dom[i]) continue;
            chosen = static_cast<int>(i);
            pick -= candidate_weight(tileset, preset, chosen);
            if (pick < 0.0) break;
        }
        std::fill(dom.begin(), dom.end(), 0);
        dom[static_cast<std::size_t>(chosen)] = 1;
        if (!propagate(state, adjacency, cell)) {
            failed_cell = cell;
            return false;
        }
    }
    for (int c = 0; c < kCells; ++c) {
        const auto& dom = state.domains[static_cast<std::size_t>(c)];
        const int idx = static_cast<int>(std::find(dom.begin(), dom.end(), 1) - dom.begin());
        const Candidate cand = Candidate::from_index(idx);
        out[c / kGridSize][c % kGridSize] = {cand.tile_id, cand.quarter_turns * 90, c / kGridSize, c % kGridSize};
    }
    return true;
}

}  // namespace

GenerateResult generate(const TileSet& tileset, Preset preset, std::uint64_t seed) {
    const Adjacency adjacency(tileset);
    GenerateResult result;
    int failed_cell = -1;
    for (int restart = 0; restart <= kMaxRestarts; ++restart) {
        const std::uint64_t s = seed + static_cast<std::uint64_t>(restart);
        if (attempt(tileset, adjacency, preset, s, result.grid, failed_cell)) {
            result.restarts = restart;
            result.final_seed = s;
            return result;
        }
    }
    throw ContradictionError("wave function collapse failed for preset " + std::string(preset_name(preset)) +
                             " seeds " + std::to_string(seed) + ".." + std::to_string(seed + kMaxRestarts) +
                             ": last contradiction at cell (" + std::to_string(failed_cell / kGridSize) + "," +
                             std::to_string(failed_cell % kGridSize) + ")");
}

std::vector<ValidationError::Offense> socket_violations(const TileGrid& grid, const TileSet& tileset) {
    std::vector<ValidationError::Offense> out;
    for (int r = 0; r < kGridSize; ++r) {
        for (int c = 0; c < kGridSize; ++c) {
            const PlacedTile& a = grid[r][c];
            for (Dir d : {Dir::East, Dir::South}) {
                const int nr = r + kDirOffsets[static_cast<std::size_t>(d)].first;
                const int nc = c + kDirOffsets[static_cast<std::size_t>(d)].second;
                if (nr >= kGridSize || nc >= kGridSize) continue;
                const PlacedTile& b = grid[nr][nc];
                const auto& sa = rotated_socket(tileset.tile(a.tile_id), rotation_steps(a.rotation), d);
                const auto& sb = rotated_socket(tileset.tile(b.tile_id), rotation_steps(b.rotation), opposite(d));
                if (!tileset.compatible(sa, sb)) out.push_back({r, c, nr, nc, sa + "|" + sb});
            }
        }
    }
    return out;
}

}  // namespace xplore
