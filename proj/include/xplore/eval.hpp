#pragma once

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "xplore/agent.hpp"
#include "xplore/world.hpp"

namespace xplore {

inline constexpr int kRegionCount = kGridSize * kGridSize;  // 50x50 regions

// Row-major (z, x) index of the 50x50 region holding a point.
int region_of(double x, double z);
std::array<int, kRegionCount> region_counts(const TraceLog& trace);

double coverage(const TraceLog& trace);

/// Share of objects whose footprint came within `radius` of some tick
/// position. A level without objects scores 0.
double inspection(const TraceLog& trace, const Level& level, double radius = 10.0);

// Shannon entropy in bits of a visit histogram.
double entropy_bits(std::span<const int> counts);

/// Entropy of the tick-visit distribution over regions divided by
/// `normalization` (log2 of the region count by default).
double entropy(const TraceLog& trace, double normalization);
double entropy(const TraceLog& trace);

// ---- novelty

struct NoveltyParams {
    double rate = 0.03;    // recovery per second
    double max = 0.1;      // M
    double penalty = 0.1;  // P, applied on a kind's first sighting

    void validate() const;
    friend bool operator==(const NoveltyParams&, const NoveltyParams&) = default;
};

struct KindNovelty {
    double value = 0.0;
    bool fresh = false;  // first sighting happens this tick
};

struct NoveltyState {
    NoveltyParams params;
    std::map<std::string, KindNovelty> kinds;  // kinds seen at least once
};

/// Advance one tick. Kinds seen for the first time start at M and are
/// penalised by P; every other known kind recovers by r * dt up to M. The
/// return value sums the pre-update scores of the kinds visible this tick.
double novelty_tick(NoveltyState& state, const std::set<std::string>& visible_kinds, double dt);

// Per-tick novelty along a trace; object ids resolve to kinds through the level.
std::vector<double> novelty_series(const TraceLog& trace, const Level& level, const NoveltyParams& params);
double novelty_avg(const TraceLog& trace, const Level& level, const NoveltyParams& params);

// Mean chosen score over the scheduled decisions. Throws DomainError for
// the random control agent.
double motivation_avg(const TraceLog& trace);

// ---- episode and level scores

struct EvalParams {
    NoveltyParams novelty;
    double entropy_normalization = std::log2(static_cast<double>(kRegionCount));
    double inspect_radius = 10.0;

    void validate() const;
};

struct EpisodeScores {
    double coverage = 0.0;
    double inspection = 0.0;
    double entropy = 0.0;
    double novelty_avg = 0.0;
    std::optional<double> motivation_avg;  // absent for random control

    friend bool operator==(const EpisodeScores&, const EpisodeScores&) = default;
};

EpisodeScores score_episode(const TraceLog& trace, const Level& level, const EvalParams& params = {});

nlohmann::json to_json(const EpisodeScores& s);

// The five single-metric configurations followed by the all-metrics one.
std::vector<MetricConfig> experiment_configs();

struct FitnessParams {
    double coverage_min = 0.20;    // inclusive
    double coverage_max = 0.80;    // inclusive
    double entropy_max = 0.90;     // inclusive
    double inspection_min = 0.10;  // exclusive
    double inspection_max = 0.80;  // inclusive
    std::map<std::string, double> weights = default_weights();

    static std::map<std::string, double> default_weights();
    void validate() const;
};

struct ConfigFitness {
    std::string config;
    int episodes = 0;
    double coverage = 0.0;
    double entropy = 0.0;
    double inspection = 0.0;
    double motivation_avg = 0.0;
    double novelty_avg = 0.0;
    bool gate_coverage = false;
    bool gate_entropy = false;
    bool gate_inspection = false;
    double f = 0.0;
    double weight = 0.0;
};

struct ControlSummary {
    int episodes = 0;
    double coverage = 0.0;
    double entropy = 0.0;
    double inspection = 0.0;
    double novelty_avg = 0.0;
};

struct FitnessReport {
    std::vector<ConfigFitness> configs;  // in weight-table order
    std::optional<ControlSummary> random_control;
    double F = 0.0;
};

using LevelResults = std::map<std::string, std::vector<EpisodeScores>>;

/// Gated weighted fitness. Each weighted config must have at least one
/// episode; a StructuralError names the missing ones. Results under the
/// random control name are summarised but carry no weight.
FitnessReport fitness(const LevelResults& results, const FitnessParams& params = {});

nlohmann::json to_json(const FitnessReport& r);

}  // namespace xplore
