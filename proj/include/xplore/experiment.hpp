#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xplore/agent.hpp"
#include "xplore/eval.hpp"
#include "xplore/wfc.hpp"
#include "xplore/world.hpp"

namespace xplore {

// Tunable constants read from an experiment config file.
struct Settings {
    AgentParams agent;
    EvalParams eval;
    FitnessParams fitness;
};

/// Config file layout (every key optional):
///   {"view": {"length_of_view", "field_of_view"},
///    "agent": {"speed", "decision_time", "move_distance", "tick", ...},
///    "novelty": {"rate", "max", "penalty"},
///    "entropy_normalization": number,
///    "fitness": {"weights": {config: w}, "coverage_min", ...}}
Settings settings_from_json(const nlohmann::json& j);
Settings load_settings(const std::filesystem::path& path);
nlohmann::json to_json(const Settings& s);

inline constexpr double kMinSpawnSeparation = 100.0;

/// Seeded rejection sampling of walkable points pairwise at least
/// `separation` apart. The stream is derived from master_seed and the
/// level id. Throws DomainError when no such set is found.
std::vector<Vec2> select_spawns(const Level& level, std::uint64_t master_seed, int count,
                                double separation = kMinSpawnSeparation);

// Seed splitting: master -> level -> config -> spawn.
std::uint64_t level_seed(std::uint64_t master_seed, const std::string& level_id);
std::uint64_t episode_seed(std::uint64_t master_seed, const std::string& level_id, const std::string& config,
                           int spawn_index);

// Level id used by the generate command: "<preset>-<seed>".
std::string generated_level_id(Preset preset, std::uint64_t seed);
Level generate_level(const TileSet& tileset, Preset preset, std::uint64_t seed);

struct ExperimentPlan {
    std::vector<Level> levels;
    std::vector<std::string> configs;  // metric config names plus "random"
    int spawns_per_level = 3;
    std::uint64_t master_seed = 1;
    Settings settings;
    int workers = 1;

    // The six metric configurations followed by the random control.
    static std::vector<std::string> default_configs();
};

struct EpisodeResult {
    std::string config;
    int spawn_index = 0;
    std::uint64_t seed = 0;
    std::optional<EpisodeScores> scores;
    std::string error;  // set when the episode failed
};

struct LevelOutcome {
    std::string level_id;
    std::string preset;
    std::vector<Vec2> spawns;
    std::vector<EpisodeResult> episodes;  // config-major, spawn-minor
    std::optional<FitnessReport> report;  // absent when an episode failed
    std::string error;

    bool partial() const { return !report; }
};

struct ExperimentResult {
    std::vector<LevelOutcome> levels;
    bool ok() const;
};

/// Run every (level, config, spawn) episode across `plan.workers` threads.
/// With `out_dir` set each trace is written to
///   out_dir/traces/<level>/<config>__spawn<k>.jsonl
/// and after all episodes finish the per-level reports, the summary and
/// copies of the levels are written serially. Output is identical for any
/// worker count.
ExperimentResult run_experiment(const ExperimentPlan& plan,
                                const std::optional<std::filesystem::path>& out_dir = std::nullopt);

std::string trace_file_name(const std::string& config, int spawn_index);

nlohmann::json level_report_json(const LevelOutcome& outcome, const ExperimentPlan& plan);
nlohmann::json summary_json(const ExperimentResult& result);
std::string summary_csv(const ExperimentResult& result);

void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace xplore
