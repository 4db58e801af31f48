#pragma once

#include <array>
#include <filesystem>
#include <limits>
#include <span>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "xplore/metrics.hpp"
#include "xplore/perception.hpp"
#include "xplore/rng.hpp"
#include "xplore/world.hpp"

namespace xplore {

struct AgentParams {
    ViewParams view;
    double decision_time = 1.0;  // seconds between scheduled decisions
    double move_distance = 50.0;
    double speed = 10.0;             // units per second
    double sim_duration = 180.0;     // seconds
    double tick = 0.1;               // seconds
    double inspect_radius = 10.0;    // arrival and inspection distance
    int object_snap_radius = 4;      // cells searched for a walkable approach cell

    void validate() const;
    int ticks() const;
    int ticks_per_decision() const;

    friend bool operator==(const AgentParams&, const AgentParams&) = default;
};

nlohmann::json to_json(const AgentParams& p);
AgentParams agent_params_from_json(const nlohmann::json& j, AgentParams base = {});

inline constexpr double kUnscored = -std::numeric_limits<double>::infinity();

struct InterestMap {
    std::array<double, kFanSize> scores{};  // kUnscored outside the field of view
    std::array<std::optional<int>, kFanSize> associated{};
};

/// Stage 1 + 2: score every in-view direction. `candidates` are the objects
/// of interest (visible and not yet inspected).
InterestMap build_interest_map(const Level& level, const AgentPose& pose, const MetricConfig& config,
                               const ViewParams& view, MetricState& state, std::span<const int> candidates);

// Uniformly random index among the maximal in-view scores.
int choose_direction(const InterestMap& map, Rng& rng);

struct NavigationDecision {
    enum class Kind { MoveInDirection, MoveToObject };
    Kind kind = Kind::MoveInDirection;
    int direction = 0;
    std::optional<double> score;  // absent for the random control agent
    std::optional<int> object;
    Path path;
};

// True when the agent can walk `clearance` units along fan direction i.
bool passable(const Level& level, const AgentPose& pose, int direction, double clearance);

/// Stage 3: argmax over the map; an associated object becomes an A*
/// navigation target, otherwise the agent commits to the direction.
/// Directions without an object that cannot be walked for one tick are
/// skipped; when none remain the agent turns to a random open direction
/// with score 0.
NavigationDecision decide(const Level& level, const AgentPose& pose, const MetricConfig& config, const AgentParams& params,
                          MetricState& state, std::span<const int> candidates, Rng& rng);

struct AgentState {
    AgentPose pose;
    MetricState metrics;
    std::optional<NavigationDecision> active;
    double travelled = 0.0;     // along the current straight-line commitment
    std::size_t waypoint = 0;   // next waypoint of the current path
    bool needs_decision = true;
    std::vector<char> dismissed;  // per object: reached, or found unreachable
};

struct StepResult {
    double moved = 0.0;
    bool blocked = false;
    bool finished = false;  // target reached or path exhausted
};

// Longest distance (up to max_dist) that stays on walkable cells from p along dir.
double walkable_run(const NavGrid& nav, Vec2 p, Vec2 dir, double max_dist);

/// Advance one tick along the active decision at params.speed. Straight
/// moves stop at the first unwalkable point; y follows the terrain and the
/// heading follows the attempted motion.
StepResult step(const Level& level, AgentState& agent, const AgentParams& params);

struct TickRecord {
    double time = 0.0;
    Vec3 position;
    double heading = 0.0;
    std::vector<std::string> visible;

    friend bool operator==(const TickRecord&, const TickRecord&) = default;
};

struct DecisionRecord {
    double time = 0.0;
    int direction = 0;
    std::optional<double> score;
    std::optional<std::string> object;

    friend bool operator==(const DecisionRecord&, const DecisionRecord&) = default;
};

struct TraceLog {
    std::string level_id;
    std::string config;  // metric config name, or "random"
    std::uint64_t seed = 0;
    Vec2 spawn;
    AgentParams params;
    std::vector<TickRecord> ticks;
    std::vector<DecisionRecord> decisions;    // one per decision interval; motivation samples
    std::vector<DecisionRecord> redecisions;  // early decisions after arrival or blockage

    bool is_random_control() const { return config == kRandomConfig; }
    static constexpr const char* kRandomConfig = "random";
};

bool operator==(const TraceLog& a, const TraceLog& b);

// Place an agent at a spawn point, snapping to a walkable cell within 2 cells.
AgentPose spawn_pose(const Level& level, Vec2 spawn, double heading);

TraceLog run_episode(const Level& level, Vec2 spawn, const MetricConfig& config, const AgentParams& params,
                     std::uint64_t seed);
TraceLog run_random_control(const Level& level, Vec2 spawn, const AgentParams& params, std::uint64_t seed);

// JSON lines: a header record followed by tick, decision and redecide records.
void write_trace(const TraceLog& log, std::ostream& out);
void save_trace(const TraceLog& log, const std::filesystem::path& path);
TraceLog read_trace(std::istream& in);
TraceLog load_trace(const std::filesystem::path& path);

}  // namespace xplore
