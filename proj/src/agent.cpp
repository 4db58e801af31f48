#include "xplore/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "xplore/errors.hpp"

namespace xplore {

using nlohmann::json;

void AgentParams::validate() const {
    view.validate();
    if (!(decision_time > 0.0)) throw StructuralError("decision_time must be positive");
    if (!(speed > 0.0)) throw StructuralError("speed must be positive");
    if (!(move_distance > 0.0)) throw StructuralError("move_distance must be positive");
    if (!(sim_duration > 0.0)) throw StructuralError("sim_duration must be positive");
    if (!(tick > 0.0)) throw StructuralError("tick must be positive");
    if (!(inspect_radius >= 0.0)) throw StructuralError("inspect_radius must be non-negative");
    if (object_snap_radius < 0) throw StructuralError("object_snap_radius must be non-negative");
}

int AgentParams::ticks() const { return static_cast<int>(std::lround(sim_duration / tick)); }

int AgentParams::ticks_per_decision() const {
    return std::max(1, static_cast<int>(std::lround(decision_time / tick)));
}

json to_json(const AgentParams& p) {
    return {{"length_of_view", p.view.length_of_view},
            {"field_of_view", p.view.field_of_view},
            {"decision_time", p.decision_time},
            {"move_distance", p.move_distance},
            {"speed", p.speed},
            {"sim_duration", p.sim_duration},
            {"tick", p.tick},
            {"inspect_radius", p.inspect_radius},
            {"object_snap_radius", p.object_snap_radius}};
}

AgentParams agent_params_from_json(const json& j, AgentParams p) {
    if (!j.is_object()) throw StructuralError("agent params must be an object");
    auto num = [&](const char* key, double& field) {
        if (!j.contains(key)) return;
        if (!j.at(key).is_number()) throw StructuralError(std::string("agent param '") + key + "' must be a number");
        field = j.at(key).get<double>();
    };
    num("length_of_view", p.view.length_of_view);
    num("field_of_view", p.view.field_of_view);
    num("decision_time", p.decision_time);
    num("move_distance", p.move_distance);
    num("speed", p.speed);
    num("sim_duration", p.sim_duration);
    num("tick", p.tick);
    num("inspect_radius", p.inspect_radius);
    if (j.contains("object_snap_radius")) {
        if (!j.at("object_snap_radius").is_number_integer())
            throw StructuralError("agent param 'object_snap_radius' must be an integer");
        p.object_snap_radius = j.at("object_snap_radius").get<int>();
    }
    p.validate();
    return p;
}

InterestMap build_interest_map(const Level& level, const AgentPose& pose, const MetricConfig& config,
                               const ViewParams& view, MetricState& state, std::span<const int> candidates) {
    InterestMap map;
    map.scores.fill(kUnscored);
    const DirectionFan fan = sample_fan(pose, view);
    const std::vector<ObjectScores> objects = score_objects(config, state, level, pose, view, candidates);

    std::vector<ObjectScores> bucket;
    auto score_one = [&](int i) {
        bucket.clear();
        for (const auto& s : objects) {
            if (s.bucket == i) bucket.push_back(s);
        }
        const DirectionScore d = score_direction(config, level, pose, view, i, bucket);
        map.scores[static_cast<std::size_t>(i)] = std::clamp(d.score, 0.0, 1.0);
        map.associated[static_cast<std::size_t>(i)] = d.associated_object;
    };

    bool any = false;
    for (int i = 0; i < kFanSize; ++i) {
        if (!fan.in_fov[static_cast<std::size_t>(i)]) continue;
        score_one(i);
        any = true;
    }
    // A cone narrower than the fan spacing may miss every direction.
    if (!any) score_one(bucket_of(pose, ground(pose.position) + yaw_vector(pose.heading)));
    return map;
}

int choose_direction(const InterestMap& map, Rng& rng) {
    double best = kUnscored;
    for (double s : map.scores) best = std::max(best, s);
    if (best == kUnscored) throw DomainError("interest map has no scored direction");
    std::array<int, kFanSize> ties{};
    std::size_t n = 0;
    for (int i = 0; i < kFanSize; ++i) {
        if (map.scores[static_cast<std::size_t>(i)] == best) ties[n++] = i;
    }
    return ties[rng.below(n)];
}

namespace {

std::optional<Path> path_to_object(const Level& level, const AgentPose& pose, const WorldObject& o, int snap) {
    const auto goal = nearest_walkable(level.nav, ground(o.position), snap);
    if (!goal) return std::nullopt;
    const auto start = nearest_walkable(level.nav, ground(pose.position), 2);
    if (!start) return std::nullopt;
    return find_path(level.nav, *start, *goal);
}

}  // namespace

bool passable(const Level& level, const AgentPose& pose, int direction, double clearance) {
    return walkable_run(level.nav, ground(pose.position), fan_direction(direction), clearance) >= clearance;
}

namespace {

// Uniform pick among fan directions the agent can walk at least `clearance` along.
std::optional<int> any_passable(const Level& level, const AgentPose& pose, double clearance, Rng& rng) {
    std::array<int, kFanSize> options{};
    std::size_t n = 0;
    for (int i = 0; i < kFanSize; ++i) {
        if (passable(level, pose, i, clearance)) options[n++] = i;
    }
    if (n == 0) return std::nullopt;
    return options[rng.below(n)];
}

}  // namespace

NavigationDecision decide(const Level& level, const AgentPose& pose, const MetricConfig& config,
                          const AgentParams& params, MetricState& state, std::span<const int> candidates, Rng& rng) {
    InterestMap map = build_interest_map(level, pose, config, params.view, state, candidates);
    const double clearance = params.speed * params.tick;
    InterestMap open = map;
    bool any_open = false;
    for (int i = 0; i < kFanSize; ++i) {
        const auto k = static_cast<std::size_t>(i);
        if (open.scores[k] == kUnscored) continue;
        if (!open.associated[k] && !passable(level, pose, i, clearance)) {
            open.scores[k] = kUnscored;
        } else {
            any_open = true;
        }
    }
    NavigationDecision d;
    if (!any_open) {
        // Facing a wall: turn toward any open direction.
        if (auto turn = any_passable(level, pose, clearance, rng)) {
            d.direction = *turn;
            d.score = 0.0;
            return d;
        }
        open = map;
    }
    d.direction = choose_direction(open, rng);
    d.score = map.scores[static_cast<std::size_t>(d.direction)];
    d.object = map.associated[static_cast<std::size_t>(d.direction)];
    if (d.object) {
        const WorldObject& o = level.objects[static_cast<std::size_t>(*d.object)];
        if (auto path = path_to_object(level, pose, o, params.object_snap_radius)) {
            d.kind = NavigationDecision::Kind::MoveToObject;
            d.path = std::move(*path);
        }
        // Unreachable: the object stays attached so the caller can drop it,
        // and the agent walks the direction instead.
    }
    return d;
}

double walkable_run(const NavGrid& nav, Vec2 p, Vec2 dir, double max_dist) {
    constexpr double kMargin = 1e-6;
    if (!nav.walkable_at(p.x, p.z)) return 0.0;
    const double cs = NavGrid::cell_size;
    int ix = static_cast<int>(std::floor(p.x / cs));
    int iz = static_cast<int>(std::floor(p.z / cs));
    const int sx = dir.x > 0 ? 1 : (dir.x < 0 ? -1 : 0);
    const int sz = dir.z > 0 ? 1 : (dir.z < 0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();
    auto first_crossing = [&](double pos, int idx, int s, double d) {
        if (s == 0) return inf;
        const double boundary = (s > 0 ? idx + 1 : idx) * cs;
        return (boundary - pos) / d;
    };
    double tx = first_crossing(p.x, ix, sx, dir.x);
    double tz = first_crossing(p.z, iz, sz, dir.z);
    const double dtx = sx == 0 ? inf : cs / std::abs(dir.x);
    const double dtz = sz == 0 ? inf : cs / std::abs(dir.z);
    for (;;) {
        const double t = std::min(tx, tz);
        if (t > max_dist) return max_dist;
        if (tx <= tz) {
            ix += sx;
            tx += dtx;
        } else {
            iz += sz;
            tz += dtz;
        }
        if (!nav.walkable(Cell{ix, iz})) return std::clamp(t - kMargin, 0.0, max_dist);
    }
}

namespace {

void place(const Level& level, AgentState& agent, Vec2 p) {
    agent.pose.position = {p.x, level.heightfield.at(p.x, p.z) + kEyeHeight, p.z};
}

StepResult step_straight(const Level& level, AgentState& agent, const AgentParams& params,
                         const NavigationDecision& d) {
    StepResult r;
    const Vec2 dir = fan_direction(d.direction);
    agent.pose.heading = d.direction * kFanSpacing;
    const double remaining = params.move_distance - agent.travelled;
    const double want = std::min(params.speed * params.tick, remaining);
    const Vec2 from = ground(agent.pose.position);
    const double free = walkable_run(level.nav, from, dir, want);
    r.moved = free;
    if (free > 0.0) place(level, agent, from + dir * free);
    agent.travelled += free;
    if (free < want) r.blocked = true;
    if (agent.travelled >= params.move_distance - 1e-9) r.finished = true;
    return r;
}

StepResult step_path(const Level& level, AgentState& agent, const AgentParams& params,
                     const NavigationDecision& d) {
    StepResult r;
    double budget = params.speed * params.tick;
    const auto& wps = d.path.waypoints;
    Vec2 p = ground(agent.pose.position);
    while (budget > 1e-12 && agent.waypoint < wps.size()) {
        const Vec2 to = wps[agent.waypoint] - p;
        const double len = to.norm();
        if (len <= budget) {
            if (len > 1e-12) agent.pose.heading = yaw_of(to);
            p = wps[agent.waypoint];
            budget -= len;
            r.moved += len;
            ++agent.waypoint;
        } else {
            agent.pose.heading = yaw_of(to);
            p = p + to * (budget / len);
            r.moved += budget;
            budget = 0.0;
        }
    }
    place(level, agent, p);
    if (agent.waypoint >= wps.size()) r.finished = true;
    if (d.object) {
        const WorldObject& o = level.objects[static_cast<std::size_t>(*d.object)];
        if (footprint_distance(p, o) <= params.inspect_radius) r.finished = true;
    }
    return r;
}

}  // namespace

StepResult step(const Level& level, AgentState& agent, const AgentParams& params) {
    if (!agent.active) throw DomainError("step called without an active decision");
    const NavigationDecision& d = *agent.active;
    StepResult r = d.kind == NavigationDecision::Kind::MoveToObject ? step_path(level, agent, params, d)
                                                                     : step_straight(level, agent, params, d);
    if (r.blocked || r.finished) agent.needs_decision = true;
    return r;
}

bool operator==(const TraceLog& a, const TraceLog& b) {
    return a.level_id == b.level_id && a.config == b.config && a.seed == b.seed && a.spawn == b.spawn &&
           a.params == b.params && a.ticks == b.ticks && a.decisions == b.decisions && a.redecisions == b.redecisions;
}

AgentPose spawn_pose(const Level& level, Vec2 spawn, double heading) {
    if (!in_bounds(spawn.x, spawn.z)) throw DomainError("spawn point outside the level");
    if (level.nav.walkable_at(spawn.x, spawn.z)) return pose_at(level, spawn.x, spawn.z, heading);
    const auto cell = nearest_walkable(level.nav, spawn, 2);
    if (!cell) throw DomainError("spawn point is not walkable and has no walkable cell nearby");
    const Vec2 c = NavGrid::center_of(*cell);
    return pose_at(level, c.x, c.z, heading);
}

namespace {

template <class DecideFn>
TraceLog simulate(const Level& level, Vec2 spawn, std::string config_name, const AgentParams& params,
                  std::uint64_t seed, DecideFn&& choose) {
    params.validate();
    Rng rng(seed);
    AgentState agent;
    agent.pose = spawn_pose(level, spawn, rng.uniform(0.0, 360.0));
    agent.dismissed.assign(level.objects.size(), 0);

    auto dismiss_nearby = [&] {
        const Vec2 p = ground(agent.pose.position);
        for (std::size_t i = 0; i < level.objects.size(); ++i) {
            if (!agent.dismissed[i] && footprint_distance(p, level.objects[i]) <= params.inspect_radius)
                agent.dismissed[i] = 1;
        }
    };
    dismiss_nearby();

    TraceLog log;
    log.level_id = level.id;
    log.config = std::move(config_name);
    log.seed = seed;
    log.spawn = spawn;
    log.params = params;

    const int n = params.ticks();
    const int per_decision = params.ticks_per_decision();
    log.ticks.reserve(static_cast<std::size_t>(n));
    log.decisions.reserve(static_cast<std::size_t>(n / per_decision + 1));

    std::vector<int> visible = visible_objects(level, agent.pose, params.view);
    std::vector<int> candidates;
    for (int k = 0; k < n; ++k) {
        const bool scheduled = k % per_decision == 0;
        if (scheduled || agent.needs_decision) {
            candidates.clear();
            for (int i : visible) {
                if (!agent.dismissed[static_cast<std::size_t>(i)]) candidates.push_back(i);
            }
            NavigationDecision d = choose(agent, candidates, rng);
            if (d.object && d.kind == NavigationDecision::Kind::MoveInDirection) {
                agent.dismissed[static_cast<std::size_t>(*d.object)] = 1;
                d.object.reset();
            }
            DecisionRecord rec;
            rec.time = k * params.tick;
            rec.direction = d.direction;
            rec.score = d.score;
            if (d.object) rec.object = level.objects[static_cast<std::size_t>(*d.object)].id;
            (scheduled ? log.decisions : log.redecisions).push_back(std::move(rec));
            agent.active = std::move(d);
            agent.travelled = 0.0;
            agent.waypoint = 0;
            agent.needs_decision = false;
        }

        step(level, agent, params);
        dismiss_nearby();
        if (agent.active->object && agent.dismissed[static_cast<std::size_t>(*agent.active->object)])
            agent.needs_decision = true;

        visible = visible_objects(level, agent.pose, params.view);
        TickRecord t;
        t.time = (k + 1) * params.tick;
        t.position = agent.pose.position;
        t.heading = agent.pose.heading;
        t.visible.reserve(visible.size());
        for (int i : visible) t.visible.push_back(level.objects[static_cast<std::size_t>(i)].id);
        log.ticks.push_back(std::move(t));
    }
    return log;
}

}  // namespace

TraceLog run_episode(const Level& level, Vec2 spawn, const MetricConfig& config, const AgentParams& params,
                     std::uint64_t seed) {
    return simulate(level, spawn, config.name(), params, seed,
                    [&](AgentState& agent, std::span<const int> candidates, Rng& rng) {
                        return decide(level, agent.pose, config, params, agent.metrics, candidates, rng);
                    });
}

TraceLog run_random_control(const Level& level, Vec2 spawn, const AgentParams& params, std::uint64_t seed) {
    return simulate(level, spawn, TraceLog::kRandomConfig, params, seed,
                    [&](AgentState& agent, std::span<const int>, Rng& rng) {
                        const DirectionFan fan = sample_fan(agent.pose, params.view);
                        const double clearance = params.speed * params.tick;
                        std::array<int, kFanSize> options{};
                        std::size_t n = 0;
                        for (int i = 0; i < kFanSize; ++i) {
                            if (fan.in_fov[static_cast<std::size_t>(i)] && passable(level, agent.pose, i, clearance))
                                options[n++] = i;
                        }
                        NavigationDecision d;
                        if (n > 0) {
                            d.direction = options[rng.below(n)];
                        } else if (auto turn = any_passable(level, agent.pose, clearance, rng)) {
                            d.direction = *turn;
                        } else {
                            d.direction = bucket_of(agent.pose, ground(agent.pose.position) +
                                                                    yaw_vector(agent.pose.heading));
                        }
                        return d;
                    });
}

// ---- trace files

namespace {

constexpr const char* kTraceFormat = "xplore-trace/1";

json vec3_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

json decision_json(const char* type, const DecisionRecord& d) {
    json j = {{"type", type}, {"t", d.time}, {"direction", d.direction}};
    j["score"] = d.score ? json(*d.score) : json(nullptr);
    j["object"] = d.object ? json(*d.object) : json(nullptr);
    return j;
}

DecisionRecord decision_from_json(const json& j) {
    DecisionRecord d;
    d.time = j.at("t").get<double>();
    d.direction = j.at("direction").get<int>();
    if (j.contains("score") && !j.at("score").is_null()) d.score = j.at("score").get<double>();
    if (j.contains("object") && !j.at("object").is_null()) d.object = j.at("object").get<std::string>();
    return d;
}

}  // namespace

void write_trace(const TraceLog& log, std::ostream& out) {
    const json header = {{"type", "header"},
                         {"format", kTraceFormat},
                         {"level", log.level_id},
                         {"config", log.config},
                         {"seed", log.seed},
                         {"spawn", json::array({log.spawn.x, log.spawn.z})},
                         {"params", to_json(log.params)}};
    out << header.dump() << '\n';

    // Records interleave in time order: a decision at time t precedes the tick ending at t + dt.
    std::size_t di = 0;
    std::size_t ri = 0;
    const double half = log.params.tick / 2.0;
    for (const TickRecord& t : log.ticks) {
        const double start = t.time - half;
        while (di < log.decisions.size() && log.decisions[di].time < start) {
            out << decision_json("decision", log.decisions[di++]).dump() << '\n';
        }
        while (ri < log.redecisions.size() && log.redecisions[ri].time < start) {
            out << decision_json("redecide", log.redecisions[ri++]).dump() << '\n';
        }
        const int cx = std::clamp(static_cast<int>(t.position.x / kTileSize), 0, kGridSize - 1);
        const int cz = std::clamp(static_cast<int>(t.position.z / kTileSize), 0, kGridSize - 1);
        const json rec = {{"type", "tick"},
                          {"t", t.time},
                          {"pos", vec3_json(t.position)},
                          {"heading", t.heading},
                          {"cell", json::array({cz, cx})},
                          {"visible", t.visible}};
        out << rec.dump() << '\n';
    }
    while (di < log.decisions.size()) out << decision_json("decision", log.decisions[di++]).dump() << '\n';
    while (ri < log.redecisions.size()) out << decision_json("redecide", log.redecisions[ri++]).dump() << '\n';
}

void save_trace(const TraceLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot write trace " + path.string());
    write_trace(log, out);
}

TraceLog read_trace(std::istream& in) {
    TraceLog log;
    std::string line;
    bool have_header = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const std::string type = j.at("type").get<std::string>();
            if (type == "header") {
                if (j.at("format").get<std::string>() != kTraceFormat)
                    throw StructuralError("unsupported trace format");
                log.level_id = j.at("level").get<std::string>();
                log.config = j.at("config").get<std::string>();
                log.seed = j.at("seed").get<std::uint64_t>();
                log.spawn = {j.at("spawn").at(0).get<double>(), j.at("spawn").at(1).get<double>()};
                log.params = agent_params_from_json(j.at("params"));
                have_header = true;
            } else if (!have_header) {
                throw StructuralError("record before header");
            } else if (type == "tick") {
                TickRecord t;
                t.time = j.at("t").get<double>();
                const auto& p = j.at("pos");
                t.position = {p.at(0).get<double>(), p.at(1).get<double>(), p.at(2).get<double>()};
                t.heading = j.at("heading").get<double>();
                t.visible = j.at("visible").get<std::vector<std::string>>();
                log.ticks.push_back(std::move(t));
            } else if (type == "decision") {
                log.decisions.push_back(decision_from_json(j));
            } else if (type == "redecide") {
                log.redecisions.push_back(decision_from_json(j));
            } else {
                throw StructuralError("unknown record type '" + type + "'");
            }
        } catch (const json::exception& e) {
            throw StructuralError("trace line " + std::to_string(line_no) + ": " + e.what());
        } catch (const StructuralError& e) {
            throw StructuralError("trace line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (!have_header) throw StructuralError("trace has no header");
    return log;
}

TraceLog load_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StructuralError("cannot read trace " + path.string());
    return read_trace(in);
}

}  // namespace xplore
