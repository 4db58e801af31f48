#include "xplore/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <thread>

#include "xplore/errors.hpp"

namespace xplore {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void read_number(const json& j, const char* key, double& out) {
    if (!j.contains(key)) return;
    if (!j.at(key).is_number()) throw StructuralError(std::string("config key '") + key + "' must be a number");
    out = j.at(key).get<double>();
}

}  // namespace

Settings settings_from_json(const json& j) {
    if (!j.is_object()) throw StructuralError("config must be a JSON object");
    static const std::vector<std::string> known = {"view", "agent", "novelty", "entropy_normalization", "fitness"};
    for (const auto& [key, value] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw StructuralError("unknown config key '" + key + "'");
    }
    Settings s;
    json agent = j.value("agent", json::object());
    if (j.contains("view")) {
        for (const auto& [key, value] : j.at("view").items()) agent[key] = value;
    }
    s.agent = agent_params_from_json(agent);
    if (j.contains("novelty")) {
        const json& n = j.at("novelty");
        read_number(n, "rate", s.eval.novelty.rate);
        read_number(n, "max", s.eval.novelty.max);
        read_number(n, "penalty", s.eval.novelty.penalty);
    }
    read_number(j, "entropy_normalization", s.eval.entropy_normalization);
    s.eval.inspect_radius = s.agent.inspect_radius;
    if (j.contains("fitness")) {
        const json& f = j.at("fitness");
        read_number(f, "coverage_min", s.fitness.coverage_min);
        read_number(f, "coverage_max", s.fitness.coverage_max);
        read_number(f, "entropy_max", s.fitness.entropy_max);
        read_number(f, "inspection_min", s.fitness.inspection_min);
        read_number(f, "inspection_max", s.fitness.inspection_max);
        if (f.contains("weights")) {
            s.fitness.weights.clear();
            for (const auto& [name, w] : f.at("weights").items()) {
                if (!w.is_number()) throw StructuralError("fitness weight for '" + name + "' must be a number");
                s.fitness.weights[name] = w.get<double>();
            }
        }
    }
    s.eval.validate();
    s.fitness.validate();
    return s;
}

Settings load_settings(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw StructuralError("cannot read config " + path.string());
    try {
        return settings_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw StructuralError("config " + path.string() + ": " + e.what());
    }
}

json to_json(const Settings& s) {
    json weights = json::object();
    for (const auto& [name, w] : s.fitness.weights) weights[name] = w;
    return {{"agent", to_json(s.agent)},
            {"novelty", {{"rate", s.eval.novelty.rate}, {"max", s.eval.novelty.max}, {"penalty", s.eval.novelty.penalty}}},
            {"entropy_normalization", s.eval.entropy_normalization},
            {"fitness",
             {{"coverage_min", s.fitness.coverage_min},
              {"coverage_max", s.fitness.coverage_max},
              {"entropy_max", s.fitness.entropy_max},
              {"inspection_min", s.fitness.inspection_min},
              {"inspection_max", s.fitness.inspection_max},
              {"weights", weights}}}};
}

std::uint64_t level_seed(std::uint64_t master_seed, const std::string& level_id) {
    return derive_seed(master_seed, fnv1a64(level_id));
}

std::uint64_t episode_seed(std::uint64_t master_seed, const std::string& level_id, const std::string& config,
                           int spawn_index) {
    const std::uint64_t per_config = derive_seed(level_seed(master_seed, level_id), fnv1a64(config));
    return derive_seed(per_config, static_cast<std::uint64_t>(spawn_index));
}

std::vector<Vec2> select_spawns(const Level& level, std::uint64_t master_seed, int count, double separation) {
    if (count < 0) throw DomainError("spawn count must be non-negative");
    constexpr int kAttemptsPerRound = 4000;
    constexpr int kRounds = 64;
    Rng rng(derive_seed(level_seed(master_seed, level.id), fnv1a64("spawns")));
    for (int round = 0; round < kRounds; ++round) {
        std::vector<Vec2> picked;
        for (int attempt = 0; attempt < kAttemptsPerRound && static_cast<int>(picked.size()) < count; ++attempt) {
            const Vec2 p{rng.uniform(0.0, kWorldSize), rng.uniform(0.0, kWorldSize)};
            if (!level.nav.walkable_at(p.x, p.z)) continue;
            const bool far = std::all_of(picked.begin(), picked.end(),
                                         [&](const Vec2& q) { return (p - q).norm() >= separation; });
            if (far) picked.push_back(p);
        }
        if (static_cast<int>(picked.size()) == count) return picked;
    }
    throw DomainError("could not place " + std::to_string(count) + " spawns " + std::to_string(separation) +
                      " units apart on level '" + level.id + "'");
}

std::string generated_level_id(Preset preset, std::uint64_t seed) {
    return std::string(preset_name(preset)) + "-" + std::to_string(seed);
}

Level generate_level(const TileSet& tileset, Preset preset, std::uint64_t seed) {
    const GenerateResult g = generate(tileset, preset, seed);
    Level level = build_level(g.grid, tileset, generated_level_id(preset, seed));
    level.preset = preset_name(preset);
    level.seed = seed;
    return level;
}

std::vector<std::string> ExperimentPlan::default_configs() {
    std::vector<std::string> out;
    for (const auto& c : experiment_configs()) out.push_back(c.name());
    out.emplace_back(TraceLog::kRandomConfig);
    return out;
}

bool ExperimentResult::ok() const {
    return std::none_of(levels.begin(), levels.end(), [](const LevelOutcome& l) { return l.partial(); });
}

std::string trace_file_name(const std::string& config, int spawn_index) {
    return config + "__spawn" + std::to_string(spawn_index) + ".jsonl";
}

void write_text_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StructuralError("cannot write " + path.string());
    out << text;
    if (!out) throw StructuralError("failed writing " + path.string());
}

namespace {

struct Job {
    std::size_t level = 0;
    std::size_t slot = 0;  // index into LevelOutcome::episodes
};

}  // namespace

ExperimentResult run_experiment(const ExperimentPlan& plan, const std::optional<fs::path>& out_dir) {
    plan.settings.fitness.validate();
    plan.settings.eval.validate();
    plan.settings.agent.validate();
    if (plan.spawns_per_level < 1) throw DomainError("spawns_per_level must be at least 1");
    std::vector<MetricConfig> metric_configs;
    for (const auto& name : plan.configs) {
        if (name == TraceLog::kRandomConfig) {
            metric_configs.emplace_back();
            continue;
        }
        const MetricConfig c = MetricConfig::parse(name);
        if (c.name() != name) throw StructuralError("config '" + name + "' is not in canonical form");
        metric_configs.push_back(c);
    }

    ExperimentResult result;
    std::vector<Job> jobs;
    for (std::size_t li = 0; li < plan.levels.size(); ++li) {
        const Level& level = plan.levels[li];
        LevelOutcome outcome;
        outcome.level_id = level.id;
        outcome.preset = level.preset;
        try {
            outcome.spawns = select_spawns(level, plan.master_seed, plan.spawns_per_level);
        } catch (const DomainError& e) {
            outcome.error = e.what();
        }
        if (outcome.error.empty()) {
            for (const auto& name : plan.configs) {
                for (int s = 0; s < plan.spawns_per_level; ++s) {
                    EpisodeResult ep;
                    ep.config = name;
                    ep.spawn_index = s;
                    ep.seed = episode_seed(plan.master_seed, level.id, name, s);
                    jobs.push_back({li, outcome.episodes.size()});
                    outcome.episodes.push_back(std::move(ep));
                }
            }
        }
        result.levels.push_back(std::move(outcome));
    }

    auto run_job = [&](const Job& job) {
        const Level& level = plan.levels[job.level];
        LevelOutcome& outcome = result.levels[job.level];
        EpisodeResult& ep = outcome.episodes[job.slot];
        const std::size_t ci = job.slot / static_cast<std::size_t>(plan.spawns_per_level);
        const Vec2 spawn = outcome.spawns[static_cast<std::size_t>(ep.spawn_index)];
        try {
            const TraceLog trace =
                ep.config == TraceLog::kRandomConfig
                    ? run_random_control(level, spawn, plan.settings.agent, ep.seed)
                    : run_episode(level, spawn, metric_configs[ci], plan.settings.agent, ep.seed);
            ep.scores = score_episode(trace, level, plan.settings.eval);
            if (out_dir) save_trace(trace, *out_dir / "traces" / level.id / trace_file_name(ep.config, ep.spawn_index));
        } catch (const std::exception& e) {
            ep.error = e.what();
        }
    };

    if (out_dir) {
        for (const auto& l : result.levels) fs::create_directories(*out_dir / "traces" / l.level_id);
    }
    const int workers = std::max(1, std::min<int>(plan.workers, static_cast<int>(jobs.size())));
    if (workers == 1) {
        for (const Job& job : jobs) run_job(job);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < jobs.size(); i = next++) run_job(jobs[i]);
            });
        }
    }

    for (auto& outcome : result.levels) {
        if (!outcome.error.empty()) continue;
        LevelResults by_config;
        for (const auto& ep : outcome.episodes) {
            if (!ep.error.empty()) {
                outcome.error = ep.config + " spawn " + std::to_string(ep.spawn_index) + ": " + ep.error;
                break;
            }
            by_config[ep.config].push_back(*ep.scores);
        }
        if (!outcome.error.empty()) continue;
        try {
            outcome.report = fitness(by_config, plan.settings.fitness);
        } catch (const std::exception& e) {
            outcome.error = e.what();
        }
    }

    if (out_dir) {
        for (std::size_t li = 0; li < result.levels.size(); ++li) {
            const auto& outcome = result.levels[li];
            write_text_file(*out_dir / "levels" / (outcome.level_id + ".json"),
                            level_to_json(plan.levels[li]).dump(2) + "\n");
            write_text_file(*out_dir / "reports" / (outcome.level_id + ".json"),
                            level_report_json(outcome, plan).dump(2) + "\n");
        }
        write_text_file(*out_dir / "summary.json", summary_json(result).dump(2) + "\n");
        write_text_file(*out_dir / "summary.csv", summary_csv(result));
    }
    return result;
}

json level_report_json(const LevelOutcome& outcome, const ExperimentPlan& plan) {
    json spawns = json::array();
    for (const auto& s : outcome.spawns) spawns.push_back({s.x, s.z});
    json episodes = json::array();
    for (const auto& ep : outcome.episodes) {
        json e = {{"config", ep.config}, {"spawn", ep.spawn_index}, {"seed", ep.seed},
                  {"trace", "traces/" + outcome.level_id + "/" + trace_file_name(ep.config, ep.spawn_index)}};
        if (ep.scores) e["scores"] = to_json(*ep.scores);
        if (!ep.error.empty()) e["error"] = ep.error;
        episodes.push_back(e);
    }
    json j = {{"format", "xplore-fitness/1"},
              {"level", outcome.level_id},
              {"preset", outcome.preset},
              {"status", outcome.partial() ? "partial" : "ok"},
              {"master_seed", plan.master_seed},
              {"settings", to_json(plan.settings)},
              {"spawns", spawns},
              {"episodes", episodes}};
    if (outcome.report) j["fitness"] = to_json(*outcome.report);
    else j["error"] = outcome.error;
    return j;
}

json summary_json(const ExperimentResult& result) {
    json levels = json::array();
    std::map<std::string, std::pair<double, int>> by_preset;
    for (const auto& l : result.levels) {
        json row = {{"level", l.level_id}, {"preset", l.preset}, {"status", l.partial() ? "partial" : "ok"}};
        if (l.report) {
            row["F"] = l.report->F;
            json f = json::object();
            for (const auto& c : l.report->configs) f[c.config] = c.f;
            row["f_m"] = f;
            auto& acc = by_preset[l.preset];
            acc.first += l.report->F;
            acc.second += 1;
        } else {
            row["F"] = nullptr;
            row["error"] = l.error;
        }
        levels.push_back(row);
    }
    json presets = json::object();
    for (const auto& [preset, acc] : by_preset) presets[preset.empty() ? "unspecified" : preset] = {
        {"levels", acc.second}, {"mean_F", acc.first / acc.second}};
    return {{"format", "xplore-summary/1"}, {"levels", levels}, {"presets", presets}};
}

std::string summary_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << std::setprecision(17);
    std::vector<std::string> configs;
    for (const auto& l : result.levels) {
        if (!l.report) continue;
        for (const auto& c : l.report->configs) {
            if (std::find(configs.begin(), configs.end(), c.config) == configs.end()) configs.push_back(c.config);
        }
    }
    out << "level,preset,status,F";
    for (const auto& c : configs) out << ",f_" << c;
    out << '\n';
    for (const auto& l : result.levels) {
        out << l.level_id << ',' << l.preset << ',' << (l.partial() ? "partial" : "ok") << ',';
        if (l.report) out << l.report->F;
        for (const auto& name : configs) {
            out << ',';
            if (!l.report) continue;
            for (const auto& c : l.report->configs) {
                if (c.config == name) out << c.f;
            }
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace xplore
