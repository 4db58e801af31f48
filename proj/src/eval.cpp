#include "xplore/eval.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "xplore/errors.hpp"

namespace xplore {

using nlohmann::json;

int region_of(double x, double z) {
    const int cx = std::clamp(static_cast<int>(std::floor(x / kTileSize)), 0, kGridSize - 1);
    const int cz = std::clamp(static_cast<int>(std::floor(z / kTileSize)), 0, kGridSize - 1);
    return cz * kGridSize + cx;
}

std::array<int, kRegionCount> region_counts(const TraceLog& trace) {
    std::array<int, kRegionCount> counts{};
    for (const auto& t : trace.ticks) ++counts[static_cast<std::size_t>(region_of(t.position.x, t.position.z))];
    return counts;
}

double coverage(const TraceLog& trace) {
    const auto counts = region_counts(trace);
    const auto visited = std::count_if(counts.begin(), counts.end(), [](int c) { return c > 0; });
    return static_cast<double>(visited) / kRegionCount;
}

double inspection(const TraceLog& trace, const Level& level, double radius) {
    if (level.objects.empty()) return 0.0;
    int seen = 0;
    for (const WorldObject& o : level.objects) {
        for (const auto& t : trace.ticks) {
            if (footprint_distance(ground(t.position), o) <= radius) {
                ++seen;
                break;
            }
        }
    }
    return static_cast<double>(seen) / static_cast<double>(level.objects.size());
}

double entropy_bits(std::span<const int> counts) {
    const double total = std::accumulate(counts.begin(), counts.end(), 0.0);
    if (total <= 0.0) return 0.0;
    double h = 0.0;
    for (int c : counts) {
        if (c <= 0) continue;
        const double p = c / total;
        h -= p * std::log2(p);
    }
    return h;
}

double entropy(const TraceLog& trace, double normalization) {
    if (!(normalization > 0.0)) throw DomainError("entropy normalization must be positive");
    const auto counts = region_counts(trace);
    return std::clamp(entropy_bits(counts) / normalization, 0.0, 1.0);
}

double entropy(const TraceLog& trace) { return entropy(trace, EvalParams{}.entropy_normalization); }

void NoveltyParams::validate() const {
    if (!(rate >= 0.0)) throw StructuralError("novelty rate must be non-negative");
    if (!(max > 0.0)) throw StructuralError("novelty max must be positive");
    if (!(penalty >= 0.0)) throw StructuralError("novelty penalty must be non-negative");
}

double novelty_tick(NoveltyState& state, const std::set<std::string>& visible_kinds, double dt) {
    const NoveltyParams& p = state.params;
    for (const auto& kind : visible_kinds) {
        auto [it, inserted] = state.kinds.try_emplace(kind);
        if (inserted) it->second = {p.max, true};
    }
    double total = 0.0;
    for (auto& [kind, k] : state.kinds) {
        const bool seen = visible_kinds.count(kind) != 0;
        if (seen) total += k.value;
        if (k.fresh) {
            k.value = std::max(k.value - p.penalty, 0.0);
            k.fresh = false;
        } else {
            k.value = std::min(k.value + p.rate * dt, p.max);
        }
    }
    return total;
}

std::vector<double> novelty_series(const TraceLog& trace, const Level& level, const NoveltyParams& params) {
    std::map<std::string, std::string> kind_of;
    for (const auto& o : level.objects) kind_of.emplace(o.id, o.kind);
    NoveltyState state;
    state.params = params;
    std::vector<double> out;
    out.reserve(trace.ticks.size());
    std::set<std::string> kinds;
    for (const auto& t : trace.ticks) {
        kinds.clear();
        for (const auto& id : t.visible) {
            const auto it = kind_of.find(id);
            if (it == kind_of.end()) throw StructuralError("trace names unknown object '" + id + "'");
            kinds.insert(it->second);
        }
        out.push_back(novelty_tick(state, kinds, trace.params.tick));
    }
    return out;
}

double novelty_avg(const TraceLog& trace, const Level& level, const NoveltyParams& params) {
    const auto series = novelty_series(trace, level, params);
    if (series.empty()) return 0.0;
    const double mean = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
    return std::clamp(mean, 0.0, 1.0);
}

double motivation_avg(const TraceLog& trace) {
    if (trace.is_random_control()) throw DomainError("the random control agent records no motivation");
    if (trace.decisions.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& d : trace.decisions) {
        if (!d.score) throw StructuralError("decision record without a score");
        sum += *d.score;
    }
    return sum / static_cast<double>(trace.decisions.size());
}

void EvalParams::validate() const {
    novelty.validate();
    if (!(entropy_normalization > 0.0)) throw StructuralError("entropy normalization must be positive");
    if (!(inspect_radius >= 0.0)) throw StructuralError("inspection radius must be non-negative");
}

EpisodeScores score_episode(const TraceLog& trace, const Level& level, const EvalParams& params) {
    if (trace.ticks.empty()) throw DomainError("trace has no ticks");
    EpisodeScores s;
    s.coverage = coverage(trace);
    s.inspection = inspection(trace, level, params.inspect_radius);
    s.entropy = entropy(trace, params.entropy_normalization);
    s.novelty_avg = novelty_avg(trace, level, params.novelty);
    if (!trace.is_random_control()) s.motivation_avg = motivation_avg(trace);
    return s;
}

json to_json(const EpisodeScores& s) {
    json j = {{"coverage", s.coverage}, {"inspection", s.inspection}, {"entropy", s.entropy},
              {"novelty_avg", s.novelty_avg}};
    j["motivation_avg"] = s.motivation_avg ? json(*s.motivation_avg) : json(nullptr);
    return j;
}

std::vector<MetricConfig> experiment_configs() {
    std::vector<MetricConfig> out;
    for (Metric m : kAllMetrics) out.push_back(MetricConfig::single(m));
    out.push_back(MetricConfig::all());
    return out;
}

std::map<std::string, double> FitnessParams::default_weights() {
    std::map<std::string, double> w;
    for (const auto& c : experiment_configs()) w[c.name()] = c.active().size() == 1 ? 0.1 : 0.5;
    return w;
}

void FitnessParams::validate() const {
    if (weights.empty()) throw StructuralError("fitness needs at least one weighted config");
    double sum = 0.0;
    for (const auto& [name, w] : weights) {
        if (!(w >= 0.0)) throw StructuralError("fitness weight for '" + name + "' must be non-negative");
        if (name == TraceLog::kRandomConfig) throw StructuralError("the random control cannot carry a weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-9) throw StructuralError("fitness weights must sum to 1");
    if (!(coverage_min <= coverage_max)) throw StructuralError("coverage gate bounds are inverted");
    if (!(inspection_min <= inspection_max)) throw StructuralError("inspection gate bounds are inverted");
}

namespace {

template <class Get>
double mean_of(const std::vector<EpisodeScores>& v, Get get) {
    double s = 0.0;
    for (const auto& e : v) s += get(e);
    return s / static_cast<double>(v.size());
}

// Weighted configs in experiment order, then any custom names alphabetically.
std::vector<std::string> weight_order(const FitnessParams& params) {
    std::vector<std::string> order;
    for (const auto& c : experiment_configs()) {
        if (params.weights.count(c.name())) order.push_back(c.name());
    }
    for (const auto& [name, w] : params.weights) {
        if (std::find(order.begin(), order.end(), name) == order.end()) order.push_back(name);
    }
    return order;
}

}  // namespace

FitnessReport fitness(const LevelResults& results, const FitnessParams& params) {
    params.validate();
    const auto order = weight_order(params);
    std::string missing;
    for (const auto& name : order) {
        const auto it = results.find(name);
        if (it == results.end() || it->second.empty()) missing += (missing.empty() ? "" : ", ") + name;
    }
    if (!missing.empty()) throw StructuralError("missing results for configs: " + missing);

    FitnessReport r;
    for (const auto& name : order) {
        const auto& eps = results.at(name);
        ConfigFitness c;
        c.config = name;
        c.episodes = static_cast<int>(eps.size());
        c.coverage = mean_of(eps, [](const EpisodeScores& e) { return e.coverage; });
        c.entropy = mean_of(eps, [](const EpisodeScores& e) { return e.entropy; });
        c.inspection = mean_of(eps, [](const EpisodeScores& e) { return e.inspection; });
        c.novelty_avg = mean_of(eps, [](const EpisodeScores& e) { return e.novelty_avg; });
        c.motivation_avg = mean_of(eps, [&](const EpisodeScores& e) {
            if (!e.motivation_avg) throw StructuralError("config '" + name + "' has an episode without motivation");
            return *e.motivation_avg;
        });
        c.gate_coverage = c.coverage >= params.coverage_min && c.coverage <= params.coverage_max;
        c.gate_entropy = c.entropy <= params.entropy_max;
        c.gate_inspection = c.inspection > params.inspection_min && c.inspection <= params.inspection_max;
        const bool pass = c.gate_coverage && c.gate_entropy && c.gate_inspection;
        c.f = pass ? c.motivation_avg * c.novelty_avg : 0.0;
        c.weight = params.weights.at(name);
        r.F += c.weight * c.f;
        r.configs.push_back(c);
    }
    r.F = std::clamp(r.F, 0.0, 1.0);

    if (const auto it = results.find(TraceLog::kRandomConfig); it != results.end() && !it->second.empty()) {
        const auto& eps = it->second;
        ControlSummary s;
        s.episodes = static_cast<int>(eps.size());
        s.coverage = mean_of(eps, [](const EpisodeScores& e) { return e.coverage; });
        s.entropy = mean_of(eps, [](const EpisodeScores& e) { return e.entropy; });
        s.inspection = mean_of(eps, [](const EpisodeScores& e) { return e.inspection; });
        s.novelty_avg = mean_of(eps, [](const EpisodeScores& e) { return e.novelty_avg; });
        r.random_control = s;
    }
    return r;
}

json to_json(const FitnessReport& r) {
    json rows = json::array();
    for (const auto& c : r.configs) {
        rows.push_back({{"config", c.config},
                        {"episodes", c.episodes},
                        {"coverage", c.coverage},
                        {"entropy", c.entropy},
                        {"inspection", c.inspection},
                        {"M_avg", c.motivation_avg},
                        {"N_avg", c.novelty_avg},
                        {"gates", {{"coverage", c.gate_coverage}, {"entropy", c.gate_entropy},
                                   {"inspection", c.gate_inspection}}},
                        {"f_m", c.f},
                        {"weight", c.weight}});
    }
    json j = {{"configs", rows}, {"F", r.F}};
    if (r.random_control) {
        const auto& s = *r.random_control;
        j["random_control"] = {{"episodes", s.episodes},
                               {"coverage", s.coverage},
                               {"entropy", s.entropy},
                               {"inspection", s.inspection},
                               {"N_avg", s.novelty_avg}};
    } else {
        j["random_control"] = nullptr;
    }
    return j;
}

}  // namespace xplore
