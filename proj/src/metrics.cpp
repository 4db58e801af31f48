#include "xplore/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "xplore/errors.hpp"

namespace xplore {

const char* metric_token(Metric m) {
    switch (m) {
        case Metric::ElevationChange: return "elevation";
        case Metric::Openness: return "openness";
        case Metric::AnticipationDetection: return "anticipation";
        case Metric::LargeObjectDetection: return "large-object";
        case Metric::GroupDetection: return "group";
    }
    return "?";
}

Metric parse_metric(const std::string& token) {
    for (Metric m : kAllMetrics) {
        if (token == metric_token(m)) return m;
    }
    throw StructuralError("unknown metric '" + token + "'");
}

MetricConfig::MetricConfig(std::vector<Metric> active) {
    for (Metric m : kAllMetrics) {
        if (std::find(active.begin(), active.end(), m) != active.end()) active_.push_back(m);
    }
    if (active_.empty()) throw StructuralError("metric config needs at least one active metric");
}

MetricConfig MetricConfig::parse(const std::string& token) {
    if (token == "all") return all();
    return single(parse_metric(token));
}

bool MetricConfig::has(Metric m) const { return std::find(active_.begin(), active_.end(), m) != active_.end(); }

bool MetricConfig::any_object_metric() const {
    return std::any_of(active_.begin(), active_.end(), [](Metric m) { return !is_direction_metric(m); });
}

std::string MetricConfig::name() const {
    if (active_.size() == kAllMetrics.size()) return "all";
    std::string out;
    for (Metric m : active_) {
        if (!out.empty()) out += "+";
        out += metric_token(m);
    }
    return out;
}

double elevation_score(double rise) {
    if (!(rise > 0.0)) return 0.0;
    return std::min(0.1 * rise, 1.0);
}

double elevation_change(const Level& level, const AgentPose& pose, int direction, double length_of_view) {
    const Vec3 dir = fan_direction3(direction);
    const auto hit = raycast(level, pose.position, dir, length_of_view);
    if (!hit || hit->kind != HitKind::Terrain) return 0.0;
    double crest = level.heightfield.at(hit->point.x, hit->point.z);
    for (double t = hit->distance; t <= length_of_view; t += 1.0) {
        const Vec3 p = pose.position + dir * t;
        if (!in_bounds(p.x, p.z)) break;
        crest = std::max(crest, level.heightfield.at(p.x, p.z));
    }
    return elevation_score(crest - pose.position.y);
}

double openness_score(std::optional<double> hit_distance, double length_of_view) {
    if (!hit_distance) return 0.0;
    return std::clamp(*hit_distance / length_of_view, 0.0, 1.0);
}

double openness(const Level& level, const AgentPose& pose, int direction, double length_of_view) {
    const auto hit = raycast(level, pose.position, fan_direction3(direction), length_of_view);
    return openness_score(hit ? std::optional<double>(hit->distance) : std::nullopt, length_of_view);
}

double anticipation_score(double extent, double distance, double length_of_view, double field_of_view_deg) {
    if (distance >= length_of_view || !(extent > 0.0)) return 0.0;
    const double d = std::max(distance, 1e-9);
    const double theta = std::atan(extent / (2.0 * d));
    const double hidden = theta * (length_of_view * length_of_view - d * d);
    const double cone = deg_to_rad(field_of_view_deg) / 2.0 * length_of_view * length_of_view;
    return std::clamp(hidden / cone, 0.0, 1.0);
}

double anticipation_detection(const AgentPose& pose, const WorldObject& object, const ViewParams& view) {
    const double extent = std::max(object.size.x, object.size.z);
    return anticipation_score(extent, ground_distance(pose, object), view.length_of_view, view.field_of_view);
}

double large_object_detection(MetricState& state, const WorldObject& object) {
    const double v = object.volume();
    if (!state.largest_seen || v >= *state.largest_seen) {
        state.largest_seen = v;
        return 1.0;
    }
    return v / *state.largest_seen;
}

double group_detection(const Level& level, int object_index) {
    const WorldObject& o = level.objects[static_cast<std::size_t>(object_index)];
    int n = 0;
    for (std::size_t i = 0; i < level.objects.size(); ++i) {
        if (static_cast<int>(i) == object_index) continue;
        if ((level.objects[i].position - o.position).norm() <= kGroupRadius) ++n;
    }
    return std::min(0.1 * n, 1.0);
}

std::vector<ObjectScores> score_objects(const MetricConfig& config, MetricState& state, const Level& level,
                                        const AgentPose& pose, const ViewParams& view, std::span<const int> visible) {
    std::vector<ObjectScores> out;
    if (!config.any_object_metric()) return out;
    out.reserve(visible.size());
    for (int idx : visible) {
        const WorldObject& o = level.objects[static_cast<std::size_t>(idx)];
        ObjectScores s;
        s.object = idx;
        s.bucket = bucket_of(pose, ground(o.position));
        if (config.has(Metric::AnticipationDetection)) s.anticipation = anticipation_detection(pose, o, view);
        if (config.has(Metric::LargeObjectDetection)) s.large = large_object_detection(state, o);
        if (config.has(Metric::GroupDetection)) s.group = group_detection(level, idx);
        out.push_back(s);
    }
    return out;
}

DirectionScore score_direction(const MetricConfig& config, const Level& level, const AgentPose& pose,
                               const ViewParams& view, int direction, std::span<const ObjectScores> bucket) {
    double total = 0.0;
    for (Metric m : config.active()) {
        switch (m) {
            case Metric::ElevationChange:
                total += elevation_change(level, pose, direction, view.length_of_view);
                break;
            case Metric::Openness:
                total += openness(level, pose, direction, view.length_of_view);
                break;
            case Metric::AnticipationDetection: {
                double best = 0.0;
                for (const auto& s : bucket) best = std::max(best, s.anticipation);
                total += best;
                break;
            }
            case Metric::LargeObjectDetection: {
                double best = 0.0;
                for (const auto& s : bucket) best = std::max(best, s.large);
                total += best;
                break;
            }
            case Metric::GroupDetection: {
                double best = 0.0;
                for (const auto& s : bucket) best = std::max(best, s.group);
                total += best;
                break;
            }
        }
    }
    DirectionScore out;
    out.score = total / static_cast<double>(config.active().size());

    double best_sum = 0.0;
    for (const auto& s : bucket) {
        const double sum = s.anticipation + s.large + s.group;
        if (sum > best_sum) {
            best_sum = sum;
            out.associated_object = s.object;
        }
    }
    return out;
}

}  // namespace xplore
