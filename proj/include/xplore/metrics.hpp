#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "xplore/perception.hpp"
#include "xplore/world.hpp"

namespace xplore {

enum class Metric { ElevationChange, Openness, AnticipationDetection, LargeObjectDetection, GroupDetection };

inline constexpr std::array<Metric, 5> kAllMetrics = {Metric::ElevationChange, Metric::Openness,
                                                      Metric::AnticipationDetection, Metric::LargeObjectDetection,
                                                      Metric::GroupDetection};

inline bool is_direction_metric(Metric m) { return m == Metric::ElevationChange || m == Metric::Openness; }

// CLI tokens: elevation, openness, anticipation, large-object, group.
const char* metric_token(Metric m);
Metric parse_metric(const std::string& token);

/// Active metric subset; scores are averaged over the active metrics.
class MetricConfig {
public:
    MetricConfig() = default;
    explicit MetricConfig(std::vector<Metric> active);

    static MetricConfig single(Metric m) { return MetricConfig({m}); }
    static MetricConfig all() { return MetricConfig({kAllMetrics.begin(), kAllMetrics.end()}); }
    // "all" or one metric token.
    static MetricConfig parse(const std::string& token);

    const std::vector<Metric>& active() const { return active_; }
    bool has(Metric m) const;
    bool any_object_metric() const;
    std::string name() const;

    friend bool operator==(const MetricConfig&, const MetricConfig&) = default;

private:
    std::vector<Metric> active_;  // canonical order, no duplicates
};

struct MetricState {
    std::optional<double> largest_seen;  // volume of the largest object met so far
};

inline constexpr double kGroupRadius = 40.0;

// ---- direction-based

// min(0.1 * rise, 1) for a positive rise, 0 otherwise.
double elevation_score(double rise);

/// Horizontal ray from the eye. A miss or a hit on an object scores 0. On a
/// terrain hit the rise is measured from the eye to the highest terrain
/// along the direction between the hit and the end of view: a level ray
/// always meets the ground at eye height, so the crest behind the hit is
/// what tells a knee-high bump from a cliff.
double elevation_change(const Level& level, const AgentPose& pose, int direction, double length_of_view);

// 0 for a miss, d / L for a hit at distance d.
double openness_score(std::optional<double> hit_distance, double length_of_view);
double openness(const Level& level, const AgentPose& pose, int direction, double length_of_view);

// ---- object-based

/// Share of the in-view sector hidden behind the object. With angular
/// half-width theta = atan(extent / 2d) the shadow behind it covers about
/// theta * (L^2 - d^2); the score divides by the half-cone area
/// (fov/2) * L^2 and clamps to 1. Zero at or beyond the view range.
double anticipation_score(double extent, double distance, double length_of_view, double field_of_view_deg);
double anticipation_detection(const AgentPose& pose, const WorldObject& object, const ViewParams& view);

// Updates state.largest_seen; 1 for a new largest (or equal), else the volume ratio.
double large_object_detection(MetricState& state, const WorldObject& object);

// min(0.1 * neighbours within kGroupRadius of the center, 1).
double group_detection(const Level& level, int object_index);

// ---- aggregation

struct ObjectScores {
    int object = -1;
    int bucket = 0;
    double anticipation = 0.0;
    double large = 0.0;
    double group = 0.0;
};

// Object-metric scores for each visible object, in visibility order. Only
// active metrics are evaluated; the large-object state advances in that order.
std::vector<ObjectScores> score_objects(const MetricConfig& config, MetricState& state, const Level& level,
                                        const AgentPose& pose, const ViewParams& view, std::span<const int> visible);

struct DirectionScore {
    double score = 0.0;
    std::optional<int> associated_object;  // index into level.objects
};

/// Mean over active metrics of: each direction metric's value for this
/// direction, and each object metric's maximum over the bucket. The
/// associated object is the bucket member with the largest total of active
/// object-metric scores, when that total is positive.
DirectionScore score_direction(const MetricConfig& config, const Level& level, const AgentPose& pose,
                               const ViewParams& view, int direction, std::span<const ObjectScores> bucket);

}  // namespace xplore
