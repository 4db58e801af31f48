#pragma once

#include <array>
#include <vector>

#include "xplore/geometry.hpp"
#include "xplore/world.hpp"

namespace xplore {

inline constexpr double kEyeHeight = 2.0;
inline constexpr int kFanSize = 36;
inline constexpr double kFanSpacing = 10.0;  // degrees

struct AgentPose {
    Vec3 position;         // eye position: y = ground + kEyeHeight
    double heading = 0.0;  // yaw, degrees

    friend bool operator==(const AgentPose&, const AgentPose&) = default;
};

// Pose standing on the ground at (x, z).
AgentPose pose_at(const Level& level, double x, double z, double heading);

struct ViewParams {
    double length_of_view = 115.0;
    double field_of_view = 90.0;  // degrees, full cone

    void validate() const;
    friend bool operator==(const ViewParams&, const ViewParams&) = default;
};

// Fixed world-frame fan: direction i points at yaw 10*i degrees.
struct DirectionFan {
    std::array<Vec2, kFanSize> directions{};
    std::array<bool, kFanSize> in_fov{};

    int count_in_fov() const;
};

Vec2 fan_direction(int index);
Vec3 fan_direction3(int index);

// Closed test: |yaw - heading| <= fov/2 (with a 1e-9 degree tolerance).
bool within_fov(double heading, double yaw, double field_of_view);

DirectionFan sample_fan(const AgentPose& pose, const ViewParams& view);

// Nearest fan index to the yaw of `target` seen from the pose.
int bucket_of(const AgentPose& pose, Vec2 target);

double ground_distance(const AgentPose& pose, const WorldObject& object);

/// Indices into level.objects of objects whose center lies within
/// length_of_view (ground distance) and field_of_view/2 of the heading and
/// whose center is not hidden behind terrain or another blocking object.
/// Sorted by distance, then id.
std::vector<int> visible_objects(const Level& level, const AgentPose& pose, const ViewParams& view);

}  // namespace xplore
