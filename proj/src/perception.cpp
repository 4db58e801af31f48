#include "xplore/perception.hpp"

#include <algorithm>
#include <cmath>

#include "xplore/errors.hpp"

namespace xplore {

AgentPose pose_at(const Level& level, double x, double z, double heading) {
    return {{x, level.heightfield.at(x, z) + kEyeHeight, z}, heading};
}

void ViewParams::validate() const {
    if (!(length_of_view > 0.0)) throw StructuralError("length_of_view must be positive");
    if (!(field_of_view > 0.0 && field_of_view <= 360.0)) throw StructuralError("field_of_view must lie in (0, 360]");
}

int DirectionFan::count_in_fov() const {
    return static_cast<int>(std::count(in_fov.begin(), in_fov.end(), true));
}

Vec2 fan_direction(int index) { return yaw_vector(index * kFanSpacing); }

Vec3 fan_direction3(int index) {
    const Vec2 d = fan_direction(index);
    return {d.x, 0.0, d.z};
}

bool within_fov(double heading, double yaw, double field_of_view) {
    if (field_of_view >= 360.0) return true;
    return std::abs(wrap_degrees(yaw - heading)) <= field_of_view / 2.0 + 1e-9;
}

DirectionFan sample_fan(const AgentPose& pose, const ViewParams& view) {
    DirectionFan fan;
    for (int i = 0; i < kFanSize; ++i) {
        fan.directions[static_cast<std::size_t>(i)] = fan_direction(i);
        fan.in_fov[static_cast<std::size_t>(i)] = within_fov(pose.heading, i * kFanSpacing, view.field_of_view);
    }
    return fan;
}

int bucket_of(const AgentPose& pose, Vec2 target) {
    const double yaw = yaw_of(target - ground(pose.position));
    const int i = static_cast<int>(std::lround(yaw / kFanSpacing));
    return ((i % kFanSize) + kFanSize) % kFanSize;
}

double ground_distance(const AgentPose& pose, const WorldObject& object) {
    return (ground(object.position) - ground(pose.position)).norm();
}

std::vector<int> visible_objects(const Level& level, const AgentPose& pose, const ViewParams& view) {
    struct Entry {
        double distance;
        int index;
    };
    std::vector<Entry> found;
    for (std::size_t i = 0; i < level.objects.size(); ++i) {
        const WorldObject& o = level.objects[i];
        const double d = ground_distance(pose, o);
        if (d > view.length_of_view || d < 1e-9) continue;
        if (!within_fov(pose.heading, yaw_of(ground(o.position) - ground(pose.position)), view.field_of_view)) continue;
        const Vec3 to = o.position - pose.position;
        const double len = to.norm();
        const auto hit = raycast(level, pose.position, to * (1.0 / len), len, static_cast<int>(i));
        if (hit && hit->distance < len - 1e-6) continue;
        found.push_back({d, static_cast<int>(i)});
    }
    std::sort(found.begin(), found.end(), [&](const Entry& a, const Entry& b) {
        if (a.distance != b.distance) return a.distance < b.distance;
        return level.objects[static_cast<std::size_t>(a.index)].id < level.objects[static_cast<std::size_t>(b.index)].id;
    });
    std::vector<int> out;
    out.reserve(found.size());
    for (const auto& e : found) out.push_back(e.index);
    return out;
}

}  // namespace xplore
