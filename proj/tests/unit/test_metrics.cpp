#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "support.hpp"
#include "xplore/errors.hpp"
#include "xplore/experiment.hpp"
#include "xplore/metrics.hpp"
#include "xplore/rng.hpp"

using namespace xplore;
using xplore::testing::flat_level;
using xplore::testing::object;
using xplore::testing::raise_east;

namespace {

constexpr double kL = 115.0;

// A thin wall whose near face sits `d` units east of x0.
WorldObject wall_at(double x0, double z, double d) { return object("wall", "wall", x0 + d + 1.0, z, {2, 10, 40}); }

}  // namespace

TEST(Elevation, FlatTerrainScoresZero) {
    const Level level = flat_level();
    const AgentPose p = pose_at(level, 100, 100, 0);
    for (int i = 0; i < kFanSize; ++i) EXPECT_EQ(elevation_change(level, p, i, kL), 0.0);
}

TEST(Elevation, RiseOfFourScoresPointFour) {
    Level level = flat_level();
    raise_east(level, 150, 6.0);  // eye at 2, terrain top 4 above it
    EXPECT_NEAR(elevation_change(level, pose_at(level, 100, 100, 0), 0, kL), 0.4, 1e-9);
}

TEST(Elevation, ClampsAtOne) {
    Level level = flat_level();
    raise_east(level, 150, 27.0);
    EXPECT_DOUBLE_EQ(elevation_change(level, pose_at(level, 100, 100, 0), 0, kL), 1.0);
    EXPECT_DOUBLE_EQ(elevation_score(10.0), 1.0);
    EXPECT_DOUBLE_EQ(elevation_score(25.0), 1.0);
    EXPECT_DOUBLE_EQ(elevation_score(4.0), 0.4);
    EXPECT_EQ(elevation_score(-3.0), 0.0);
}

TEST(Elevation, ObjectHitsAndMissesScoreZero) {
    Level level = flat_level({wall_at(100, 100, 20)});
    raise_east(level, 150, 27.0);
    const AgentPose p = pose_at(level, 100, 100, 0);
    EXPECT_EQ(elevation_change(level, p, 0, kL), 0.0);   // the wall is hit first
    EXPECT_EQ(elevation_change(level, p, 18, kL), 0.0);  // west is open
}

TEST(Openness, MissScoresZero) {
    const Level level = flat_level();
    EXPECT_EQ(openness(level, pose_at(level, 100, 100, 0), 0, kL), 0.0);
    EXPECT_EQ(openness_score(std::nullopt, kL), 0.0);
}

TEST(Openness, HitFractionOfView) {
    const Level level = flat_level({wall_at(100, 100, 57.5)});
    EXPECT_NEAR(openness(level, pose_at(level, 100, 100, 0), 0, kL), 0.5, 1e-9);
    EXPECT_DOUBLE_EQ(openness_score(kL, kL), 1.0);
    EXPECT_DOUBLE_EQ(openness_score(57.5, kL), 0.5);
}

TEST(Anticipation, WorkedExample) {
    // atan(0.25) * (115^2 - 40^2) / (pi/4 * 115^2)
    const double expected = std::atan(0.25) * (13225.0 - 1600.0) / (std::numbers::pi / 4.0 * 13225.0);
    EXPECT_NEAR(expected, 0.274, 5e-4);
    EXPECT_NEAR(anticipation_score(20, 40, kL, 90), expected, 1e-12);
    const Level level = flat_level({object("rock", "rock", 140, 100, {20, 5, 8})});
    EXPECT_NEAR(anticipation_detection(pose_at(level, 100, 100, 0), level.objects[0], {}), expected, 1e-12);
}

TEST(Anticipation, Boundaries) {
    EXPECT_EQ(anticipation_score(20, kL, kL, 90), 0.0);
    EXPECT_EQ(anticipation_score(20, 200, kL, 90), 0.0);
    EXPECT_EQ(anticipation_score(0, 40, kL, 90), 0.0);
    EXPECT_LE(anticipation_score(1000, 0.5, kL, 90), 1.0);
}

TEST(LargeObject, RelativeToLargestSeen) {
    const WorldObject big = object("b", "hut", 0, 0, {4, 4, 4});
    const WorldObject half = object("h", "crate", 0, 0, {4, 2, 4});
    MetricState s;
    EXPECT_EQ(large_object_detection(s, big), 1.0);
    EXPECT_EQ(large_object_detection(s, half), 0.5);
    EXPECT_EQ(large_object_detection(s, big), 1.0);
    EXPECT_EQ(large_object_detection(s, big), 1.0);
    EXPECT_EQ(*s.largest_seen, 64.0);
}

TEST(Group, CountsNeighboursWithinRadius) {
    std::vector<WorldObject> objs{object("c", "rock", 100, 100, {2, 2, 2})};
    const std::vector<std::pair<double, double>> near{{130, 100}, {100, 139}, {80, 80}};
    for (std::size_t i = 0; i < near.size(); ++i) {
        objs.push_back(object("n" + std::to_string(i), "rock", near[i].first, near[i].second, {2, 2, 2}));
    }
    objs.push_back(object("far", "rock", 141, 100, {2, 2, 2}));
    const Level level = flat_level(objs);
    EXPECT_NEAR(group_detection(level, 0), 0.3, 1e-12);
    EXPECT_EQ(group_detection(level, 4), 0.1);  // only n0, 11 units away
}

TEST(Group, IsolatedAndSaturated) {
    EXPECT_EQ(group_detection(flat_level({object("c", "rock", 100, 100, {2, 2, 2})}), 0), 0.0);
    std::vector<WorldObject> objs{object("c", "rock", 100, 100, {1, 1, 1})};
    for (int i = 0; i < 15; ++i) objs.push_back(object("n" + std::to_string(i), "rock", 80 + 3 * i, 110, {1, 1, 1}));
    EXPECT_EQ(group_detection(flat_level(objs), 0), 1.0);
    objs.resize(11);
    EXPECT_EQ(group_detection(flat_level(objs), 0), 1.0);
}

TEST(ScoreDirection, SingleMetricReducesToRawValue) {
    const Level level = flat_level({wall_at(100, 100, kL - 1e-3)});
    const AgentPose p = pose_at(level, 100, 100, 0);
    const auto s = score_direction(MetricConfig::single(Metric::Openness), level, p, {}, 0, {});
    EXPECT_NEAR(s.score, 1.0, 1e-4);
    EXPECT_EQ(s.score, openness(level, p, 0, kL));
    EXPECT_FALSE(s.associated_object);
}

TEST(ScoreDirection, AllMetricsOnOpenFlatDirection) {
    const Level level = flat_level();
    EXPECT_EQ(score_direction(MetricConfig::all(), level, pose_at(level, 100, 100, 0), {}, 0, {}).score, 0.0);
}

TEST(ScoreDirection, ComposesGroupAndOpenness) {
    const Level level = flat_level({wall_at(100, 100, 0.4 * kL)});
    const AgentPose p = pose_at(level, 100, 100, 0);
    const std::vector<ObjectScores> bucket{{0, 0, 0.0, 0.0, 0.5}};
    const auto s = score_direction(MetricConfig({Metric::GroupDetection, Metric::Openness}), level, p, {}, 0, bucket);
    EXPECT_NEAR(s.score, 0.45, 1e-9);
    ASSERT_TRUE(s.associated_object);
    EXPECT_EQ(*s.associated_object, 0);
}

TEST(ScoreDirection, BucketUsesMaximum) {
    const Level level = flat_level();
    const std::vector<ObjectScores> bucket{{0, 0, 0.2, 0.0, 0.0}, {1, 0, 0.6, 0.0, 0.0}, {2, 0, 0.4, 0.0, 0.0}};
    const auto s = score_direction(MetricConfig::single(Metric::AnticipationDetection), level,
                                   pose_at(level, 100, 100, 0), {}, 0, bucket);
    EXPECT_DOUBLE_EQ(s.score, 0.6);
    EXPECT_EQ(*s.associated_object, 1);
}

TEST(MetricConfig, TokensAndNames) {
    EXPECT_EQ(MetricConfig::parse("all").name(), "all");
    EXPECT_EQ(MetricConfig::parse("large-object").name(), "large-object");
    EXPECT_EQ(MetricConfig({Metric::Openness, Metric::ElevationChange}).name(), "elevation+openness");
    EXPECT_THROW(MetricConfig::parse("shadows"), StructuralError);
    EXPECT_THROW(MetricConfig(std::vector<Metric>{}), StructuralError);
}

TEST(Metrics, AllScoresStayInUnitInterval) {
    const TileSet ts = default_tileset();
    Rng rng(5);
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const Level level = generate_level(ts, Preset::A, seed);
        MetricState state;
        double last_largest = 0.0;
        for (int k = 0; k < 30; ++k) {
            const AgentPose p = pose_at(level, rng.uniform(5, 345), rng.uniform(5, 345), rng.uniform(0, 360));
            for (int i = 0; i < kFanSize; ++i) {
                const double e = elevation_change(level, p, i, kL), o = openness(level, p, i, kL);
                EXPECT_TRUE(e >= 0.0 && e <= 1.0);
                EXPECT_TRUE(o >= 0.0 && o <= 1.0);
            }
            const auto vis = visible_objects(level, p, {});
            for (const auto& s : score_objects(MetricConfig::all(), state, level, p, {}, vis)) {
                for (double v : {s.anticipation, s.large, s.group}) EXPECT_TRUE(v >= 0.0 && v <= 1.0);
                EXPECT_GE(*state.largest_seen, last_largest);
                last_largest = *state.largest_seen;
            }
        }
    }
}
