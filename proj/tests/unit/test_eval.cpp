#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include "support.hpp"
#include "xplore/errors.hpp"
#include "xplore/eval.hpp"

using namespace xplore;
using xplore::testing::flat_level;
using xplore::testing::object;

namespace {

TraceLog trace_at(const std::vector<Vec2>& points, std::vector<std::vector<std::string>> visible = {}) {
    TraceLog t;
    t.config = "all";
    for (std::size_t i = 0; i < points.size(); ++i) {
        TickRecord r;
        r.time = 0.1 * static_cast<double>(i + 1);
        r.position = {points[i].x, kEyeHeight, points[i].z};
        if (i < visible.size()) r.visible = visible[i];
        t.ticks.push_back(r);
    }
    return t;
}

Vec2 region_center(int row, int col) { return {col * 50.0 + 25.0, row * 50.0 + 25.0}; }

EpisodeScores scores(double cov, double ent, double insp, double m, double n) {
    EpisodeScores s;
    s.coverage = cov;
    s.entropy = ent;
    s.inspection = insp;
    s.motivation_avg = m;
    s.novelty_avg = n;
    return s;
}

LevelResults uniform_results(const EpisodeScores& s) {
    LevelResults r;
    for (const auto& c : experiment_configs()) r[c.name()] = {s, s, s};
    return r;
}

}  // namespace

TEST(Coverage, CountsDistinctRegions) {
    EXPECT_NEAR(coverage(trace_at({{10, 10}, {20, 30}, {49, 49}})), 1.0 / 49.0, 1e-12);
    EXPECT_NEAR(coverage(trace_at({region_center(0, 0), region_center(0, 1), region_center(1, 1), region_center(0, 1)})),
                3.0 / 49.0, 1e-12);
    std::vector<Vec2> all;
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c) all.push_back(region_center(r, c));
    EXPECT_DOUBLE_EQ(coverage(trace_at(all)), 1.0);
    EXPECT_EQ(region_of(350, 350), 48);
    EXPECT_EQ(region_of(50, 0), 1);
    EXPECT_EQ(region_of(0, 50), 7);
}

TEST(Inspection, FractionWithinRadius) {
    const Level level = flat_level({object("a", "rock", 100, 100, {2, 2, 2}), object("b", "rock", 200, 100, {2, 2, 2}),
                                    object("c", "rock", 100, 200, {2, 2, 2}), object("d", "rock", 200, 200, {2, 2, 2})});
    // Footprint edge of "a" is at x = 101; 9.9 beyond it.
    EXPECT_DOUBLE_EQ(inspection(trace_at({{110.9, 100}}), level), 0.25);
    EXPECT_DOUBLE_EQ(inspection(trace_at({{111.1, 100}}), level), 0.0);
    EXPECT_DOUBLE_EQ(inspection(trace_at({{100, 100}, {200, 100}, {100, 200}, {200, 200}}), level), 1.0);
    EXPECT_EQ(inspection(trace_at({{10, 10}}), flat_level()), 0.0);
}

TEST(Entropy, KnownDistributions) {
    const std::vector<int> one{10, 0, 0};
    EXPECT_EQ(entropy_bits(one), 0.0);
    const std::vector<int> split{50, 25, 25};
    EXPECT_NEAR(entropy_bits(split), 1.5, 1e-12);

    std::vector<Vec2> pts;
    for (int i = 0; i < 50; ++i) pts.push_back(region_center(0, 0));
    for (int i = 0; i < 25; ++i) pts.push_back(region_center(3, 3));
    for (int i = 0; i < 25; ++i) pts.push_back(region_center(6, 1));
    const TraceLog t = trace_at(pts);
    EXPECT_NEAR(entropy(t), 1.5 / std::log2(49.0), 1e-12);
    EXPECT_NEAR(entropy(t), 0.2672, 5e-5);

    std::vector<Vec2> all;
    for (int r = 0; r < 7; ++r)
        for (int c = 0; c < 7; ++c) all.push_back(region_center(r, c));
    EXPECT_NEAR(entropy(trace_at(all)), 1.0, 1e-12);
    EXPECT_EQ(entropy(trace_at({{1, 1}, {2, 2}})), 0.0);
}

TEST(Entropy, InvariantUnderRelabellingAndRepetition) {
    std::vector<Vec2> a{region_center(0, 0), region_center(0, 0), region_center(2, 5), region_center(4, 4)};
    std::vector<Vec2> b{region_center(6, 6), region_center(1, 3), region_center(6, 6), region_center(0, 2)};
    EXPECT_NEAR(entropy(trace_at(a)), entropy(trace_at(b)), 1e-12);
    std::vector<Vec2> twice = a;
    twice.insert(twice.end(), a.begin(), a.end());
    EXPECT_NEAR(entropy(trace_at(a)), entropy(trace_at(twice)), 1e-12);
    EXPECT_THROW(entropy(trace_at(a), 0.0), DomainError);
}

TEST(Novelty, FirstSightingThenPenaltyThenRecovery) {
    NoveltyState s;
    const double dt = 0.1;
    EXPECT_DOUBLE_EQ(novelty_tick(s, {"tree"}, dt), 0.1);
    EXPECT_DOUBLE_EQ(s.kinds["tree"].value, 0.0);
    // Independent recurrence: N recovers 0.003 per tick while visible or not.
    double n = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double got = novelty_tick(s, {"tree"}, dt);
        EXPECT_NEAR(got, n, 1e-12) << k;
        n = std::min(n + 0.03 * dt, 0.1);
    }
}

TEST(Novelty, FullRecoveryAfterThreePointFourSeconds) {
    NoveltyState s;
    novelty_tick(s, {"rock"}, 0.1);
    ASSERT_EQ(s.kinds["rock"].value, 0.0);
    for (int k = 0; k < 33; ++k) novelty_tick(s, {}, 0.1);
    EXPECT_LT(s.kinds["rock"].value, 0.1);
    novelty_tick(s, {}, 0.1);
    EXPECT_DOUBLE_EQ(s.kinds["rock"].value, 0.1);
    EXPECT_NEAR(NoveltyParams{}.max / NoveltyParams{}.rate, 10.0 / 3.0, 1e-12);
}

TEST(Novelty, StaysWithinBoundsAndSumsKinds) {
    NoveltyState s;
    EXPECT_DOUBLE_EQ(novelty_tick(s, {"a", "b", "c"}, 0.1), 0.3);
    for (int k = 0; k < 200; ++k) {
        novelty_tick(s, k % 3 ? std::set<std::string>{"a"} : std::set<std::string>{"b", "d"}, 0.1);
        for (const auto& [kind, v] : s.kinds) {
            EXPECT_GE(v.value, 0.0);
            EXPECT_LE(v.value, 0.1);
        }
    }
}

TEST(Novelty, EmptyLevelIsZero) {
    const Level level = flat_level();
    const TraceLog t = trace_at(std::vector<Vec2>(50, {100, 100}));
    for (double v : novelty_series(t, level, {})) EXPECT_EQ(v, 0.0);
}

TEST(Novelty, SeriesResolvesKindsThroughLevel) {
    const Level level = flat_level({object("t1", "tree", 100, 100, {2, 2, 2}), object("t2", "tree", 120, 100, {2, 2, 2})});
    TraceLog t = trace_at(std::vector<Vec2>(3, {50, 100}), {{"t1"}, {"t1", "t2"}, {}});
    t.params.tick = 0.1;
    const auto v = novelty_series(t, level, {});
    ASSERT_EQ(v.size(), 3u);
    EXPECT_DOUBLE_EQ(v[0], 0.1);
    EXPECT_DOUBLE_EQ(v[1], 0.0);  // same kind, no new sighting
    EXPECT_DOUBLE_EQ(v[2], 0.0);
    EXPECT_NEAR(novelty_avg(t, level, {}), 0.1 / 3.0, 1e-12);
    t.ticks[2].visible = {"ghost"};
    EXPECT_THROW(novelty_series(t, level, {}), StructuralError);
}

TEST(Motivation, MeanOfDecisionScores) {
    TraceLog t;
    t.config = "all";
    for (double v : {0.2, 0.4, 0.6}) t.decisions.push_back({0.0, 0, v, std::nullopt});
    t.redecisions.push_back({0.5, 0, 1.0, std::nullopt});
    EXPECT_NEAR(motivation_avg(t), 0.4, 1e-12);
    t.config = TraceLog::kRandomConfig;
    EXPECT_THROW(motivation_avg(t), DomainError);
}

TEST(Fitness, AllPassingUnitScoresGiveOne) {
    const FitnessReport r = fitness(uniform_results(scores(0.5, 0.5, 0.5, 1.0, 1.0)));
    EXPECT_NEAR(r.F, 1.0, 1e-12);
    ASSERT_EQ(r.configs.size(), 6u);
    for (const auto& c : r.configs) EXPECT_TRUE(c.gate_coverage && c.gate_entropy && c.gate_inspection);
}

TEST(Fitness, OnlyAllMetricsPassing) {
    LevelResults r = uniform_results(scores(0.10, 0.5, 0.5, 0.9, 0.9));
    r["all"] = {scores(0.5, 0.5, 0.5, 0.8, 0.5)};
    const FitnessReport f = fitness(r);
    EXPECT_NEAR(f.F, 0.2, 1e-12);
    for (const auto& c : f.configs) {
        if (c.config == "all") EXPECT_NEAR(c.f, 0.4, 1e-12);
        else EXPECT_EQ(c.f, 0.0);
    }
}

TEST(Fitness, CoverageGateZeroesConfig) {
    LevelResults r = uniform_results(scores(0.5, 0.5, 0.5, 0.5, 0.5));
    r["openness"] = {scores(0.10, 0.5, 0.5, 1.0, 1.0)};
    const FitnessReport f = fitness(r);
    for (const auto& c : f.configs) {
        if (c.config == "openness") {
            EXPECT_FALSE(c.gate_coverage);
            EXPECT_EQ(c.f, 0.0);
        }
    }
    EXPECT_NEAR(f.F, 0.9 * 0.25, 1e-12);
}

TEST(Fitness, GatesAreSharp) {
    auto f_of = [](double cov, double ent, double insp) {
        LevelResults r = uniform_results(scores(0.5, 0.5, 0.5, 0.5, 0.5));
        r["group"] = {scores(cov, ent, insp, 0.5, 0.5)};
        for (const auto& c : fitness(r).configs)
            if (c.config == "group") return c.f;
        return -1.0;
    };
    const double eps = 1e-9;
    EXPECT_GT(f_of(0.20, 0.5, 0.5), 0.0);
    EXPECT_EQ(f_of(0.20 - eps, 0.5, 0.5), 0.0);
    EXPECT_GT(f_of(0.80, 0.5, 0.5), 0.0);
    EXPECT_EQ(f_of(0.80 + eps, 0.5, 0.5), 0.0);
    EXPECT_GT(f_of(0.5, 0.90, 0.5), 0.0);
    EXPECT_EQ(f_of(0.5, 0.90 + eps, 0.5), 0.0);
    EXPECT_EQ(f_of(0.5, 0.5, 0.10), 0.0);
    EXPECT_GT(f_of(0.5, 0.5, 0.10 + eps), 0.0);
    EXPECT_GT(f_of(0.5, 0.5, 0.80), 0.0);
    EXPECT_EQ(f_of(0.5, 0.5, 0.80 + eps), 0.0);
}

TEST(Fitness, AveragesOverSpawns) {
    LevelResults r = uniform_results(scores(0.5, 0.5, 0.5, 0.5, 0.5));
    // Two spawns below the gate, one far above: the mean of 0.4 passes.
    r["all"] = {scores(0.15, 0.5, 0.5, 0.2, 0.3), scores(0.15, 0.5, 0.5, 0.4, 0.3), scores(0.9, 0.5, 0.5, 0.6, 0.6)};
    const FitnessReport f = fitness(r);
    const auto& all = *std::find_if(f.configs.begin(), f.configs.end(), [](const auto& c) { return c.config == "all"; });
    EXPECT_EQ(all.episodes, 3);
    EXPECT_NEAR(all.coverage, 0.4, 1e-12);
    EXPECT_NEAR(all.f, 0.4 * 0.4, 1e-12);
}

TEST(Fitness, MissingConfigsAreNamed) {
    LevelResults r = uniform_results(scores(0.5, 0.5, 0.5, 0.5, 0.5));
    r.erase("group");
    r.erase("all");
    try {
        fitness(r);
        FAIL() << "expected StructuralError";
    } catch (const StructuralError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("group"), std::string::npos);
        EXPECT_NE(msg.find("all"), std::string::npos);
    }
}

TEST(Fitness, RandomControlIsReportedButUnweighted) {
    LevelResults r = uniform_results(scores(0.5, 0.5, 0.5, 0.5, 0.5));
    EpisodeScores rc = scores(0.9, 0.95, 0.9, 0, 1);
    rc.motivation_avg.reset();
    r[TraceLog::kRandomConfig] = {rc};
    const FitnessReport f = fitness(r);
    ASSERT_TRUE(f.random_control);
    EXPECT_EQ(f.random_control->episodes, 1);
    EXPECT_NEAR(f.F, 0.25, 1e-12);
}

TEST(Fitness, BoundedAndMonotone) {
    Rng rng(8);
    for (int k = 0; k < 200; ++k) {
        LevelResults r;
        for (const auto& c : experiment_configs()) {
            r[c.name()] = {scores(rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform())};
        }
        const double F = fitness(r).F;
        ASSERT_GE(F, 0.0);
        ASSERT_LE(F, 1.0);
        auto& s = r["all"][0];
        s.motivation_avg = std::min(1.0, *s.motivation_avg + 0.1);
        ASSERT_GE(fitness(r).F, F);
    }
}

TEST(FitnessParams, WeightsMustSumToOne) {
    FitnessParams p;
    EXPECT_NO_THROW(p.validate());
    double sum = 0.0;
    for (const auto& [k, w] : p.weights) sum += w;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(p.weights.at("all"), 0.5);
    EXPECT_DOUBLE_EQ(p.weights.at("openness"), 0.1);
    p.weights["all"] = 0.6;
    EXPECT_THROW(p.validate(), StructuralError);
}

TEST(ScoreEpisode, RecomputesFromStoredTrace) {
    const Level level = flat_level({object("t1", "tree", 200, 175, {2, 6, 2})});
    const TraceLog t = run_episode(level, {175, 175}, MetricConfig::all(), [] {
        AgentParams p;
        p.sim_duration = 30;
        return p;
    }(), 4);
    const EpisodeScores a = score_episode(t, level);
    double m = 0.0;
    for (const auto& d : t.decisions) m += *d.score;
    EXPECT_NEAR(*a.motivation_avg, m / static_cast<double>(t.decisions.size()), 1e-12);
    std::stringstream io;
    write_trace(t, io);
    EXPECT_EQ(score_episode(read_trace(io), level), a);
}
