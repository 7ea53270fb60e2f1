#include <gtest/gtest.h>

#include <cmath>

#include "snnrpn/meanshift.hpp"

using namespace snnrpn;
using namespace snnrpn::meanshift;

TEST(MeanShift, FirstSpikeSeedsCluster) {
    Tracker t(SensorGeometry{}, MsConfig{});
    t.step({100, 30, 40});
    ASSERT_EQ(t.clusters().size(), 1u);
    EXPECT_EQ(t.clusters()[0].cx, 30.0);
    EXPECT_EQ(t.clusters()[0].cy, 40.0);
    EXPECT_EQ(t.clusters()[0].activity, 1.0);
}

TEST(MeanShift, ShiftUsesMixingFactor) {
    MsConfig cfg;
    cfg.eta = 0.5;
    Tracker t(SensorGeometry{}, cfg);
    t.step({0, 10, 10});
    t.step({0, 14, 10});
    ASSERT_EQ(t.clusters().size(), 1u);
    EXPECT_EQ(t.clusters()[0].cx, 12.0);
    EXPECT_EQ(t.clusters()[0].cy, 10.0);
    EXPECT_EQ(t.clusters()[0].activity, 2.0);
}

TEST(MeanShift, EquidistantTieGoesToLowerIndex) {
    MsConfig cfg;
    cfg.radius = 12;
    cfg.eta = 1.0;
    Tracker t(SensorGeometry{}, cfg);
    t.step({0, 10, 10});
    t.step({0, 30, 10});  // outside radius: second cluster
    ASSERT_EQ(t.clusters().size(), 2u);
    t.step({0, 20, 10});  // 10 px from both
    EXPECT_EQ(t.clusters()[0].cx, 20.0);
    EXPECT_EQ(t.clusters()[1].cx, 30.0);
}

TEST(MeanShift, EvictsLeastActiveWhenFull) {
    MsConfig cfg;
    cfg.max_clusters = 2;
    cfg.radius = 5;
    Tracker t(SensorGeometry{}, cfg);
    t.step({0, 10, 10});
    t.step({0, 10, 10});  // cluster 0 activity 2
    t.step({0, 50, 50});  // cluster 1 activity 1
    t.step({0, 100, 100});
    ASSERT_EQ(t.clusters().size(), 2u);
    EXPECT_EQ(t.clusters()[0].cx, 10.0);
    EXPECT_EQ(t.clusters()[1].cx, 100.0);
    EXPECT_EQ(t.counters().evictions, 1u);
}

TEST(MeanShift, EmitBoxGeometry) {
    MsConfig cfg;
    cfg.radius = 8;
    cfg.act_threshold = 1.0;
    Tracker t(SensorGeometry{}, cfg);
    EXPECT_TRUE(t.emit(0).empty());
    t.step({0, 50, 40});
    const auto boxes = t.emit(0);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].box, (Box{42, 32, 58, 48}));
}

TEST(MeanShift, EmitClipsToSensor) {
    MsConfig cfg;
    cfg.radius = 8;
    cfg.act_threshold = 1.0;
    Tracker t(SensorGeometry{}, cfg);
    t.step({0, 2, 178});
    const auto boxes = t.emit(0);
    ASSERT_EQ(boxes.size(), 1u);
    EXPECT_EQ(boxes[0].box, (Box{0, 170, 10, 180}));
}

TEST(MeanShift, IdleClusterDropsBelowThreshold) {
    MsConfig cfg;
    cfg.act_threshold = 2.0;
    cfg.tau_act_us = 10'000;
    Tracker t(SensorGeometry{}, cfg);
    for (int k = 0; k < 5; ++k) {
        t.step({0, 60, 60});
    }
    // Activity 5 decays to 2 after tau * ln(5/2).
    const auto cross = static_cast<Timestamp>(10'000 * std::log(5.0 / 2.0));
    EXPECT_EQ(t.emit(cross - 5).size(), 1u);
    EXPECT_TRUE(t.emit(cross + 5).empty());
}

TEST(MeanShift, RunProducesOneEntryPerFrame) {
    std::vector<PixelSpike> spikes;
    for (int k = 0; k < 100; ++k) {
        spikes.push_back({static_cast<Timestamp>(k) * 1000, 100 + k % 3, 90});
    }
    const auto r = run_meanshift(spikes, SensorGeometry{}, MsConfig{}, 30, 4);
    ASSERT_EQ(r.frames.size(), 4u);
    EXPECT_EQ(r.counters.spikes, 100u);
    EXPECT_FALSE(r.frames[0].boxes.empty());
    EXPECT_GT(r.counters.ops(), 0u);
}

TEST(MeanShift, ConfigValidation) {
    MsConfig c;
    c.eta = 0.0;
    EXPECT_THROW(c.validate(), ConfigError);
    c = MsConfig{};
    c.radius = -1;
    EXPECT_THROW(c.validate(), ConfigError);
    c = MsConfig{};
    c.max_clusters = 0;
    EXPECT_THROW(Tracker(SensorGeometry{}, c), ConfigError);
}

TEST(MeanShift, MemoryModel) {
    MsConfig c;
    c.max_clusters = 16;
    EXPECT_EQ(mem_bits(SensorGeometry{}, c, 8), 2 * 180 * 240 * 8 + 5 * 16 * 8);
}
