#include <gtest/gtest.h>

#include <sstream>

#include "snnrpn/config.hpp"

using namespace snnrpn;

TEST(Config, ParsesCommentsAndWhitespace) {
    std::istringstream in(
        "# comment\n"
        "window = 8\n"
        "  stride=6  \n"
        "\n"
        "conv_v_th = 2.5\n"
        "lateral = true\n"
        "ms_max_clusters = 4\n");
    const auto cfg = parse_config(in);
    EXPECT_EQ(cfg.pipeline.window, 8);
    EXPECT_EQ(cfg.pipeline.stride, 6);
    EXPECT_EQ(cfg.pipeline.conv.v_th, 2.5);
    EXPECT_TRUE(cfg.pipeline.lateral);
    EXPECT_EQ(cfg.meanshift.max_clusters, 4);
}

TEST(Config, UnknownKeyAndBadValuesRejected) {
    RunConfig cfg;
    EXPECT_THROW(apply_setting(cfg, "windw", "8"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "window", "8.5"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "window", "-1"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "conv_v_th", "high"), ConfigError);
    EXPECT_THROW(apply_setting(cfg, "lateral", "maybe"), ConfigError);
    EXPECT_THROW(apply_assignment(cfg, "window 8"), ConfigError);
    std::istringstream in("window\n");
    EXPECT_THROW(parse_config(in), ConfigError);
}

TEST(Config, WriteThenParseRoundTrips) {
    RunConfig cfg;
    cfg.pipeline.conv.v_th = 0.1 + 0.2;
    cfg.pipeline.refractory.t_refractory_us = 12345;
    cfg.pipeline.lateral = true;
    cfg.meanshift.eta = 0.3;
    std::ostringstream out;
    write_config(out, cfg);
    std::istringstream in(out.str());
    const auto back = parse_config(in);
    std::ostringstream again;
    write_config(again, back);
    EXPECT_EQ(out.str(), again.str());
    EXPECT_EQ(back.pipeline.conv.v_th, cfg.pipeline.conv.v_th);
}

TEST(Config, EveryKeyIsWritten) {
    std::ostringstream out;
    write_config(out, RunConfig{});
    for (const auto& k : config_keys()) {
        EXPECT_NE(out.str().find(k + " = "), std::string::npos) << k;
    }
}

TEST(Config, BaseValuesKeptForMissingKeys) {
    RunConfig base;
    base.pipeline.fps = 60;
    std::istringstream in("window = 8\nstride = 8\n");
    const auto cfg = parse_config(in, base);
    EXPECT_EQ(cfg.pipeline.fps, 60u);
    EXPECT_EQ(cfg.pipeline.window, 8);
}
