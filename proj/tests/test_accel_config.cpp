// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>

#include "edgeperf/accel_config.hpp"
#include "edgeperf/error.hpp"
#include "test_util.hpp"

using namespace edgeperf;
using namespace edgeperf::accel;

TEST(Preset, V1Values)
{
    const auto cfg = preset("V1");
    EXPECT_EQ(cfg.name, "V1");
    EXPECT_DOUBLE_EQ(cfg.clock_hz, 800e6);
    EXPECT_DOUBLE_EQ(cfg.io_bandwidth_bytes_per_s, 17e9);
    EXPECT_EQ(cfg.pes_x, 4);
    EXPECT_EQ(cfg.pes_y, 4);
    EXPECT_EQ(cfg.pe_memory_bytes, 2 * 1024 * 1024);
    EXPECT_EQ(cfg.cores_per_pe, 4);
    EXPECT_EQ(cfg.core_memory_bytes, 32 * 1024);
    EXPECT_EQ(cfg.compute_lanes, 64);
    EXPECT_EQ(cfg.macs_per_lane, 4);
    EXPECT_DOUBLE_EQ(cfg.sustained_bw_fraction, 1.0);
}

TEST(Preset, V2Values)
{
    const auto cfg = preset("V2");
    EXPECT_DOUBLE_EQ(cfg.clock_hz, 1066e6);
    EXPECT_EQ(cfg.total_pes(), 16);
    EXPECT_EQ(cfg.pe_memory_bytes, 384 * 1024);
    EXPECT_EQ(cfg.cores_per_pe, 1);
    EXPECT_EQ(cfg.core_memory_bytes, 32 * 1024);
    EXPECT_EQ(cfg.compute_lanes, 64);
    EXPECT_DOUBLE_EQ(cfg.io_bandwidth_bytes_per_s, 32e9);
    EXPECT_EQ(cfg.macs_per_cycle(), 4096);
}

TEST(Preset, V3Values)
{
    const auto cfg = preset("V3");
    EXPECT_EQ(cfg.pes_x, 4);
    EXPECT_EQ(cfg.pes_y, 1);
    EXPECT_EQ(cfg.cores_per_pe, 8);
    EXPECT_EQ(cfg.compute_lanes, 32);
    EXPECT_EQ(cfg.core_memory_bytes, 8 * 1024);
    EXPECT_EQ(cfg.pe_memory_bytes, 2 * 1024 * 1024);
    EXPECT_DOUBLE_EQ(cfg.sustained_bw_fraction, 0.85);
    EXPECT_LT(cfg.sustained_bandwidth(), preset("V2").sustained_bandwidth());
}

TEST(Preset, UnknownNameThrows)
{
    EXPECT_THROW(preset("V4"), Error);
    EXPECT_THROW(preset("v1"), Error);
    EXPECT_EQ(preset_names(), (std::vector<std::string>{"V1", "V2", "V3"}));
}

TEST(PeakTops, MatchesPublishedFigures)
{
    EXPECT_NEAR(peak_tops(preset("V1")), 26.2, 0.262);
    EXPECT_NEAR(peak_tops(preset("V2")), 8.73, 0.0873);
    EXPECT_NEAR(peak_tops(preset("V3")), 8.73, 0.0873);
}

TEST(PeakTops, ZeroWayMacIsZero)
{
    auto cfg = preset("V1");
    cfg.macs_per_lane = 0;
    EXPECT_EQ(peak_tops(cfg), 0.0);
}

TEST(Memory, TotalsFollowTheHierarchy)
{
    EXPECT_EQ(total_core_memory(preset("V1")), 2 * 1024 * 1024);
    EXPECT_EQ(total_core_memory(preset("V2")), 512 * 1024);
    EXPECT_EQ(total_core_memory(preset("V3")), 256 * 1024);
    EXPECT_EQ(total_pe_memory(preset("V1")), 32 * 1024 * 1024);
    EXPECT_EQ(total_pe_memory(preset("V3")), 8 * 1024 * 1024);
}

TEST(Json, RoundTripPreservesEverything)
{
    for (const auto &name : preset_names())
    {
        auto cfg = preset(name);
        cfg.energy.static_mw = 12.5;
        const auto back = config_from_json(to_json(cfg));
        EXPECT_EQ(back, cfg);
        EXPECT_EQ(peak_tops(back), peak_tops(cfg));
        EXPECT_EQ(total_core_memory(back), total_core_memory(cfg));
    }
}

TEST(Json, FileRoundTripAndErrors)
{
    testutil::TempDir dir;
    const auto path = dir.path() / "custom.json";
    auto cfg = preset("V2");
    cfg.name = "custom";
    cfg.compute_lanes = 128;
    save_config(path, cfg);
    EXPECT_EQ(load_config(path), cfg);

    EXPECT_THROW(load_config(dir.path() / "missing.json"), Error);
    {
        std::ofstream(dir.path() / "bad.json") << "{ not json";
    }
    EXPECT_THROW(load_config(dir.path() / "bad.json"), Error);

    auto j = to_json(cfg);
    j.erase("clock_hz");
    EXPECT_THROW(config_from_json(j), Error);
}

TEST(Validate, RejectsNonPositiveValues)
{
    EXPECT_NO_THROW(preset("V1").validate());
    auto cfg = preset("V1");
    cfg.pes_x = 0;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = preset("V1");
    cfg.sustained_bw_fraction = 1.5;
    EXPECT_THROW(cfg.validate(), Error);
    cfg = preset("V1");
    cfg.energy.pj_per_mac = -1;
    EXPECT_THROW(cfg.validate(), Error);
}
