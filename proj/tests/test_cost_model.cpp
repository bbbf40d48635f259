// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include "edgeperf/cost_model.hpp"
#include "edgeperf/enumerate.hpp"
#include "edgeperf/error.hpp"
#include "test_util.hpp"

using namespace edgeperf;
using namespace edgeperf::cost;
using accel::preset;
using nas::LayerKind;
using nas::LayerWorkload;
using nas::NetworkWorkload;

namespace
{

constexpr std::int64_t KiB = 1024;
constexpr std::int64_t MiB = 1024 * KiB;

LayerWorkload dense_layer(std::int64_t param_bytes)
{
    LayerWorkload l;
    l.kind = LayerKind::Conv1x1;
    l.out_height = 1;
    l.out_width = 1;
    l.kernel_h = 1;
    l.kernel_w = 1;
    l.in_channels = 1024;
    l.out_channels = static_cast<int>(param_bytes / 1024);
    l.macs = param_bytes;
    l.params = param_bytes;
    l.param_bytes = param_bytes;
    l.input_activation_bytes = l.in_channels;
    l.output_activation_bytes = l.out_channels;
    return l;
}

// `count` layers of 1 MiB of parameters each and negligible compute.
NetworkWorkload stack_of_megabytes(int count)
{
    NetworkWorkload net;
    for (int i = 0; i < count; ++i) net.layers.push_back(dense_layer(MiB));
    for (const auto &l : net.layers)
    {
        net.total_params += l.params;
        net.total_macs += l.macs;
    }
    return net;
}

std::vector<NetworkWorkload> random_networks(int count, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<NetworkWorkload> nets;
    for (int i = 0; i < count; ++i) nets.push_back(nas::expand_network(nas::random_cell(rng)));
    return nets;
}

}  // namespace

TEST(Mode, ParseAndPrint)
{
    EXPECT_EQ(parse_mode("cold"), EstimateMode::Cold);
    EXPECT_EQ(parse_mode("steady"), EstimateMode::SteadyState);
    EXPECT_EQ(to_string(EstimateMode::Cold), "cold");
    EXPECT_THROW(parse_mode("warm"), Error);
}

TEST(CacheCapacity, CoreMemoryPlusPeShare)
{
    EXPECT_EQ(cache_capacity(preset("V1")), 2 * MiB + 24 * MiB);
    EXPECT_EQ(cache_capacity(preset("V2")), 512 * KiB + 4608 * KiB);
    CostOptions none;
    none.pe_cache_fraction = 0.0;
    EXPECT_EQ(cache_capacity(preset("V3"), none), 256 * KiB);
}

TEST(PlanCache, GreedyHandTrace)
{
    const std::vector<LayerWorkload> layers{dense_layer(300 * KiB), dense_layer(200 * KiB), dense_layer(100 * KiB)};
    const auto plan = plan_cache(layers, 512 * KiB);
    EXPECT_EQ(plan.cached, (std::vector<bool>{true, true, false}));
    EXPECT_EQ(plan.cached_bytes, 500 * KiB);
    EXPECT_EQ(plan.streamed_bytes, 100 * KiB);
}

TEST(PlanCache, StopsAtFirstLayerThatDoesNotFit)
{
    const std::vector<LayerWorkload> layers{dense_layer(300 * KiB), dense_layer(250 * KiB), dense_layer(100 * KiB)};
    const auto plan = plan_cache(layers, 512 * KiB);
    EXPECT_EQ(plan.cached, (std::vector<bool>{true, false, false}));
    EXPECT_EQ(plan.streamed_bytes, 350 * KiB);
}

TEST(PlanCache, CachedSetGrowsWithCapacity)
{
    Rng rng(12);
    const auto net = nas::expand_network(nas::random_cell(rng));
    auto previous = plan_cache(net.layers, 0);
    for (std::int64_t capacity = 64 * KiB; capacity <= 8 * MiB; capacity += 64 * KiB)
    {
        const auto plan = plan_cache(net.layers, capacity);
        for (std::size_t i = 0; i < plan.cached.size(); ++i)
            if (previous.cached[i]) ASSERT_TRUE(plan.cached[i]) << capacity;
        previous = plan;
    }
}

TEST(PlanCache, NeverDisplacesTheLargestWorkingSet)
{
    for (const auto &net : random_networks(20, 10))
    {
        std::int64_t working_set = 0;
        for (const auto &l : net.layers)
            working_set = std::max(working_set, l.input_activation_bytes + l.output_activation_bytes);
        for (const auto &name : accel::preset_names())
        {
            CostOptions options;
            options.pe_cache_fraction = 1.0;
            const auto cfg = preset(name);
            const auto plan = plan_cache(net, cfg, options);
            EXPECT_LE(plan.cached_bytes, accel::total_core_memory(cfg) + accel::total_pe_memory(cfg) - working_set);
            for (const auto &l : estimate(net, cfg, EstimateMode::SteadyState, options).per_layer)
                EXPECT_EQ(l.spill_bytes, 0);
        }
    }
}

TEST(PlanCache, EverythingFitsOrNothingFits)
{
    const auto net = nas::expand_network(testutil::chain({testutil::C1}));
    const auto all = plan_cache(net.layers, net.total_param_bytes());
    EXPECT_EQ(all.streamed_bytes, 0);
    EXPECT_EQ(all.cached_bytes, net.total_param_bytes());

    const auto none = plan_cache(net.layers, 0);
    EXPECT_EQ(none.cached_bytes, 0);
    EXPECT_EQ(none.streamed_bytes, net.total_param_bytes());
}

TEST(PlanCache, ConservesBytesAndRespectsCapacity)
{
    for (const auto &net : random_networks(100, 1))
        for (const auto &name : accel::preset_names())
        {
            const auto plan = plan_cache(net, preset(name));
            EXPECT_LE(plan.cached_bytes, cache_capacity(preset(name)));
            EXPECT_EQ(plan.cached_bytes + plan.streamed_bytes, net.total_param_bytes());
        }
}

TEST(Estimate, EmptyNetworkCostsNothing)
{
    const auto est = estimate(NetworkWorkload{}, preset("V1"));
    EXPECT_EQ(est.latency_s, 0.0);
    EXPECT_EQ(est.energy_j, 0.0);
    EXPECT_EQ(est.total_cycles, 0);
    EXPECT_EQ(est.memory_bound_fraction(), 0.0);
}

TEST(Estimate, SingleConvOnV2)
{
    NetworkWorkload net;
    auto layer = dense_layer(4 * KiB);
    layer.macs = 1048576;
    net.layers.push_back(layer);
    const auto est = estimate(net, preset("V2"));
    ASSERT_TRUE(est.cache_plan.cached[0]);
    EXPECT_EQ(est.per_layer[0].compute_cycles, 256);
    EXPECT_EQ(est.per_layer[0].memory_cycles, 0);
    EXPECT_EQ(est.total_cycles, 256);
    EXPECT_NEAR(est.latency_s, 0.24e-6, 0.005e-6);
}

TEST(Estimate, InfiniteBandwidthIsComputeBound)
{
    auto cfg = preset("V1");
    cfg.io_bandwidth_bytes_per_s = 1e30;
    for (const auto &net : random_networks(20, 2))
    {
        const auto est = estimate(net, cfg);
        std::int64_t compute = 0;
        for (const auto &l : est.per_layer)
        {
            EXPECT_EQ(l.bound, Bound::Compute);
            compute += l.compute_cycles;
        }
        EXPECT_EQ(est.total_cycles, compute);
    }
}

TEST(Estimate, LatencyIsCyclesOverClock)
{
    for (const auto &net : random_networks(30, 3))
        for (const auto &name : accel::preset_names())
            for (auto mode : {EstimateMode::SteadyState, EstimateMode::Cold})
            {
                const auto cfg = preset(name);
                const auto est = estimate(net, cfg, mode);
                std::int64_t cycles = 0;
                for (const auto &l : est.per_layer) cycles += std::max(l.compute_cycles, l.memory_cycles);
                EXPECT_EQ(cycles, est.total_cycles);
                EXPECT_DOUBLE_EQ(est.latency_s, static_cast<double>(est.total_cycles) / cfg.clock_hz);
                EXPECT_GT(est.latency_s, 0.0);
                EXPECT_GE(est.energy_j, 0.0);
                EXPECT_GE(est.memory_bound_fraction(), 0.0);
                EXPECT_LE(est.memory_bound_fraction(), 1.0);
            }
}

TEST(Estimate, PoolingUsesVectorLanes)
{
    NetworkWorkload net;
    LayerWorkload pool;
    pool.kind = LayerKind::MaxPool3x3;
    pool.element_ops = 16 * 4 * 64 * 10;
    net.layers.push_back(pool);
    EXPECT_EQ(estimate(net, preset("V1")).per_layer[0].compute_cycles, 10);
}

TEST(Estimate, OverheadCyclesAddPerLayer)
{
    const auto net = random_networks(1, 4)[0];
    CostOptions options;
    options.layer_overhead_cycles = 1000;
    auto cfg = preset("V2");
    cfg.io_bandwidth_bytes_per_s = 1e30;
    EXPECT_EQ(estimate(net, cfg, EstimateMode::SteadyState, options).total_cycles,
              estimate(net, cfg).total_cycles + 1000 * static_cast<std::int64_t>(net.layers.size()));
}

TEST(Energy, MacsAlone)
{
    EXPECT_DOUBLE_EQ(estimate_energy({1000000000, 0, 0, 0.0}, {}), 1e-3);
    EXPECT_EQ(estimate_energy({}, {}), 0.0);
    accel::EnergyCoefficients k;
    k.static_mw = 500;
    EXPECT_DOUBLE_EQ(estimate_energy({0, 10, 20, 2.0}, k), 10 * 100e-12 + 20 * 1e-12 + 1.0);
}

TEST(Energy, ColdNeverCheaperThanSteady)
{
    for (const auto &net : random_networks(50, 5))
        for (const auto &name : accel::preset_names())
        {
            const auto steady = estimate(net, preset(name));
            const auto cold = estimate(net, preset(name), EstimateMode::Cold);
            EXPECT_GE(cold.energy_j, steady.energy_j);
            EXPECT_GE(cold.latency_s, steady.latency_s);
        }
}

TEST(Properties, MoreBandwidthNeverSlower)
{
    for (const auto &net : random_networks(50, 6))
        for (const auto &name : accel::preset_names())
            for (auto mode : {EstimateMode::SteadyState, EstimateMode::Cold})
            {
                auto cfg = preset(name);
                const auto base = estimate(net, cfg, mode);
                cfg.io_bandwidth_bytes_per_s *= 1.7;
                EXPECT_LE(estimate(net, cfg, mode).latency_s, base.latency_s);
            }
}

TEST(Properties, MoreComputeNeverMoreComputeCycles)
{
    const auto nets = random_networks(30, 7);
    const auto base_cfg = preset("V2");
    auto compute = [](const PerfEstimate &e) {
        std::int64_t c = 0;
        for (const auto &l : e.per_layer) c += l.compute_cycles;
        return c;
    };
    for (const auto &net : nets)
    {
        const auto base = compute(estimate(net, base_cfg));
        for (int knob = 0; knob < 4; ++knob)
        {
            auto cfg = base_cfg;
            if (knob == 0) cfg.pes_x *= 2;
            if (knob == 1) cfg.pes_y += 1;
            if (knob == 2) cfg.cores_per_pe += 1;
            if (knob == 3) cfg.compute_lanes *= 2;
            const auto est = estimate(net, cfg);
            EXPECT_LE(compute(est), base);
            for (std::size_t i = 0; i < est.per_layer.size(); ++i)
                EXPECT_LE(est.per_layer[i].compute_cycles, estimate(net, base_cfg).per_layer[i].compute_cycles);
        }
    }
}

TEST(Properties, LargerCacheNeverHurtsSteadyState)
{
    for (const auto &net : random_networks(40, 8))
        for (const auto &name : accel::preset_names())
        {
            double last_latency = INFINITY;
            double last_energy = INFINITY;
            for (double fraction : {0.0, 0.25, 0.5, 0.75, 1.0})
            {
                CostOptions options;
                options.pe_cache_fraction = fraction;
                const auto est = estimate(net, preset(name), EstimateMode::SteadyState, options);
                EXPECT_LE(est.latency_s, last_latency) << name << " " << fraction;
                EXPECT_LE(est.energy_j, last_energy) << name << " " << fraction;
                last_latency = est.latency_s;
                last_energy = est.energy_j;
            }

            auto cfg = preset(name);
            const auto base = estimate(net, cfg);
            cfg.core_memory_bytes *= 4;
            const auto bigger = estimate(net, cfg);
            EXPECT_LE(bigger.latency_s, base.latency_s);
            EXPECT_LE(bigger.energy_j, base.energy_j);
        }
}

TEST(Properties, StreamingLatencyProportionalToBytes)
{
    const auto net = stack_of_megabytes(200);
    for (const auto &name : accel::preset_names())
    {
        const auto cfg = preset(name);
        const auto est = estimate(net, cfg, EstimateMode::Cold);
        for (const auto &l : est.per_layer) ASSERT_EQ(l.bound, Bound::Memory);
        const double expected = static_cast<double>(net.total_param_bytes()) / cfg.sustained_bandwidth();
        EXPECT_NEAR(est.latency_s, expected, 0.05 * expected) << name;
    }
}

TEST(Properties, StreamingPresetOrdering)
{
    for (int megabytes : {40, 100, 400})
    {
        const auto net = stack_of_megabytes(megabytes);
        const auto v1 = estimate(net, preset("V1"), EstimateMode::Cold).latency_s;
        EXPECT_LT(estimate(net, preset("V2"), EstimateMode::Cold).latency_s, v1);
        EXPECT_LT(estimate(net, preset("V3"), EstimateMode::Cold).latency_s, v1);
    }
}

TEST(Properties, MediumModelCrossover)
{
    auto fastest = [](const NetworkWorkload &net) {
        std::string best;
        double best_latency = INFINITY;
        for (const auto &name : accel::preset_names())
        {
            const double latency = estimate(net, preset(name)).latency_s;
            if (latency < best_latency)
            {
                best_latency = latency;
                best = name;
            }
        }
        return best;
    };
    EXPECT_EQ(fastest(stack_of_megabytes(20)), "V1");
    EXPECT_EQ(fastest(stack_of_megabytes(100)), "V2");
}

TEST(Properties, PureFunction)
{
    const auto net = random_networks(1, 9)[0];
    const auto a = estimate(net, preset("V3"));
    const auto b = estimate(net, preset("V3"));
    EXPECT_EQ(a.total_cycles, b.total_cycles);
    EXPECT_EQ(a.energy_j, b.energy_j);
    EXPECT_EQ(a.cache_plan.cached, b.cache_plan.cached);
}

TEST(Estimate, ActivationSpillChargedAsDram)
{
    auto cfg = preset("V2");
    NetworkWorkload net;
    auto layer = dense_layer(KiB);
    layer.input_activation_bytes = 5 * MiB;
    layer.output_activation_bytes = 3 * MiB;
    net.layers.push_back(layer);
    const auto est = estimate(net, cfg);
    EXPECT_EQ(est.per_layer[0].spill_bytes, 8 * MiB - accel::total_pe_memory(cfg));
    EXPECT_GT(est.per_layer[0].memory_cycles, 0);
}
