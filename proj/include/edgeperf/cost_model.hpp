// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "edgeperf/accel_config.hpp"
#include "edgeperf/network.hpp"

namespace edgeperf::cost
{

enum class EstimateMode
{
    SteadyState,  // parameters cached by earlier inferences stay on chip
    Cold,         // every parameter is streamed from DRAM
};

EstimateMode parse_mode(std::string_view text);
std::string_view to_string(EstimateMode mode);

enum class Bound
{
    Compute,
    Memory,
};

struct CostOptions
{
    // Share of total PE memory that may hold cached parameters in addition
    // to the core memories.
    double pe_cache_fraction = 0.75;
    std::int64_t layer_overhead_cycles = 0;
};

struct CachePlan
{
    std::vector<bool> cached;  // per layer
    std::int64_t capacity_bytes = 0;
    std::int64_t cached_bytes = 0;
    std::int64_t streamed_bytes = 0;
};

struct LayerCost
{
    std::int64_t compute_cycles = 0;
    std::int64_t memory_cycles = 0;
    Bound bound = Bound::Compute;
    std::int64_t streamed_param_bytes = 0;
    std::int64_t spill_bytes = 0;
    std::int64_t dram_bytes = 0;
    std::int64_t sram_bytes = 0;

    std::int64_t cycles() const { return compute_cycles > memory_cycles ? compute_cycles : memory_cycles; }
};

struct PerfEstimate
{
    double latency_s = 0.0;
    double energy_j = 0.0;
    std::int64_t total_cycles = 0;
    std::vector<LayerCost> per_layer;
    CachePlan cache_plan;

    std::int64_t macs = 0;
    std::int64_t dram_bytes = 0;
    std::int64_t sram_bytes = 0;

    // Share of total cycles spent in memory-bound layers.
    double memory_bound_fraction() const;
};

std::int64_t cache_capacity(const accel::AcceleratorConfig &cfg, const CostOptions &options = {});

// Greedy: layers in descending param_bytes order (ties by position) are cached
// until the first one that does not fit; it and all later ones stream.
CachePlan plan_cache(std::span<const nas::LayerWorkload> layers, std::int64_t capacity_bytes);
// Capacity is cache_capacity(), reduced so that cached parameters never
// displace the network's largest per-layer activation working set.
CachePlan plan_cache(const nas::NetworkWorkload &net,
                     const accel::AcceleratorConfig &cfg,
                     const CostOptions &options = {});

struct EnergyComponents
{
    std::int64_t macs = 0;
    std::int64_t dram_bytes = 0;
    std::int64_t sram_bytes = 0;
    double latency_s = 0.0;
};

double estimate_energy(const EnergyComponents &components, const accel::EnergyCoefficients &coefficients);

// Per-layer roofline: cycles = max(compute, memory), with memory traffic made
// of non-cached parameters plus activations that overflow the PE memories.
PerfEstimate estimate(const nas::NetworkWorkload &net,
                      const accel::AcceleratorConfig &cfg,
                      EstimateMode mode = EstimateMode::SteadyState,
                      const CostOptions &options = {});

}  // namespace edgeperf::cost
