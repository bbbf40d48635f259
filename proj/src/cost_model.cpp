// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "edgeperf/error.hpp"

namespace edgeperf::cost
{

EstimateMode parse_mode(std::string_view text)
{
    if (text == "steady" || text == "steady_state") return EstimateMode::SteadyState;
    if (text == "cold") return EstimateMode::Cold;
    throw Error("unknown estimate mode '" + std::string(text) + "' (expected steady or cold)");
}

std::string_view to_string(EstimateMode mode) { return mode == EstimateMode::Cold ? "cold" : "steady"; }

double PerfEstimate::memory_bound_fraction() const
{
    if (total_cycles == 0) return 0.0;
    std::int64_t memory = 0;
    for (const auto &layer : per_layer)
        if (layer.bound == Bound::Memory) memory += layer.cycles();
    return static_cast<double>(memory) / static_cast<double>(total_cycles);
}

std::int64_t cache_capacity(const accel::AcceleratorConfig &cfg, const CostOptions &options)
{
    const double pe_share = options.pe_cache_fraction * static_cast<double>(accel::total_pe_memory(cfg));
    return accel::total_core_memory(cfg) + static_cast<std::int64_t>(std::floor(pe_share));
}

CachePlan plan_cache(std::span<const nas::LayerWorkload> layers, std::int64_t capacity_bytes)
{
    CachePlan plan;
    plan.capacity_bytes = std::max<std::int64_t>(capacity_bytes, 0);
    plan.cached.assign(layers.size(), false);

    std::vector<std::size_t> order(layers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return layers[a].param_bytes > layers[b].param_bytes;
    });

    // Stopping at the first layer that does not fit keeps the cached set a
    // prefix of a fixed order, so it only grows with capacity.
    bool full = false;
    for (std::size_t i : order)
    {
        const std::int64_t bytes = layers[i].param_bytes;
        if (bytes == 0) continue;
        full = full || plan.cached_bytes + bytes > plan.capacity_bytes;
        if (full)
        {
            plan.streamed_bytes += bytes;
            continue;
        }
        plan.cached[i] = true;
        plan.cached_bytes += bytes;
    }
    return plan;
}

CachePlan plan_cache(const nas::NetworkWorkload &net, const accel::AcceleratorConfig &cfg, const CostOptions &options)
{
    // Parameters placed in PE memory may not evict the largest activation
    // working set.
    std::int64_t working_set = 0;
    for (const auto &layer : net.layers)
        working_set = std::max(working_set, layer.input_activation_bytes + layer.output_activation_bytes);
    const std::int64_t core = accel::total_core_memory(cfg);
    const std::int64_t pe_room = std::max<std::int64_t>(0, accel::total_pe_memory(cfg) - working_set);
    const std::int64_t capacity = std::min(cache_capacity(cfg, options), core + pe_room);
    return plan_cache(net.layers, capacity);
}

double estimate_energy(const EnergyComponents &c, const accel::EnergyCoefficients &k)
{
    const double dynamic_pj = static_cast<double>(c.macs) * k.pj_per_mac +
                              static_cast<double>(c.dram_bytes) * k.pj_per_dram_byte +
                              static_cast<double>(c.sram_bytes) * k.pj_per_sram_byte;
    return dynamic_pj * 1e-12 + k.static_mw * 1e-3 * c.latency_s;
}

namespace
{

std::int64_t ceil_div(std::int64_t num, std::int64_t den) { return den <= 0 ? 0 : (num + den - 1) / den; }

std::int64_t transfer_cycles(std::int64_t bytes, const accel::AcceleratorConfig &cfg)
{
    if (bytes <= 0) return 0;
    const double cycles = static_cast<double>(bytes) * cfg.clock_hz / cfg.sustained_bandwidth();
    return static_cast<std::int64_t>(std::ceil(cycles));
}

}  // namespace

PerfEstimate estimate(const nas::NetworkWorkload &net,
                      const accel::AcceleratorConfig &cfg,
                      EstimateMode mode,
                      const CostOptions &options)
{
    PerfEstimate result;
    result.cache_plan = plan_cache(net, cfg, options);

    const std::int64_t core_memory = accel::total_core_memory(cfg);
    const std::int64_t param_spill = std::max<std::int64_t>(0, result.cache_plan.cached_bytes - core_memory);
    const std::int64_t activation_room = std::max<std::int64_t>(0, accel::total_pe_memory(cfg) - param_spill);

    result.per_layer.reserve(net.layers.size());
    for (std::size_t i = 0; i < net.layers.size(); ++i)
    {
        const auto &layer = net.layers[i];
        LayerCost cost;

        cost.compute_cycles = layer.uses_macs() ? ceil_div(layer.macs, cfg.macs_per_cycle())
                                                : ceil_div(layer.element_ops, cfg.vector_ops_per_cycle());
        cost.compute_cycles += options.layer_overhead_cycles;

        const bool cached = mode == EstimateMode::SteadyState && result.cache_plan.cached[i];
        cost.streamed_param_bytes = cached ? 0 : layer.param_bytes;

        const std::int64_t working_set = layer.input_activation_bytes + layer.output_activation_bytes;
        cost.spill_bytes = std::max<std::int64_t>(0, working_set - activation_room);

        cost.dram_bytes = cost.streamed_param_bytes + cost.spill_bytes;
        cost.sram_bytes = (cached ? layer.param_bytes : 0) + (working_set - cost.spill_bytes);
        cost.memory_cycles = transfer_cycles(cost.dram_bytes, cfg);
        cost.bound = cost.memory_cycles > cost.compute_cycles ? Bound::Memory : Bound::Compute;

        result.total_cycles += cost.cycles();
        result.macs += layer.macs;
        result.dram_bytes += cost.dram_bytes;
        result.sram_bytes += cost.sram_bytes;
        result.per_layer.push_back(cost);
    }

    result.latency_s = static_cast<double>(result.total_cycles) / cfg.clock_hz;
    result.energy_j = estimate_energy({result.macs, result.dram_bytes, result.sram_bytes, result.latency_s}, cfg.energy);
    return result;
}

}  // namespace edgeperf::cost
