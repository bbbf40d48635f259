// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace edgeperf::accel
{

// Defaults are order-of-magnitude values for 8-bit edge inference; they are
// not calibrated against measured silicon.
struct EnergyCoefficients
{
    double pj_per_mac = 1.0;
    double pj_per_dram_byte = 100.0;
    double pj_per_sram_byte = 1.0;
    double static_mw = 0.0;

    bool operator==(const EnergyCoefficients &) const = default;
};

// Template accelerator: a pes_x x pes_y array of PEs, each with a shared PE
// memory (activations) and cores_per_pe cores; each core owns a core memory
// (parameters) and compute_lanes SIMD lanes of macs_per_lane-way MAC units.
struct AcceleratorConfig
{
    std::string name;
    double clock_hz = 0.0;
    int pes_x = 0;
    int pes_y = 0;
    std::int64_t pe_memory_bytes = 0;
    int cores_per_pe = 0;
    std::int64_t core_memory_bytes = 0;
    int compute_lanes = 0;
    int macs_per_lane = 4;
    // Opaque entry counts; recorded but not used by the cost model.
    std::int64_t instruction_memory_entries = 0;
    std::int64_t parameter_memory_entries = 0;
    std::int64_t activation_memory_entries = 0;
    double io_bandwidth_bytes_per_s = 0.0;
    double sustained_bw_fraction = 1.0;
    EnergyCoefficients energy;

    int total_pes() const { return pes_x * pes_y; }
    std::int64_t macs_per_cycle() const;
    // One element per lane per cycle for non-MAC vector work.
    std::int64_t vector_ops_per_cycle() const;
    double sustained_bandwidth() const { return io_bandwidth_bytes_per_s * sustained_bw_fraction; }

    // Throws Error when a count or size is non-positive or the bandwidth
    // fraction is outside (0, 1].
    void validate() const;

    bool operator==(const AcceleratorConfig &) const = default;
};

std::vector<std::string> preset_names();
AcceleratorConfig preset(std::string_view name);

double peak_tops(const AcceleratorConfig &cfg);
std::int64_t total_core_memory(const AcceleratorConfig &cfg);
std::int64_t total_pe_memory(const AcceleratorConfig &cfg);

nlohmann::json to_json(const AcceleratorConfig &cfg);
AcceleratorConfig config_from_json(const nlohmann::json &j);

AcceleratorConfig load_config(const std::filesystem::path &path);
void save_config(const std::filesystem::path &path, const AcceleratorConfig &cfg);

}  // namespace edgeperf::accel
