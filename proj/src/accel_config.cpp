// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/accel_config.hpp"

#include <fstream>

#include "edgeperf/error.hpp"

namespace edgeperf::accel
{

namespace
{

constexpr std::int64_t KiB = 1024;
constexpr std::int64_t MiB = 1024 * KiB;
constexpr double GBps = 1e9;

}  // namespace

std::int64_t AcceleratorConfig::macs_per_cycle() const
{
    return std::int64_t{total_pes()} * cores_per_pe * compute_lanes * macs_per_lane;
}

std::int64_t AcceleratorConfig::vector_ops_per_cycle() const
{
    return std::int64_t{total_pes()} * cores_per_pe * compute_lanes;
}

void AcceleratorConfig::validate() const
{
    auto require = [&](bool ok, const char *what) {
        if (!ok) throw Error("accelerator '" + name + "': " + what);
    };
    require(clock_hz > 0, "clock_hz must be positive");
    require(pes_x > 0 && pes_y > 0, "PE array dimensions must be positive");
    require(pe_memory_bytes > 0, "pe_memory_bytes must be positive");
    require(cores_per_pe > 0, "cores_per_pe must be positive");
    require(core_memory_bytes > 0, "core_memory_bytes must be positive");
    require(compute_lanes > 0, "compute_lanes must be positive");
    require(macs_per_lane > 0, "macs_per_lane must be positive");
    require(instruction_memory_entries > 0 && parameter_memory_entries > 0 && activation_memory_entries > 0,
            "memory entry counts must be positive");
    require(io_bandwidth_bytes_per_s > 0, "io_bandwidth_bytes_per_s must be positive");
    require(sustained_bw_fraction > 0 && sustained_bw_fraction <= 1, "sustained_bw_fraction must be in (0, 1]");
    require(energy.pj_per_mac >= 0 && energy.pj_per_dram_byte >= 0 && energy.pj_per_sram_byte >= 0 &&
                energy.static_mw >= 0,
            "energy coefficients must be non-negative");
}

std::vector<std::string> preset_names() { return {"V1", "V2", "V3"}; }

AcceleratorConfig preset(std::string_view name)
{
    AcceleratorConfig cfg;
    cfg.name = std::string(name);
    cfg.instruction_memory_entries = 16384;
    cfg.activation_memory_entries = 1024;
    cfg.macs_per_lane = 4;
    if (name == "V1")
    {
        cfg.clock_hz = 800e6;
        cfg.pes_x = 4;
        cfg.pes_y = 4;
        cfg.pe_memory_bytes = 2 * MiB;
        cfg.cores_per_pe = 4;
        cfg.core_memory_bytes = 32 * KiB;
        cfg.compute_lanes = 64;
        cfg.parameter_memory_entries = 16384;
        cfg.io_bandwidth_bytes_per_s = 17 * GBps;
        cfg.sustained_bw_fraction = 1.0;
    }
    else if (name == "V2")
    {
        cfg.clock_hz = 1066e6;
        cfg.pes_x = 4;
        cfg.pes_y = 4;
        cfg.pe_memory_bytes = 384 * KiB;
        cfg.cores_per_pe = 1;
        cfg.core_memory_bytes = 32 * KiB;
        cfg.compute_lanes = 64;
        cfg.parameter_memory_entries = 8192;
        cfg.io_bandwidth_bytes_per_s = 32 * GBps;
        cfg.sustained_bw_fraction = 1.0;
    }
    else if (name == "V3")
    {
        cfg.clock_hz = 1066e6;
        cfg.pes_x = 4;
        cfg.pes_y = 1;
        cfg.pe_memory_bytes = 2 * MiB;
        cfg.cores_per_pe = 8;
        cfg.core_memory_bytes = 8 * KiB;
        cfg.compute_lanes = 32;
        cfg.parameter_memory_entries = 8192;
        cfg.io_bandwidth_bytes_per_s = 32 * GBps;
        // Fewer PEs share the interconnect; modeled as a bandwidth derating.
        cfg.sustained_bw_fraction = 0.85;
    }
    else
    {
        throw Error("unknown accelerator preset '" + std::string(name) + "' (expected V1, V2 or V3)");
    }
    return cfg;
}

double peak_tops(const AcceleratorConfig &cfg)
{
    return 2.0 * static_cast<double>(cfg.macs_per_cycle()) * cfg.clock_hz / 1e12;
}

std::int64_t total_core_memory(const AcceleratorConfig &cfg)
{
    return cfg.core_memory_bytes * cfg.total_pes() * cfg.cores_per_pe;
}

std::int64_t total_pe_memory(const AcceleratorConfig &cfg) { return cfg.pe_memory_bytes * cfg.total_pes(); }

nlohmann::json to_json(const AcceleratorConfig &cfg)
{
    return {
        {"name", cfg.name},
        {"clock_hz", cfg.clock_hz},
        {"pes_x", cfg.pes_x},
        {"pes_y", cfg.pes_y},
        {"pe_memory_bytes", cfg.pe_memory_bytes},
        {"cores_per_pe", cfg.cores_per_pe},
        {"core_memory_bytes", cfg.core_memory_bytes},
        {"compute_lanes", cfg.compute_lanes},
        {"macs_per_lane", cfg.macs_per_lane},
        {"instruction_memory_entries", cfg.instruction_memory_entries},
        {"parameter_memory_entries", cfg.parameter_memory_entries},
        {"activation_memory_entries", cfg.activation_memory_entries},
        {"io_bandwidth_bytes_per_s", cfg.io_bandwidth_bytes_per_s},
        {"sustained_bw_fraction", cfg.sustained_bw_fraction},
        {"energy",
         {{"pj_per_mac", cfg.energy.pj_per_mac},
          {"pj_per_dram_byte", cfg.energy.pj_per_dram_byte},
          {"pj_per_sram_byte", cfg.energy.pj_per_sram_byte},
          {"static_mw", cfg.energy.static_mw}}},
    };
}

AcceleratorConfig config_from_json(const nlohmann::json &j)
{
    AcceleratorConfig cfg;
    try
    {
        cfg.name = j.at("name").get<std::string>();
        cfg.clock_hz = j.at("clock_hz").get<double>();
        cfg.pes_x = j.at("pes_x").get<int>();
        cfg.pes_y = j.at("pes_y").get<int>();
        cfg.pe_memory_bytes = j.at("pe_memory_bytes").get<std::int64_t>();
        cfg.cores_per_pe = j.at("cores_per_pe").get<int>();
        cfg.core_memory_bytes = j.at("core_memory_bytes").get<std::int64_t>();
        cfg.compute_lanes = j.at("compute_lanes").get<int>();
        cfg.macs_per_lane = j.value("macs_per_lane", 4);
        cfg.instruction_memory_entries = j.at("instruction_memory_entries").get<std::int64_t>();
        cfg.parameter_memory_entries = j.at("parameter_memory_entries").get<std::int64_t>();
        cfg.activation_memory_entries = j.at("activation_memory_entries").get<std::int64_t>();
        cfg.io_bandwidth_bytes_per_s = j.at("io_bandwidth_bytes_per_s").get<double>();
        cfg.sustained_bw_fraction = j.value("sustained_bw_fraction", 1.0);
        if (j.contains("energy"))
        {
            const auto &e = j.at("energy");
            cfg.energy.pj_per_mac = e.value("pj_per_mac", cfg.energy.pj_per_mac);
            cfg.energy.pj_per_dram_byte = e.value("pj_per_dram_byte", cfg.energy.pj_per_dram_byte);
            cfg.energy.pj_per_sram_byte = e.value("pj_per_sram_byte", cfg.energy.pj_per_sram_byte);
            cfg.energy.static_mw = e.value("static_mw", cfg.energy.static_mw);
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(std::string("accelerator config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

AcceleratorConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open accelerator config '" + path.string() + "'");
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error("accelerator config '" + path.string() + "': " + e.what());
    }
    return config_from_json(j);
}

void save_config(const std::filesystem::path &path, const AcceleratorConfig &cfg)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write accelerator config '" + path.string() + "'");
    out << to_json(cfg).dump(2) << '\n';
}

}  // namespace edgeperf::accel
