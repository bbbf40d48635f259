// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edgeperf/accel_config.hpp"
#include "edgeperf/cost_model.hpp"
#include "edgeperf/nas_graph.hpp"
#include "edgeperf/network.hpp"

namespace edgeperf::analysis
{

// Both throw Error on length mismatch, fewer than two samples or a constant input.
double pearson(std::span<const double> xs, std::span<const double> ys);
double spearman(std::span<const double> xs, std::span<const double> ys);

// 1-based ranks; tied values share the mean of their positions.
std::vector<double> average_ranks(std::span<const double> xs);

// One (cell, accelerator) result. Latency and energy are kept in the units
// written to disk so that files round-trip exactly.
struct ResultRow
{
    std::string cell_hash;
    std::string accel;
    double latency_ms = 0.0;
    double energy_mj = 0.0;
    std::int64_t total_params = 0;
    std::int64_t total_macs = 0;
    int depth = 0;
    int width = 0;
    int n_conv3x3 = 0;
    int n_conv1x1 = 0;
    int n_maxpool3x3 = 0;
    double bound_fraction_memory = 0.0;
    std::optional<double> mean_validation_accuracy;

    double latency_s() const { return latency_ms * 1e-3; }
    double energy_j() const { return energy_mj * 1e-3; }

    bool operator==(const ResultRow &) const = default;
};

ResultRow make_row(const nas::CellGraph &cell,
                   const nas::NetworkWorkload &net,
                   const accel::AcceleratorConfig &cfg,
                   const cost::PerfEstimate &estimate);

// --- best configuration buckets -------------------------------------------

struct Bucket
{
    std::string accel;
    std::size_t count = 0;  // cells strictly fastest on this accelerator
    std::size_t ties = 0;   // tied cells whose first-named fastest is this accelerator
    std::map<std::string, double> mean_latency_ms;  // over `count` cells, per accelerator
    std::map<std::string, double> mean_energy_mj;
};

struct BucketReport
{
    std::vector<std::string> accelerators;  // sorted
    std::vector<Bucket> buckets;            // same order
    std::size_t cells = 0;
    std::size_t ties = 0;

    const Bucket &at(const std::string &accel) const;
};

// Every cell must have exactly one row per accelerator seen in `rows`.
BucketReport best_config_buckets(std::span<const ResultRow> rows);

// --- operation swaps -----------------------------------------------------------

struct SwapEntry
{
    std::size_t attempts = 0;
    std::size_t exact_matches = 0;
    std::size_t fallback_matches = 0;
    double exact_delta_ms = 0.0;  // sums
    double exact_delta_pct = 0.0;
    double fallback_delta_ms = 0.0;
    double fallback_delta_pct = 0.0;

    std::size_t count() const { return exact_matches + fallback_matches; }
    double mean_delta_ms() const;
    double mean_delta_pct() const;
    double mean_exact_delta_ms() const;
    double match_rate() const;
};

struct SwapImpactMatrix
{
    std::string accel;
    // Indexed by position in nas::kInteriorOps: [original][replacement].
    std::array<std::array<SwapEntry, 3>, 3> entries{};

    const SwapEntry &at(nas::OperationKind from, nas::OperationKind to) const;
};

// For every cell and interior vertex, replaces the op by each other kind and
// looks the result up: first by identical adjacency and op assignment, then by
// canonical hash. Cells without a result row for `accel` are skipped.
SwapImpactMatrix swap_impact(std::span<const nas::CellGraph> cells,
                             std::span<const ResultRow> rows,
                             const std::string &accel);

// --- structural trends -------------------------------------------------------

enum class Verdict
{
    MonotoneIncreasing,
    MonotoneDecreasing,
    NonMonotone,
    None,  // fewer than two groups
};

std::string_view to_string(Verdict verdict);

struct TrendGroup
{
    double key = 0.0;  // group value, or mean parameter count for decile groups
    std::size_t count = 0;
    double min_latency_ms = 0.0;
    double mean_latency_ms = 0.0;
    double max_latency_ms = 0.0;
};

struct Trend
{
    std::string feature;  // n_conv3x3, depth, width, total_params
    std::vector<TrendGroup> groups;
    Verdict verdict = Verdict::None;
};

// Verdict on strictly rising or falling group means.
Verdict monotonicity(std::span<const TrendGroup> groups);

// Groups rows by exact key value, ascending.
Trend group_by_value(const std::string &feature, std::span<const double> keys, std::span<const double> latency_ms);

// Up to `quantiles` groups of roughly equal size by ascending key; equal keys
// never straddle a boundary.
Trend group_by_quantile(const std::string &feature,
                        std::span<const double> keys,
                        std::span<const double> latency_ms,
                        int quantiles = 10);

struct TrendReport
{
    std::string accel;
    std::vector<Trend> trends;

    const Trend &at(const std::string &feature) const;
};

// One report per accelerator, sorted by name. Requires at least one row.
std::vector<TrendReport> trend_report(std::span<const ResultRow> rows);

// --- writers -----------------------------------------------------------------

void write_bucket_csv(std::ostream &out, const BucketReport &report);
void write_swap_csv(std::ostream &out, std::span<const SwapImpactMatrix> matrices);
void write_trend_csv(std::ostream &out, std::span<const TrendReport> reports);
// cell_hash,accel,variable,value
void write_long_format(std::ostream &out, std::span<const ResultRow> rows);
void write_summary(std::ostream &out, const BucketReport &buckets, std::span<const TrendReport> trends);
void write_swap_summary(std::ostream &out, std::span<const SwapImpactMatrix> matrices);

}  // namespace edgeperf::analysis
