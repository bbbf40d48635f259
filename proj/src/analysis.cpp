// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/analysis.hpp"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <unordered_map>

#include "edgeperf/error.hpp"

namespace edgeperf::analysis
{

namespace
{

void require_pair(std::span<const double> xs, std::span<const double> ys)
{
    if (xs.size() != ys.size()) throw Error("correlation inputs differ in length");
    if (xs.size() < 2) throw Error("correlation needs at least two samples");
}

std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int op_index(nas::OperationKind kind)
{
    for (std::size_t i = 0; i < nas::kInteriorOps.size(); ++i)
        if (nas::kInteriorOps[i] == kind) return static_cast<int>(i);
    throw Error("operation is not an interior operation");
}

}  // namespace

double pearson(std::span<const double> xs, std::span<const double> ys)
{
    require_pair(xs, ys);
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        const double dx = xs[i] - mx;
        const double dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw Error("correlation undefined for a constant input");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(std::span<const double> xs)
{
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();)
    {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
        const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> xs, std::span<const double> ys)
{
    require_pair(xs, ys);
    const auto rx = average_ranks(xs);
    const auto ry = average_ranks(ys);
    return pearson(rx, ry);
}

ResultRow make_row(const nas::CellGraph &cell,
                   const nas::NetworkWorkload &net,
                   const accel::AcceleratorConfig &cfg,
                   const cost::PerfEstimate &estimate)
{
    const auto counts = nas::count_op_kinds(cell);
    ResultRow row;
    row.cell_hash = nas::canonical_hash(cell);
    row.accel = cfg.name;
    row.latency_ms = estimate.latency_s * 1e3;
    row.energy_mj = estimate.energy_j * 1e3;
    row.total_params = net.total_params;
    row.total_macs = net.total_macs;
    row.depth = nas::cell_depth(cell);
    row.width = nas::cell_width(cell);
    row.n_conv3x3 = counts.conv3x3;
    row.n_conv1x1 = counts.conv1x1;
    row.n_maxpool3x3 = counts.maxpool3x3;
    row.bound_fraction_memory = estimate.memory_bound_fraction();
    return row;
}

// ---------------------------------------------------------------------------

const Bucket &BucketReport::at(const std::string &accel) const
{
    for (const auto &b : buckets)
        if (b.accel == accel) return b;
    throw Error("no bucket for accelerator " + accel);
}

BucketReport best_config_buckets(std::span<const ResultRow> rows)
{
    BucketReport report;
    std::map<std::string, std::size_t> accel_index;
    for (const auto &r : rows) accel_index.emplace(r.accel, 0);
    std::size_t idx = 0;
    for (auto &[name, i] : accel_index)
    {
        i = idx++;
        report.accelerators.push_back(name);
    }
    const std::size_t A = report.accelerators.size();

    // Per cell: row index per accelerator, in first-seen cell order.
    std::unordered_map<std::string, std::size_t> cell_index;
    std::vector<std::vector<const ResultRow *>> table;
    for (const auto &r : rows)
    {
        auto [it, inserted] = cell_index.emplace(r.cell_hash, table.size());
        if (inserted) table.emplace_back(A, nullptr);
        auto &slot = table[it->second][accel_index.at(r.accel)];
        if (slot) throw Error("duplicate result row for cell " + r.cell_hash + " on " + r.accel);
        slot = &r;
    }

    report.cells = table.size();
    report.buckets.resize(A);
    std::vector<std::vector<double>> lat_sum(A, std::vector<double>(A, 0.0));
    std::vector<std::vector<double>> energy_sum(A, std::vector<double>(A, 0.0));
    for (std::size_t a = 0; a < A; ++a) report.buckets[a].accel = report.accelerators[a];

    for (const auto &cell_rows : table)
    {
        for (std::size_t a = 0; a < A; ++a)
            if (!cell_rows[a])
            {
                const auto &any = *std::find_if(cell_rows.begin(), cell_rows.end(), [](auto *p) { return p; });
                throw Error("cell " + any->cell_hash + " has no result row for accelerator " + report.accelerators[a]);
            }
        std::size_t best = 0;
        bool tie = false;
        for (std::size_t a = 1; a < A; ++a)
        {
            if (cell_rows[a]->latency_ms < cell_rows[best]->latency_ms)
            {
                best = a;
                tie = false;
            }
            else if (cell_rows[a]->latency_ms == cell_rows[best]->latency_ms)
            {
                tie = true;
            }
        }
        if (tie)
        {
            ++report.buckets[best].ties;
            ++report.ties;
            continue;
        }
        ++report.buckets[best].count;
        for (std::size_t a = 0; a < A; ++a)
        {
            lat_sum[best][a] += cell_rows[a]->latency_ms;
            energy_sum[best][a] += cell_rows[a]->energy_mj;
        }
    }

    for (std::size_t b = 0; b < A; ++b)
    {
        auto &bucket = report.buckets[b];
        for (std::size_t a = 0; a < A; ++a)
        {
            const double n = static_cast<double>(bucket.count);
            bucket.mean_latency_ms[report.accelerators[a]] = bucket.count ? lat_sum[b][a] / n : 0.0;
            bucket.mean_energy_mj[report.accelerators[a]] = bucket.count ? energy_sum[b][a] / n : 0.0;
        }
    }
    return report;
}

// ---------------------------------------------------------------------------

double SwapEntry::mean_delta_ms() const
{
    return count() ? (exact_delta_ms + fallback_delta_ms) / static_cast<double>(count()) : 0.0;
}

double SwapEntry::mean_delta_pct() const
{
    return count() ? (exact_delta_pct + fallback_delta_pct) / static_cast<double>(count()) : 0.0;
}

double SwapEntry::mean_exact_delta_ms() const
{
    return exact_matches ? exact_delta_ms / static_cast<double>(exact_matches) : 0.0;
}

double SwapEntry::match_rate() const
{
    return attempts ? static_cast<double>(count()) / static_cast<double>(attempts) : 0.0;
}

const SwapEntry &SwapImpactMatrix::at(nas::OperationKind from, nas::OperationKind to) const
{
    return entries[static_cast<std::size_t>(op_index(from))][static_cast<std::size_t>(op_index(to))];
}

namespace
{

// Vertex count, adjacency bits and interior op codes packed into one word.
std::uint64_t exact_key(const nas::CellGraph &cell)
{
    const int n = cell.num_vertices();
    std::uint64_t ops = 0;
    for (int v = 1; v + 1 < n; ++v) ops = ops * 3 + static_cast<std::uint64_t>(op_index(cell.op(v)));
    return (static_cast<std::uint64_t>(n) << 60) | (ops << 49) | cell.adjacency_bits();
}

}  // namespace

SwapImpactMatrix swap_impact(std::span<const nas::CellGraph> cells,
                             std::span<const ResultRow> rows,
                             const std::string &accel)
{
    SwapImpactMatrix matrix;
    matrix.accel = accel;

    std::unordered_map<std::string, double> by_hash;
    for (const auto &r : rows)
        if (r.accel == accel) by_hash.emplace(r.cell_hash, r.latency_ms);

    std::unordered_map<std::uint64_t, double> by_layout;
    std::vector<double> latency(cells.size(), std::nan(""));
    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        auto it = by_hash.find(nas::canonical_hash(cells[i]));
        if (it == by_hash.end()) continue;
        latency[i] = it->second;
        by_layout.emplace(exact_key(cells[i]), it->second);
    }

    for (std::size_t i = 0; i < cells.size(); ++i)
    {
        if (std::isnan(latency[i])) continue;
        const auto &cell = cells[i];
        for (int v = 1; v + 1 < cell.num_vertices(); ++v)
        {
            const int from = op_index(cell.op(v));
            for (int to = 0; to < 3; ++to)
            {
                if (to == from) continue;
                auto &entry = matrix.entries[static_cast<std::size_t>(from)][static_cast<std::size_t>(to)];
                ++entry.attempts;
                const auto swapped = cell.with_op(v, nas::kInteriorOps[static_cast<std::size_t>(to)]);
                const double delta_base = latency[i];
                if (auto it = by_layout.find(exact_key(swapped)); it != by_layout.end())
                {
                    ++entry.exact_matches;
                    entry.exact_delta_ms += it->second - delta_base;
                    entry.exact_delta_pct += 100.0 * (it->second - delta_base) / delta_base;
                }
                else if (auto jt = by_hash.find(nas::canonical_hash(swapped)); jt != by_hash.end())
                {
                    ++entry.fallback_matches;
                    entry.fallback_delta_ms += jt->second - delta_base;
                    entry.fallback_delta_pct += 100.0 * (jt->second - delta_base) / delta_base;
                }
            }
        }
    }
    return matrix;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Verdict verdict)
{
    switch (verdict)
    {
        case Verdict::MonotoneIncreasing: return "monotone increasing";
        case Verdict::MonotoneDecreasing: return "monotone decreasing";
        case Verdict::NonMonotone: return "non-monotone";
        case Verdict::None: return "none";
    }
    return "none";
}

Verdict monotonicity(std::span<const TrendGroup> groups)
{
    if (groups.size() < 2) return Verdict::None;
    bool up = true;
    bool down = true;
    for (std::size_t i = 1; i < groups.size(); ++i)
    {
        up = up && groups[i].mean_latency_ms > groups[i - 1].mean_latency_ms;
        down = down && groups[i].mean_latency_ms < groups[i - 1].mean_latency_ms;
    }
    if (up) return Verdict::MonotoneIncreasing;
    if (down) return Verdict::MonotoneDecreasing;
    return Verdict::NonMonotone;
}

namespace
{

TrendGroup summarize(std::span<const std::size_t> members, std::span<const double> keys, std::span<const double> latency)
{
    TrendGroup g;
    g.count = members.size();
    g.min_latency_ms = latency[members.front()];
    g.max_latency_ms = latency[members.front()];
    double key_sum = 0.0;
    double sum = 0.0;
    for (std::size_t m : members)
    {
        key_sum += keys[m];
        sum += latency[m];
        g.min_latency_ms = std::min(g.min_latency_ms, latency[m]);
        g.max_latency_ms = std::max(g.max_latency_ms, latency[m]);
    }
    g.key = key_sum / static_cast<double>(g.count);
    g.mean_latency_ms = sum / static_cast<double>(g.count);
    return g;
}

std::vector<std::size_t> sorted_by_key(std::span<const double> keys, std::span<const double> latency)
{
    if (keys.size() != latency.size()) throw Error("trend keys and latencies differ in length");
    std::vector<std::size_t> order(keys.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
    return order;
}

}  // namespace

Trend group_by_value(const std::string &feature, std::span<const double> keys, std::span<const double> latency_ms)
{
    Trend trend;
    trend.feature = feature;
    const auto order = sorted_by_key(keys, latency_ms);
    for (std::size_t i = 0; i < order.size();)
    {
        std::size_t j = i;
        while (j < order.size() && keys[order[j]] == keys[order[i]]) ++j;
        trend.groups.push_back(summarize(std::span(order).subspan(i, j - i), keys, latency_ms));
        i = j;
    }
    trend.verdict = monotonicity(trend.groups);
    return trend;
}

Trend group_by_quantile(const std::string &feature,
                        std::span<const double> keys,
                        std::span<const double> latency_ms,
                        int quantiles)
{
    if (quantiles <= 0) throw Error("quantile count must be positive");
    Trend trend;
    trend.feature = feature;
    const auto order = sorted_by_key(keys, latency_ms);
    const std::size_t n = order.size();
    const auto q = static_cast<std::size_t>(quantiles);
    for (std::size_t i = 0; i < n;)
    {
        // Target end of the bucket that position i falls into, then extend over ties.
        const std::size_t bucket = i * q / n;
        std::size_t j = std::max(i + 1, ((bucket + 1) * n + q - 1) / q);
        j = std::min(j, n);
        while (j < n && keys[order[j]] == keys[order[j - 1]]) ++j;
        trend.groups.push_back(summarize(std::span(order).subspan(i, j - i), keys, latency_ms));
        i = j;
    }
    trend.verdict = monotonicity(trend.groups);
    return trend;
}

const Trend &TrendReport::at(const std::string &feature) const
{
    for (const auto &t : trends)
        if (t.feature == feature) return t;
    throw Error("no trend for feature " + feature);
}

std::vector<TrendReport> trend_report(std::span<const ResultRow> rows)
{
    if (rows.empty()) throw Error("trend report needs at least one row");
    std::map<std::string, std::vector<const ResultRow *>> by_accel;
    for (const auto &r : rows) by_accel[r.accel].push_back(&r);

    std::vector<TrendReport> reports;
    for (const auto &[accel, members] : by_accel)
    {
        std::vector<double> lat, conv3, depth, width, params;
        for (const auto *r : members)
        {
            lat.push_back(r->latency_ms);
            conv3.push_back(r->n_conv3x3);
            depth.push_back(r->depth);
            width.push_back(r->width);
            params.push_back(static_cast<double>(r->total_params));
        }
        TrendReport report;
        report.accel = accel;
        report.trends.push_back(group_by_value("n_conv3x3", conv3, lat));
        report.trends.push_back(group_by_value("depth", depth, lat));
        report.trends.push_back(group_by_value("width", width, lat));
        report.trends.push_back(group_by_quantile("total_params", params, lat, 10));
        reports.push_back(std::move(report));
    }
    return reports;
}

// ---------------------------------------------------------------------------

void write_bucket_csv(std::ostream &out, const BucketReport &report)
{
    out << "bucket,count,ties,accel,mean_latency_ms,mean_energy_mj\n";
    for (const auto &b : report.buckets)
        for (const auto &a : report.accelerators)
            out << b.accel << ',' << b.count << ',' << b.ties << ',' << a << ',' << num(b.mean_latency_ms.at(a)) << ','
                << num(b.mean_energy_mj.at(a)) << '\n';
}

void write_swap_csv(std::ostream &out, std::span<const SwapImpactMatrix> matrices)
{
    out << "accel,from,to,attempts,exact_matches,fallback_matches,match_rate,mean_delta_ms,mean_delta_pct,"
           "mean_exact_delta_ms\n";
    for (const auto &m : matrices)
        for (std::size_t f = 0; f < 3; ++f)
            for (std::size_t t = 0; t < 3; ++t)
            {
                const auto &e = m.entries[f][t];
                out << m.accel << ',' << nas::to_string(nas::kInteriorOps[f]) << ','
                    << nas::to_string(nas::kInteriorOps[t]) << ',' << e.attempts << ',' << e.exact_matches << ','
                    << e.fallback_matches << ',' << num(e.match_rate()) << ',' << num(e.mean_delta_ms()) << ','
                    << num(e.mean_delta_pct()) << ',' << num(e.mean_exact_delta_ms()) << '\n';
            }
}

void write_trend_csv(std::ostream &out, std::span<const TrendReport> reports)
{
    out << "accel,feature,group_key,count,min_latency_ms,mean_latency_ms,max_latency_ms,verdict\n";
    for (const auto &r : reports)
        for (const auto &t : r.trends)
            for (const auto &g : t.groups)
                out << r.accel << ',' << t.feature << ',' << num(g.key) << ',' << g.count << ','
                    << num(g.min_latency_ms) << ',' << num(g.mean_latency_ms) << ',' << num(g.max_latency_ms) << ','
                    << to_string(t.verdict) << '\n';
}

void write_long_format(std::ostream &out, std::span<const ResultRow> rows)
{
    out << "cell_hash,accel,variable,value\n";
    for (const auto &r : rows)
    {
        auto put = [&](const char *name, double v) {
            out << r.cell_hash << ',' << r.accel << ',' << name << ',' << num(v) << '\n';
        };
        put("latency_ms", r.latency_ms);
        put("energy_mj", r.energy_mj);
        put("total_params", static_cast<double>(r.total_params));
        put("total_macs", static_cast<double>(r.total_macs));
        put("depth", r.depth);
        put("width", r.width);
        put("n_conv3x3", r.n_conv3x3);
        put("n_conv1x1", r.n_conv1x1);
        put("n_maxpool3x3", r.n_maxpool3x3);
        put("bound_fraction_memory", r.bound_fraction_memory);
        if (r.mean_validation_accuracy) put("mean_validation_accuracy", *r.mean_validation_accuracy);
    }
}

void write_summary(std::ostream &out, const BucketReport &buckets, std::span<const TrendReport> trends)
{
    out << "Best configuration buckets (" << buckets.cells << " cells, " << buckets.ties << " ties)\n";
    for (const auto &b : buckets.buckets)
    {
        out << "  " << b.accel << ": " << b.count << " cells";
        if (b.ties) out << " (+" << b.ties << " tied)";
        out << '\n';
        if (!b.count) continue;
        for (const auto &a : buckets.accelerators)
            out << "    on " << a << ": mean latency " << short_num(b.mean_latency_ms.at(a)) << " ms, mean energy "
                << short_num(b.mean_energy_mj.at(a)) << " mJ\n";
    }
    for (const auto &r : trends)
    {
        out << "\nTrends on " << r.accel << '\n';
        for (const auto &t : r.trends)
        {
            out << "  " << t.feature << ": " << to_string(t.verdict) << '\n';
            for (const auto &g : t.groups)
                out << "    " << short_num(g.key) << "  n=" << g.count << "  min " << short_num(g.min_latency_ms)
                    << "  mean " << short_num(g.mean_latency_ms) << "  max " << short_num(g.max_latency_ms) << " ms\n";
        }
    }
}

void write_swap_summary(std::ostream &out, std::span<const SwapImpactMatrix> matrices)
{
    for (const auto &m : matrices)
    {
        out << "Operation swaps on " << m.accel << " (mean latency change over matched pairs)\n";
        for (std::size_t f = 0; f < 3; ++f)
            for (std::size_t t = 0; t < 3; ++t)
            {
                if (f == t) continue;
                const auto &e = m.entries[f][t];
                out << "  " << nas::to_string(nas::kInteriorOps[f]) << " -> " << nas::to_string(nas::kInteriorOps[t])
                    << ": " << short_num(e.mean_delta_ms()) << " ms (" << short_num(e.mean_delta_pct()) << " %), "
                    << e.count() << " pairs, match rate " << short_num(e.match_rate()) << " (" << e.fallback_matches
                    << " via hash)\n";
            }
    }
}

}  // namespace edgeperf::analysis
