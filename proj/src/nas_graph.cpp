// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/nas_graph.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <mutex>
#include <numeric>

#include "edgeperf/error.hpp"
#include "edgeperf/rng.hpp"

namespace edgeperf::nas
{

std::string_view to_string(OperationKind kind)
{
    switch (kind)
    {
        case OperationKind::Input: return "input";
        case OperationKind::Conv3x3: return "conv3x3";
        case OperationKind::Conv1x1: return "conv1x1";
        case OperationKind::MaxPool3x3: return "maxpool3x3";
        case OperationKind::Output: return "output";
    }
    return "unknown";
}

OperationKind parse_operation(std::string_view name)
{
    for (auto kind : {OperationKind::Input,
                      OperationKind::Conv3x3,
                      OperationKind::Conv1x1,
                      OperationKind::MaxPool3x3,
                      OperationKind::Output})
    {
        if (to_string(kind) == name) return kind;
    }
    throw Error("unknown operation '" + std::string(name) + "'");
}

CellGraph::CellGraph(std::vector<OperationKind> ops, const std::vector<std::vector<int>> &adjacency) :
    ops_(std::move(ops))
{
    const std::size_t n = ops_.size();
    if (adjacency.size() != n) throw Error("adjacency must have one row per vertex");
    adj_.assign(n * n, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        if (adjacency[i].size() != n) throw Error("adjacency row " + std::to_string(i) + " has wrong length");
        for (std::size_t j = 0; j < n; ++j)
        {
            const int v = adjacency[i][j];
            if (v != 0 && v != 1)
                throw Error(
                    "adjacency entry (" + std::to_string(i) + "," + std::to_string(j) + ") must be 0 or 1");
            adj_[i * n + j] = static_cast<std::uint8_t>(v);
        }
    }
}

CellGraph CellGraph::from_bits(std::vector<OperationKind> ops, std::uint64_t adjacency_bits)
{
    const std::size_t n = ops.size();
    if (n > 8) throw Error("bit adjacency supports at most 8 vertices");
    CellGraph cell;
    cell.ops_ = std::move(ops);
    cell.adj_.assign(n * n, 0);
    for (std::size_t b = 0; b < n * n; ++b) cell.adj_[b] = static_cast<std::uint8_t>((adjacency_bits >> b) & 1U);
    return cell;
}

int CellGraph::num_edges() const { return static_cast<int>(std::count(adj_.begin(), adj_.end(), 1)); }

std::uint64_t CellGraph::adjacency_bits() const
{
    if (num_vertices() > 8) throw Error("bit adjacency supports at most 8 vertices");
    std::uint64_t bits = 0;
    for (std::size_t b = 0; b < adj_.size(); ++b)
        if (adj_[b]) bits |= std::uint64_t{1} << b;
    return bits;
}

std::vector<std::vector<int>> CellGraph::adjacency_matrix() const
{
    const int n = num_vertices();
    std::vector<std::vector<int>> m(static_cast<std::size_t>(n), std::vector<int>(static_cast<std::size_t>(n), 0));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m[i][j] = edge(i, j) ? 1 : 0;
    return m;
}

CellGraph CellGraph::with_op(int vertex, OperationKind kind) const
{
    CellGraph copy = *this;
    copy.ops_.at(static_cast<std::size_t>(vertex)) = kind;
    return copy;
}

std::string_view to_string(Violation violation)
{
    switch (violation)
    {
        case Violation::TooFewVertices: return "too few vertices";
        case Violation::TooManyVertices: return "too many vertices";
        case Violation::TooManyEdges: return "too many edges";
        case Violation::FirstNotInput: return "first vertex is not input";
        case Violation::LastNotOutput: return "last vertex is not output";
        case Violation::ExtraTerminal: return "interior input or output vertex";
        case Violation::NotUpperTriangular: return "adjacency not strictly upper triangular";
        case Violation::NoInputOutputPath: return "no input-output path";
        case Violation::DanglingVertex: return "dangling vertex";
    }
    return "unknown";
}

bool ValidationReport::has(Violation v) const
{
    return std::find(violations.begin(), violations.end(), v) != violations.end();
}

namespace
{

// Vertices reachable from `start` following edges forward (or backward).
std::vector<bool> reachable(const CellGraph &cell, int start, bool forward)
{
    const int n = cell.num_vertices();
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = true;
    while (!stack.empty())
    {
        const int v = stack.back();
        stack.pop_back();
        for (int u = 0; u < n; ++u)
        {
            const bool linked = forward ? cell.edge(v, u) : cell.edge(u, v);
            if (linked && !seen[static_cast<std::size_t>(u)])
            {
                seen[static_cast<std::size_t>(u)] = true;
                stack.push_back(u);
            }
        }
    }
    return seen;
}

}  // namespace

ValidationReport validate_cell(const CellGraph &cell, int max_vertices, int max_edges)
{
    ValidationReport report;
    auto fail = [&](Violation v) {
        report.ok = false;
        report.violations.push_back(v);
    };

    const int n = cell.num_vertices();
    if (n < 2) fail(Violation::TooFewVertices);
    if (n > max_vertices) fail(Violation::TooManyVertices);
    if (cell.num_edges() > max_edges) fail(Violation::TooManyEdges);
    if (n == 0) return report;

    if (cell.op(0) != OperationKind::Input) fail(Violation::FirstNotInput);
    if (cell.op(n - 1) != OperationKind::Output) fail(Violation::LastNotOutput);
    for (int v = 1; v + 1 < n; ++v)
    {
        if (cell.op(v) == OperationKind::Input || cell.op(v) == OperationKind::Output)
        {
            fail(Violation::ExtraTerminal);
            break;
        }
    }

    bool upper = true;
    for (int i = 0; i < n && upper; ++i)
        for (int j = 0; j <= i; ++j)
            if (cell.edge(i, j))
            {
                upper = false;
                break;
            }
    if (!upper) fail(Violation::NotUpperTriangular);

    if (n >= 2)
    {
        const auto from_input = reachable(cell, 0, true);
        const auto to_output = reachable(cell, n - 1, false);
        if (!from_input[static_cast<std::size_t>(n - 1)]) fail(Violation::NoInputOutputPath);
        for (int v = 1; v + 1 < n; ++v)
        {
            if (!from_input[static_cast<std::size_t>(v)] || !to_output[static_cast<std::size_t>(v)])
            {
                fail(Violation::DanglingVertex);
                break;
            }
        }
    }
    return report;
}

void require_valid(const CellGraph &cell, int max_edges)
{
    const auto report = validate_cell(cell, kMaxVertices, max_edges);
    if (report.ok) return;
    std::string msg = "invalid cell:";
    for (auto v : report.violations)
    {
        msg += ' ';
        msg += to_string(v);
        msg += ';';
    }
    throw Error(msg);
}

const std::vector<std::vector<int>> &permutations(int k)
{
    static std::once_flag once;
    static std::array<std::vector<std::vector<int>>, 7> table;
    std::call_once(once, [] {
        for (int size = 0; size <= 6; ++size)
        {
            std::vector<int> p(static_cast<std::size_t>(size));
            std::iota(p.begin(), p.end(), 0);
            do
            {
                table[static_cast<std::size_t>(size)].push_back(p);
            } while (std::next_permutation(p.begin(), p.end()));
        }
    });
    if (k < 0 || k > 6) throw Error("permutation table supports 0..6 elements");
    return table[static_cast<std::size_t>(k)];
}

CanonicalForm canonical_form(const CellGraph &cell)
{
    require_valid(cell);
    const int n = cell.num_vertices();
    const int interior = n - 2;

    std::array<std::uint32_t, 8> label{};
    for (int v = 0; v < n; ++v) label[static_cast<std::size_t>(v)] = static_cast<std::uint32_t>(cell.op(v));

    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (cell.edge(i, j)) edges.emplace_back(i, j);

    CanonicalForm best;
    bool have_best = false;
    std::array<int, 8> position{};
    for (const auto &perm : permutations(interior))
    {
        position[0] = 0;
        position[static_cast<std::size_t>(n - 1)] = n - 1;
        for (int v = 1; v <= interior; ++v) position[static_cast<std::size_t>(v)] = 1 + perm[v - 1];

        std::array<std::uint32_t, 8> relabeled{};
        for (int v = 0; v < n; ++v) relabeled[static_cast<std::size_t>(position[v])] = label[static_cast<std::size_t>(v)];
        std::uint32_t labels = 0;
        for (int v = 0; v < n; ++v) labels = (labels << 3) | relabeled[static_cast<std::size_t>(v)];
        if (have_best && labels > best.labels) continue;

        std::uint64_t adjacency = 0;
        for (auto [from, to] : edges)
            adjacency |= std::uint64_t{1} << (position[from] * n + position[to]);

        CanonicalForm candidate{n, labels, adjacency};
        if (!have_best || candidate < best)
        {
            best = candidate;
            have_best = true;
        }
    }
    return best;
}

std::string hash_of(const CanonicalForm &form)
{
    const std::uint64_t header = (static_cast<std::uint64_t>(form.num_vertices) << 32) | form.labels;
    const std::uint64_t hi = mix64(header);
    const std::uint64_t lo = mix64(form.adjacency);
    char buf[33];
    std::snprintf(buf,
                  sizeof(buf),
                  "%016llx%016llx",
                  static_cast<unsigned long long>(hi),
                  static_cast<unsigned long long>(lo));
    return std::string(buf, 32);
}

std::string canonical_hash(const CellGraph &cell) { return hash_of(canonical_form(cell)); }

int cell_depth(const CellGraph &cell)
{
    require_valid(cell, kMaxVertices * (kMaxVertices - 1) / 2);
    const int n = cell.num_vertices();
    std::vector<int> longest(static_cast<std::size_t>(n), -1);
    longest[0] = 0;
    for (int j = 1; j < n; ++j)
        for (int i = 0; i < j; ++i)
            if (cell.edge(i, j) && longest[static_cast<std::size_t>(i)] >= 0)
                longest[static_cast<std::size_t>(j)] =
                    std::max(longest[static_cast<std::size_t>(j)], longest[static_cast<std::size_t>(i)] + 1);
    return longest[static_cast<std::size_t>(n - 1)];
}

int cell_width(const CellGraph &cell)
{
    require_valid(cell, kMaxVertices * (kMaxVertices - 1) / 2);
    const int n = cell.num_vertices();
    const int interior = n - 2;

    std::vector<std::uint32_t> preds(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (cell.edge(i, j)) preds[static_cast<std::size_t>(j)] |= 1U << i;

    int best = 0;
    for (std::uint32_t subset = 0; subset < (1U << interior); ++subset)
    {
        const std::uint32_t members = 1U | (subset << 1);
        bool closed = true;
        for (int v = 1; v <= interior && closed; ++v)
            if ((members >> v) & 1U) closed = (preds[static_cast<std::size_t>(v)] & ~members) == 0;
        if (!closed) continue;

        int crossing = 0;
        for (int i = 0; i < n; ++i)
        {
            if (!((members >> i) & 1U)) continue;
            for (int j = 0; j < n; ++j)
                if (!((members >> j) & 1U) && cell.edge(i, j)) ++crossing;
        }
        best = std::max(best, crossing);
    }
    return best;
}

int OpCounts::operator[](OperationKind kind) const
{
    switch (kind)
    {
        case OperationKind::Conv3x3: return conv3x3;
        case OperationKind::Conv1x1: return conv1x1;
        case OperationKind::MaxPool3x3: return maxpool3x3;
        default: return 0;
    }
}

OpCounts count_op_kinds(const CellGraph &cell)
{
    require_valid(cell);
    OpCounts counts;
    for (int v = 1; v + 1 < cell.num_vertices(); ++v)
    {
        switch (cell.op(v))
        {
            case OperationKind::Conv3x3: ++counts.conv3x3; break;
            case OperationKind::Conv1x1: ++counts.conv1x1; break;
            case OperationKind::MaxPool3x3: ++counts.maxpool3x3; break;
            default: break;
        }
    }
    return counts;
}

}  // namespace edgeperf::nas
