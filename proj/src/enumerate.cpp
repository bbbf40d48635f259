// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/enumerate.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <unordered_set>

#include "edgeperf/error.hpp"

namespace edgeperf::nas
{

namespace
{

struct Structure
{
    std::uint64_t bits = 0;
    std::vector<const std::vector<int> *> automorphisms;
};

// Every vertex lies on an Input -> Output path.
bool fully_connected(std::uint64_t bits, int n)
{
    std::uint32_t forward = 1U;
    for (int v = 0; v < n; ++v)
        if ((forward >> v) & 1U)
            for (int u = v + 1; u < n; ++u)
                if ((bits >> (v * n + u)) & 1U) forward |= 1U << u;

    std::uint32_t backward = 1U << (n - 1);
    for (int v = n - 1; v >= 0; --v)
        if ((backward >> v) & 1U)
            for (int u = 0; u < v; ++u)
                if ((bits >> (u * n + v)) & 1U) backward |= 1U << u;

    const std::uint32_t all = (1U << n) - 1U;
    return (forward & backward) == all;
}

// Unique unlabeled structures for n vertices, each with its automorphism
// group restricted to interior permutations.
std::vector<Structure> structures(int n, int max_edges)
{
    const int interior = n - 2;
    const auto &perms = permutations(interior);

    std::vector<std::pair<int, int>> slots;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) slots.emplace_back(i, j);
    const int m = static_cast<int>(slots.size());

    // remap[p][s]: full-matrix bit of upper-triangle slot s under permutation p
    std::vector<std::vector<int>> remap(perms.size(), std::vector<int>(static_cast<std::size_t>(m)));
    for (std::size_t p = 0; p < perms.size(); ++p)
    {
        auto position = [&](int v) { return (v == 0 || v == n - 1) ? v : 1 + perms[p][static_cast<std::size_t>(v - 1)]; };
        for (int s = 0; s < m; ++s)
            remap[p][static_cast<std::size_t>(s)] = position(slots[static_cast<std::size_t>(s)].first) * n +
                                                    position(slots[static_cast<std::size_t>(s)].second);
    }

    auto permuted = [&](std::uint32_t mask, std::size_t p) {
        std::uint64_t out = 0;
        while (mask)
        {
            const int s = std::countr_zero(mask);
            mask &= mask - 1;
            out |= std::uint64_t{1} << remap[p][static_cast<std::size_t>(s)];
        }
        return out;
    };

    std::unordered_set<std::uint64_t> seen;
    std::vector<Structure> result;
    for (std::uint32_t mask = 0; mask < (1U << m); ++mask)
    {
        if (std::popcount(mask) > max_edges) continue;
        const std::uint64_t bits = permuted(mask, 0);
        if (!fully_connected(bits, n)) continue;

        std::uint64_t key = bits;
        for (std::size_t p = 1; p < perms.size(); ++p) key = std::min(key, permuted(mask, p));
        if (!seen.insert(key).second) continue;

        Structure structure{bits, {}};
        for (std::size_t p = 1; p < perms.size(); ++p)
            if (permuted(mask, p) == bits) structure.automorphisms.push_back(&perms[p]);
        result.push_back(std::move(structure));
    }
    return result;
}

bool minimal_in_orbit(const std::array<int, 8> &labels, int interior, const Structure &structure)
{
    std::array<int, 8> image{};
    for (const auto *perm : structure.automorphisms)
    {
        for (int v = 0; v < interior; ++v) image[static_cast<std::size_t>((*perm)[static_cast<std::size_t>(v)])] = labels[static_cast<std::size_t>(v)];
        for (int v = 0; v < interior; ++v)
        {
            if (image[static_cast<std::size_t>(v)] < labels[static_cast<std::size_t>(v)]) return false;
            if (image[static_cast<std::size_t>(v)] > labels[static_cast<std::size_t>(v)]) break;
        }
    }
    return true;
}

}  // namespace

void for_each_cell(const EnumerationLimits &limits, const std::function<void(const CellGraph &)> &sink)
{
    if (limits.max_vertices > kMaxVertices || limits.max_edges > kMaxEdges)
        throw Error("enumeration limits exceed (7 vertices, 9 edges)");

    for (int n = 2; n <= limits.max_vertices; ++n)
    {
        const int interior = n - 2;
        int combos = 1;
        for (int i = 0; i < interior; ++i) combos *= static_cast<int>(kInteriorOps.size());

        for (const auto &structure : structures(n, limits.max_edges))
        {
            std::array<int, 8> labels{};
            for (int code = 0; code < combos; ++code)
            {
                int rest = code;
                for (int v = interior - 1; v >= 0; --v)
                {
                    labels[static_cast<std::size_t>(v)] = rest % 3;
                    rest /= 3;
                }
                if (!minimal_in_orbit(labels, interior, structure)) continue;

                std::vector<OperationKind> ops(static_cast<std::size_t>(n));
                ops.front() = OperationKind::Input;
                ops.back() = OperationKind::Output;
                for (int v = 0; v < interior; ++v)
                    ops[static_cast<std::size_t>(v + 1)] = kInteriorOps[static_cast<std::size_t>(labels[static_cast<std::size_t>(v)])];
                sink(CellGraph::from_bits(std::move(ops), structure.bits));
            }
        }
    }
}

std::vector<CellGraph> enumerate_cells(const EnumerationLimits &limits)
{
    std::vector<CellGraph> cells;
    for_each_cell(limits, [&](const CellGraph &cell) { cells.push_back(cell); });
    return cells;
}

std::size_t count_cells(const EnumerationLimits &limits)
{
    std::size_t count = 0;
    for_each_cell(limits, [&](const CellGraph &) { ++count; });
    return count;
}

std::vector<CellGraph> sample_cells(std::size_t count, std::uint64_t seed, const EnumerationLimits &limits)
{
    const std::size_t total = count_cells(limits);
    if (count >= total) return enumerate_cells(limits);

    std::vector<std::size_t> index(total);
    for (std::size_t i = 0; i < total; ++i) index[i] = i;
    Rng rng(seed);
    for (std::size_t i = 0; i < count; ++i)
    {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
        std::swap(index[i], index[j]);
    }
    index.resize(count);
    std::sort(index.begin(), index.end());

    std::vector<CellGraph> cells;
    cells.reserve(count);
    std::size_t position = 0;
    std::size_t next = 0;
    for_each_cell(limits, [&](const CellGraph &cell) {
        if (next < index.size() && index[next] == position)
        {
            cells.push_back(cell);
            ++next;
        }
        ++position;
    });
    return cells;
}

CellGraph random_cell(Rng &rng, int max_vertices, int max_edges)
{
    if (max_vertices < 2) throw Error("random_cell needs at least 2 vertices");
    for (;;)
    {
        const int n = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_vertices - 1)));
        std::vector<OperationKind> ops(static_cast<std::size_t>(n));
        ops.front() = OperationKind::Input;
        ops.back() = OperationKind::Output;
        for (int v = 1; v + 1 < n; ++v) ops[static_cast<std::size_t>(v)] = kInteriorOps[rng.below(kInteriorOps.size())];

        std::uint64_t bits = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.below(2)) bits |= std::uint64_t{1} << (i * n + j);
        auto cell = CellGraph::from_bits(std::move(ops), bits);
        if (validate_cell(cell, max_vertices, max_edges).ok) return cell;
    }
}

}  // namespace edgeperf::nas
