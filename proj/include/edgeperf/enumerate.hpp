// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "edgeperf/nas_graph.hpp"
#include "edgeperf/rng.hpp"

namespace edgeperf::nas
{

struct EnumerationLimits
{
    int max_vertices = kMaxVertices;
    int max_edges = kMaxEdges;
};

// Visits every valid cell within the limits exactly once per isomorphism
// class. Order is fixed: vertex count, then first occurrence of the unlabeled
// structure in adjacency-bitmask order, then op labeling in lexicographic
// order. Emitted cells are always strictly upper triangular.
void for_each_cell(const EnumerationLimits &limits, const std::function<void(const CellGraph &)> &sink);

std::vector<CellGraph> enumerate_cells(const EnumerationLimits &limits = {});

std::size_t count_cells(const EnumerationLimits &limits = {});

// Uniform sample without replacement from the enumerated space, returned in
// enumeration order. Asking for more cells than exist returns all of them.
std::vector<CellGraph> sample_cells(std::size_t count, std::uint64_t seed, const EnumerationLimits &limits = {});

// Random valid cell drawn by rejection (not uniform over isomorphism classes).
CellGraph random_cell(Rng &rng, int max_vertices = kMaxVertices, int max_edges = kMaxEdges);

}  // namespace edgeperf::nas
