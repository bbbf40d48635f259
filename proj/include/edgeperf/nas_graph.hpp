// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace edgeperf::nas
{

enum class OperationKind : std::uint8_t
{
    Input,
    Conv3x3,
    Conv1x1,
    MaxPool3x3,
    Output,
};

// Operations allowed on interior vertices, in enumeration order.
inline constexpr std::array<OperationKind, 3> kInteriorOps = {
    OperationKind::Conv3x3, OperationKind::Conv1x1, OperationKind::MaxPool3x3};

inline constexpr int kMaxVertices = 7;
inline constexpr int kMaxEdges = 9;

// "input", "conv3x3", "conv1x1", "maxpool3x3", "output"
std::string_view to_string(OperationKind kind);
OperationKind parse_operation(std::string_view name);

// Labeled DAG of a cell. Vertex ids index `ops`; adjacency is stored as a dense
// n x n matrix so that arbitrary (possibly invalid) candidates can be
// represented and reported on by validate_cell().
class CellGraph
{
   public:
    CellGraph() = default;

    // Throws Error when the matrix is not n x n or holds values other than 0/1.
    CellGraph(std::vector<OperationKind> ops, const std::vector<std::vector<int>> &adjacency);

    // Row-major bit layout: bit (from * n + to). Requires n <= 8.
    static CellGraph from_bits(std::vector<OperationKind> ops, std::uint64_t adjacency_bits);

    int num_vertices() const { return static_cast<int>(ops_.size()); }
    int num_edges() const;
    bool edge(int from, int to) const { return adj_[static_cast<std::size_t>(from * num_vertices() + to)] != 0; }
    OperationKind op(int vertex) const { return ops_[static_cast<std::size_t>(vertex)]; }
    std::span<const OperationKind> ops() const { return ops_; }

    std::uint64_t adjacency_bits() const;
    std::vector<std::vector<int>> adjacency_matrix() const;

    // Copy with a single vertex relabeled.
    CellGraph with_op(int vertex, OperationKind kind) const;

    bool operator==(const CellGraph &) const = default;

   private:
    std::vector<OperationKind> ops_;
    std::vector<std::uint8_t> adj_;
};

enum class Violation
{
    TooFewVertices,
    TooManyVertices,
    TooManyEdges,
    FirstNotInput,
    LastNotOutput,
    ExtraTerminal,
    NotUpperTriangular,
    NoInputOutputPath,
    DanglingVertex,
};

std::string_view to_string(Violation violation);

struct ValidationReport
{
    bool ok = true;
    std::vector<Violation> violations;

    bool has(Violation v) const;
};

ValidationReport validate_cell(const CellGraph &cell, int max_vertices = kMaxVertices, int max_edges = kMaxEdges);

// Throws Error carrying the violation list when the cell is invalid.
void require_valid(const CellGraph &cell, int max_edges = kMaxEdges);

// Lexicographically smallest (labels, adjacency) encoding over all
// permutations of the interior vertices. Input stays at 0, Output at n-1.
struct CanonicalForm
{
    int num_vertices = 0;
    std::uint32_t labels = 0;     // 3 bits per vertex, vertex 0 most significant
    std::uint64_t adjacency = 0;  // bit (from * n + to) in canonical order

    auto operator<=>(const CanonicalForm &) const = default;
};

CanonicalForm canonical_form(const CellGraph &cell);

// 32 hex characters. Injective on canonical forms, so two valid cells share a
// hash exactly when they are isomorphic as labeled graphs.
std::string canonical_hash(const CellGraph &cell);
std::string hash_of(const CanonicalForm &form);

// Structural metrics; the edge limit is not enforced.

// Edges on the longest Input -> Output path.
int cell_depth(const CellGraph &cell);

// Maximum number of edges leaving a downward-closed vertex set that contains
// Input but not Output.
int cell_width(const CellGraph &cell);

struct OpCounts
{
    int conv3x3 = 0;
    int conv1x1 = 0;
    int maxpool3x3 = 0;

    int operator[](OperationKind kind) const;
    int total() const { return conv3x3 + conv1x1 + maxpool3x3; }
};

OpCounts count_op_kinds(const CellGraph &cell);

// Permutations of {0..k-1} in lexicographic order; cached for k <= 6.
const std::vector<std::vector<int>> &permutations(int k);

}  // namespace edgeperf::nas
