// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <map>
#include <set>

#include "edgeperf/enumerate.hpp"
#include "edgeperf/error.hpp"
#include "edgeperf/nas_graph.hpp"
#include "oracles/graph_oracle.hpp"
#include "test_util.hpp"

using namespace edgeperf;
using namespace edgeperf::nas;
using namespace testutil;

namespace
{

CellGraph diamond() { return make({IN, C3, C1, OUT}, {{0, 1}, {0, 2}, {1, 3}, {2, 3}}); }

}  // namespace

TEST(OperationKind, NamesRoundTrip)
{
    for (auto kind : {IN, C3, C1, MP, OUT}) EXPECT_EQ(parse_operation(to_string(kind)), kind);
    EXPECT_EQ(to_string(MP), "maxpool3x3");
    EXPECT_THROW(parse_operation("conv5x5"), Error);
}

TEST(CellGraph, RejectsMalformedMatrices)
{
    EXPECT_THROW(CellGraph({IN, OUT}, {{0, 1}}), Error);
    EXPECT_THROW(CellGraph({IN, OUT}, {{0, 1}, {0}}), Error);
    EXPECT_THROW(CellGraph({IN, OUT}, {{0, 2}, {0, 0}}), Error);
}

TEST(CellGraph, BitsRoundTrip)
{
    const auto cell = diamond();
    EXPECT_EQ(CellGraph::from_bits({cell.ops().begin(), cell.ops().end()}, cell.adjacency_bits()), cell);
    EXPECT_EQ(cell.num_edges(), 4);
    EXPECT_EQ(cell.with_op(1, MP).op(1), MP);
    EXPECT_EQ(cell.op(1), C3);
}

TEST(ValidateCell, MinimalCellIsValid)
{
    const auto report = validate_cell(make({IN, OUT}, {{0, 1}}));
    EXPECT_TRUE(report.ok);
    EXPECT_TRUE(report.violations.empty());
}

TEST(ValidateCell, EightVerticesTooMany)
{
    const auto cell = chain({C3, C3, C3, C3, C3, C3});
    const auto report = validate_cell(cell);
    EXPECT_FALSE(report.ok);
    EXPECT_TRUE(report.has(Violation::TooManyVertices));
    EXPECT_EQ(to_string(Violation::TooManyVertices), "too many vertices");
}

TEST(ValidateCell, DanglingVertex)
{
    // Vertex 3 is fed by Input but reaches nothing.
    const auto cell = make({IN, C3, C1, MP, OUT}, {{0, 1}, {1, 2}, {2, 4}, {0, 3}});
    const auto report = validate_cell(cell);
    EXPECT_FALSE(report.ok);
    EXPECT_TRUE(report.has(Violation::DanglingVertex));
    EXPECT_EQ(to_string(Violation::DanglingVertex), "dangling vertex");
}

TEST(ValidateCell, ReportsEveryBrokenInvariant)
{
    EXPECT_TRUE(validate_cell(make({IN}, {})).has(Violation::TooFewVertices));
    EXPECT_TRUE(validate_cell(make({C3, OUT}, {{0, 1}})).has(Violation::FirstNotInput));
    EXPECT_TRUE(validate_cell(make({IN, C3}, {{0, 1}})).has(Violation::LastNotOutput));
    EXPECT_TRUE(validate_cell(make({IN, OUT, OUT}, {{0, 1}, {1, 2}})).has(Violation::ExtraTerminal));
    EXPECT_TRUE(validate_cell(make({IN, C3, OUT}, {{0, 2}, {2, 1}})).has(Violation::NotUpperTriangular));
    EXPECT_TRUE(validate_cell(make({IN, C3, OUT}, {{0, 1}})).has(Violation::NoInputOutputPath));

    std::vector<std::pair<int, int>> dense;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) dense.emplace_back(i, j);
    EXPECT_TRUE(validate_cell(make({IN, C3, C3, C3, C3, OUT}, dense)).has(Violation::TooManyEdges));
    EXPECT_THROW(require_valid(make({IN, C3, OUT}, {{0, 1}})), Error);
}

TEST(CanonicalHash, InvariantUnderInteriorSwap)
{
    const auto a = make({IN, C3, C1, MP, OUT}, {{0, 1}, {0, 2}, {1, 3}, {2, 4}, {3, 4}});
    // Vertices 1 and 2 trade ids; edges are remapped accordingly.
    const auto b = make({IN, C1, C3, MP, OUT}, {{0, 2}, {0, 1}, {2, 3}, {1, 4}, {3, 4}});
    EXPECT_EQ(canonical_hash(a), canonical_hash(b));
    EXPECT_EQ(canonical_hash(a).size(), 32U);
}

TEST(CanonicalHash, LabelChangeBreaksEquality)
{
    const auto a = chain({C3, C1});
    EXPECT_NE(canonical_hash(a), canonical_hash(a.with_op(1, C1)));
}

TEST(CanonicalHash, RejectsInvalidCell) { EXPECT_THROW(canonical_hash(make({IN, C3, OUT}, {{0, 1}})), Error); }

TEST(CanonicalHash, ExactOnAllSmallCells)
{
    std::vector<CellGraph> cells;
    for (int n = 2; n <= 4; ++n)
        for (const auto &c : all_labeled(n)) cells.push_back(c);
    ASSERT_GT(cells.size(), 90U);
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i; j < cells.size(); ++j)
        {
            const bool same_hash = canonical_hash(cells[i]) == canonical_hash(cells[j]);
            ASSERT_EQ(same_hash, oracle::isomorphic(to_dag(cells[i]), to_dag(cells[j]))) << i << " vs " << j;
        }
}

TEST(CanonicalHash, AgreesWithBruteForceOnRandomCells)
{
    Rng rng(11);
    std::vector<CellGraph> cells;
    for (int i = 0; i < 1000; ++i)
    {
        // Every other cell is a relabeled copy of an earlier one, so both
        // outcomes of the comparison are well represented.
        if (i % 2 == 1)
            cells.push_back(shuffle_interior(cells[rng.below(cells.size())], rng));
        else
            cells.push_back(random_cell(rng, 7, 9));
    }
    std::vector<std::string> hashes;
    for (const auto &c : cells) hashes.push_back(canonical_hash(c));

    auto signature = [](const CellGraph &c) {
        auto counts = count_op_kinds(c);
        return std::tuple(c.num_vertices(), c.num_edges(), counts.conv3x3, counts.conv1x1);
    };
    std::size_t iso_pairs = 0;
    for (std::size_t i = 0; i < cells.size(); ++i)
        for (std::size_t j = i + 1; j < cells.size(); ++j)
        {
            const bool same_hash = hashes[i] == hashes[j];
            // Cheap invariants settle most pairs; the rest go to the full search.
            const bool iso = signature(cells[i]) == signature(cells[j]) &&
                             oracle::isomorphic(to_dag(cells[i]), to_dag(cells[j]));
            ASSERT_EQ(same_hash, iso) << i << " vs " << j;
            iso_pairs += iso;
        }
    EXPECT_GE(iso_pairs, 400U);
}

TEST(CellDepth, Examples)
{
    EXPECT_EQ(cell_depth(make({IN, OUT}, {{0, 1}})), 1);
    EXPECT_EQ(cell_depth(chain({C3, C1, MP, C3, C1})), 6);
    EXPECT_EQ(cell_depth(diamond()), 2);
}

TEST(CellWidth, Examples)
{
    EXPECT_EQ(cell_width(chain({C3, C1, MP})), 1);
    EXPECT_EQ(cell_width(diamond()), 2);
    std::vector<std::pair<int, int>> fan;
    for (int v = 1; v <= 5; ++v)
    {
        fan.emplace_back(0, v);
        fan.emplace_back(v, 6);
    }
    // Ten edges: outside the search space, but the metric is still defined.
    EXPECT_EQ(cell_width(make({IN, C3, C3, C1, C1, MP, OUT}, fan)), 5);
}

TEST(CellDepthWidth, MatchExhaustiveOracleUpToFiveVertices)
{
    std::size_t checked = 0;
    for_each_cell({5, 9}, [&](const CellGraph &cell) {
        const auto dag = to_dag(cell);
        ASSERT_EQ(cell_depth(cell), oracle::longest_path(dag));
        ASSERT_EQ(cell_width(cell), oracle::max_prefix_cut(dag));
        ASSERT_LE(cell_depth(cell), cell.num_vertices() - 1);
        ASSERT_LE(cell_width(cell), cell.num_edges());
        ++checked;
    });
    EXPECT_EQ(checked, 2532U);
}

TEST(CellDepthWidth, BoundsOnRandomCells)
{
    Rng rng(5);
    for (int i = 0; i < 300; ++i)
    {
        const auto cell = random_cell(rng);
        EXPECT_LE(cell_depth(cell), cell.num_vertices() - 1);
        EXPECT_LE(cell_width(cell), cell.num_edges());
        EXPECT_GE(cell_width(cell), 1);
    }
}

TEST(CountOpKinds, Examples)
{
    EXPECT_EQ(count_op_kinds(make({IN, OUT}, {{0, 1}})).total(), 0);

    // Six operation nodes and nine edges.
    const auto cell = make({IN, C3, MP, C1, C3, OUT},
                           {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 4}, {2, 3}, {2, 5}, {3, 5}, {4, 5}});
    const auto counts = count_op_kinds(cell);
    EXPECT_EQ(counts.total(), 4);
    EXPECT_EQ(counts.conv3x3, 2);
    EXPECT_EQ(counts[MP], 1);

    Rng rng(3);
    for (int i = 0; i < 200; ++i)
    {
        const auto c = random_cell(rng);
        EXPECT_EQ(count_op_kinds(c).total(), c.num_vertices() - 2);
    }
}

TEST(Permutations, CountsAndOrder)
{
    EXPECT_EQ(permutations(0).size(), 1U);
    EXPECT_EQ(permutations(5).size(), 120U);
    EXPECT_EQ(permutations(3)[1], (std::vector<int>{0, 2, 1}));
    EXPECT_THROW(permutations(7), Error);
}
