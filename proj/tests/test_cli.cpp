// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "edgeperf/cli.hpp"
#include "edgeperf/dataset_io.hpp"
#include "edgeperf/enumerate.hpp"
#include "test_util.hpp"

using namespace edgeperf;
using testutil::TempDir;

namespace
{

struct Outcome
{
    int code = 0;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args)
{
    args.insert(args.begin(), "edgeperf");
    std::vector<const char *> argv;
    for (const auto &a : args) argv.push_back(a.c_str());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path &path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::size_t line_count(const std::filesystem::path &path)
{
    io::LineReader reader(path);
    std::string line;
    std::size_t n = 0;
    while (reader.next(line)) ++n;
    return n;
}

std::string p(const std::filesystem::path &path) { return path.string(); }

}  // namespace

TEST(Cli, GenerateIsDeterministic)
{
    TempDir dir;
    const auto a = dir.path() / "a.jsonl";
    const auto b = dir.path() / "b.jsonl";
    const auto c = dir.path() / "c.jsonl";
    ASSERT_EQ(run({"generate", "--sample", "1000", "--seed", "7", "--out", p(a)}).code, 0);
    ASSERT_EQ(run({"generate", "--sample", "1000", "--seed", "7", "--out", p(b)}).code, 0);
    ASSERT_EQ(run({"generate", "--sample", "1000", "--seed", "8", "--out", p(c)}).code, 0);
    EXPECT_EQ(slurp(a), slurp(b));
    EXPECT_NE(slurp(a), slurp(c));
    EXPECT_EQ(line_count(a), 1000U);

    const auto meta = nlohmann::json::parse(slurp(dir.path() / "a.jsonl.meta.json"));
    EXPECT_EQ(meta["command"], "generate");
    EXPECT_EQ(meta["seed"], 7);
    EXPECT_EQ(meta["cells"], 1000);
}

TEST(Cli, GenerateWithLimits)
{
    TempDir dir;
    const auto out = dir.path() / "small.jsonl.gz";
    const auto r = run({"generate", "--max-vertices", "4", "--out", p(out)});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(line_count(out), 91U);
    EXPECT_NE(r.out.find("91"), std::string::npos);
}

TEST(Cli, EstimateWritesOneRowPerCellAndAccelerator)
{
    TempDir dir;
    const auto cells = dir.path() / "cells.jsonl";
    ASSERT_EQ(run({"generate", "--sample", "200", "--seed", "1", "--out", p(cells)}).code, 0);

    const auto all = dir.path() / "all.csv";
    ASSERT_EQ(run({"estimate", "--cells", p(cells), "--accel", "V1", "V2", "V3", "--out", p(all)}).code, 0);
    const auto rows = io::read_results(all);
    ASSERT_EQ(rows.size(), 600U);
    for (std::size_t i = 0; i < rows.size(); i += 3)
    {
        EXPECT_EQ(rows[i].cell_hash, rows[i + 2].cell_hash);
        EXPECT_EQ(rows[i].accel, "V1");
        EXPECT_EQ(rows[i + 1].accel, "V2");
        EXPECT_EQ(rows[i + 2].accel, "V3");
    }

    const auto defaults = dir.path() / "defaults.csv";
    ASSERT_EQ(run({"estimate", "--cells", p(cells), "--out", p(defaults)}).code, 0);
    EXPECT_EQ(slurp(defaults), slurp(all));

    const auto threaded = dir.path() / "threaded.csv";
    ASSERT_EQ(run({"estimate", "--cells", p(cells), "--threads", "4", "--out", p(threaded)}).code, 0);
    EXPECT_EQ(slurp(threaded), slurp(all));

    const auto cold = dir.path() / "cold.csv";
    ASSERT_EQ(run({"estimate", "--cells", p(cells), "--accel", "V2", "--mode", "cold", "--out", p(cold)}).code, 0);
    const auto cold_rows = io::read_results(cold);
    ASSERT_EQ(cold_rows.size(), 200U);
    for (std::size_t i = 0; i < cold_rows.size(); ++i) EXPECT_GE(cold_rows[i].latency_ms, rows[3 * i + 1].latency_ms);
}

TEST(Cli, EstimateAcceptsConfigFiles)
{
    TempDir dir;
    const auto cells = dir.path() / "cells.jsonl";
    ASSERT_EQ(run({"generate", "--sample", "20", "--out", p(cells)}).code, 0);
    auto cfg = accel::preset("V2");
    cfg.name = "wide";
    cfg.compute_lanes = 256;
    accel::save_config(dir.path() / "wide.json", cfg);
    const auto out = dir.path() / "r.csv";
    const auto r = run({"estimate", "--cells", p(cells), "--accel", "V2", "--accel-file", p(dir.path() / "wide.json"),
                        "--out", p(out)});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto rows = io::read_results(out);
    ASSERT_EQ(rows.size(), 40U);
    EXPECT_EQ(rows[1].accel, "wide");
    EXPECT_LE(rows[1].latency_ms, rows[0].latency_ms);
}

TEST(Cli, AccuracyMetadataFlowsIntoResults)
{
    TempDir dir;
    const auto cells = dir.path() / "cells.jsonl";
    std::vector<io::CellRecord> records;
    for (const auto &cell : nas::sample_cells(5, 2))
    {
        auto r = io::CellRecord::from_cell(cell);
        r.metadata.mean_validation_accuracy = 0.9;
        records.push_back(r);
    }
    io::write_cells(cells, records);
    const auto out = dir.path() / "r.csv";
    ASSERT_EQ(run({"estimate", "--cells", p(cells), "--accel", "V1", "--out", p(out)}).code, 0);
    const auto rows = io::read_results(out);
    ASSERT_EQ(rows.size(), 5U);
    EXPECT_EQ(rows[0].mean_validation_accuracy, 0.9);
}

TEST(Cli, PipelineSmoke)
{
    TempDir dir;
    const auto cells = dir.path() / "cells.jsonl.gz";
    const auto results = dir.path() / "results.csv.gz";
    const auto model = dir.path() / "model.json";
    ASSERT_EQ(run({"generate", "--sample", "1000", "--seed", "3", "--out", p(cells)}).code, 0);
    ASSERT_EQ(run({"estimate", "--cells", p(cells), "--out", p(results)}).code, 0);

    const auto trained =
        run({"train", "--cells", p(cells), "--results", p(results), "--accel", "V2", "--epochs", "3", "--out", p(model)});
    ASSERT_EQ(trained.code, 0) << trained.err;
    const auto report = nlohmann::json::parse(trained.out);
    EXPECT_EQ(report["accelerator"], "V2");
    EXPECT_EQ(report["test"]["count"], 200);
    EXPECT_TRUE(report["test"].contains("spearman"));
    EXPECT_NE(trained.err.find("epoch 3"), std::string::npos);

    const auto evaluated = run({"evaluate", "--model", p(model), "--cells", p(cells), "--results", p(results),
                                "--out", p(dir.path() / "metrics.json")});
    ASSERT_EQ(evaluated.code, 0) << evaluated.err;
    const auto metrics = nlohmann::json::parse(slurp(dir.path() / "metrics.json"));
    EXPECT_EQ(metrics["metrics"]["count"], 1000);
    EXPECT_EQ(metrics["accelerator"], "V2");

    const auto predictions = dir.path() / "pred.csv";
    ASSERT_EQ(run({"predict", "--model", p(model), "--cells", p(cells), "--out", p(predictions)}).code, 0);
    EXPECT_EQ(line_count(predictions), 1001U);
    EXPECT_EQ(slurp(predictions).rfind("cell_hash,predicted_latency_ms\n", 0), 0U);

    const auto analyzed = run({"analyze", "--results", p(results), "--out", p(dir.path() / "report")});
    ASSERT_EQ(analyzed.code, 0) << analyzed.err;
    EXPECT_FALSE(analyzed.out.empty());
    for (const char *f : {"buckets.csv", "trends.csv", "long.csv", "summary.txt"})
        EXPECT_TRUE(std::filesystem::exists(dir.path() / "report" / f)) << f;

    const auto swapped = run({"swap", "--cells", p(cells), "--results", p(results), "--out", p(dir.path() / "swap.csv")});
    ASSERT_EQ(swapped.code, 0) << swapped.err;
    EXPECT_EQ(line_count(dir.path() / "swap.csv"), 1U + 3U * 9U);
}

TEST(Cli, TrainIsDeterministic)
{
    TempDir dir;
    const auto cells = dir.path() / "cells.jsonl";
    const auto results = dir.path() / "results.csv";
    ASSERT_EQ(run({"generate", "--sample", "150", "--seed", "4", "--out", p(cells)}).code, 0);
    ASSERT_EQ(run({"estimate", "--cells", p(cells), "--accel", "V3", "--out", p(results)}).code, 0);
    for (const char *name : {"a.json", "b.json"})
        ASSERT_EQ(run({"train", "--cells", p(cells), "--results", p(results), "--epochs", "2", "--seed", "5", "--out",
                       p(dir.path() / name)})
                      .code,
                  0);
    EXPECT_EQ(slurp(dir.path() / "a.json"), slurp(dir.path() / "b.json"));
}

TEST(Cli, ErrorsExitNonZero)
{
    TempDir dir;
    EXPECT_NE(run({}).code, 0);
    EXPECT_NE(run({"frobnicate"}).code, 0);
    EXPECT_NE(run({"generate"}).code, 0);
    EXPECT_NE(run({"estimate", "--cells", "/nonexistent.jsonl", "--out", p(dir.path() / "x.csv")}).code, 0);

    const auto cells = dir.path() / "cells.jsonl";
    ASSERT_EQ(run({"generate", "--sample", "5", "--out", p(cells)}).code, 0);
    const auto bad_accel = run({"estimate", "--cells", p(cells), "--accel", "V9", "--out", p(dir.path() / "x.csv")});
    EXPECT_EQ(bad_accel.code, 2);
    EXPECT_NE(bad_accel.err.find("V9"), std::string::npos);
    EXPECT_NE(run({"estimate", "--cells", p(cells), "--mode", "lukewarm", "--out", p(dir.path() / "x.csv")}).code, 0);
    EXPECT_NE(run({"generate", "--max-vertices", "9", "--out", p(cells)}).code, 0);

    std::ofstream(dir.path() / "broken.jsonl") << "{\"ops\": 3}\n";
    const auto broken =
        run({"estimate", "--cells", p(dir.path() / "broken.jsonl"), "--accel", "V1", "--out", p(dir.path() / "y.csv")});
    EXPECT_EQ(broken.code, 2);
    EXPECT_NE(broken.err.find("line 1"), std::string::npos) << broken.err;
}

TEST(Cli, HelpListsEveryFlag)
{
    const auto top = run({"--help"});
    EXPECT_EQ(top.code, 0);
    for (const char *sub : {"generate", "estimate", "train", "predict", "evaluate", "analyze", "swap"})
        EXPECT_NE(top.out.find(sub), std::string::npos) << sub;

    const std::vector<std::pair<std::string, std::vector<std::string>>> expected{
        {"generate", {"--sample", "--seed", "--max-vertices", "--max-edges", "--out"}},
        {"estimate", {"--cells", "--accel", "--accel-file", "--mode", "--threads", "--seed", "--out"}},
        {"train", {"--cells", "--results", "--accel", "--metric", "--epochs", "--seed", "--out"}},
        {"predict", {"--model", "--cells", "--threads", "--out"}},
        {"evaluate", {"--model", "--cells", "--results", "--accel", "--out"}},
        {"analyze", {"--results", "--out"}},
        {"swap", {"--cells", "--results", "--accel", "--out"}},
    };
    for (const auto &[sub, flags] : expected)
    {
        const auto help = run({sub, "--help"});
        EXPECT_EQ(help.code, 0);
        for (const auto &flag : flags) EXPECT_NE(help.out.find(flag), std::string::npos) << sub << " " << flag;
    }
}
