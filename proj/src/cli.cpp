// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <unordered_map>

#include "CLI11.hpp"
#include "json.hpp"

#include "edgeperf/accel_config.hpp"
#include "edgeperf/analysis.hpp"
#include "edgeperf/cost_model.hpp"
#include "edgeperf/dataset_io.hpp"
#include "edgeperf/enumerate.hpp"
#include "edgeperf/error.hpp"
#include "edgeperf/parallel.hpp"
#include "edgeperf/trainer.hpp"

namespace edgeperf::cli
{

namespace
{

namespace fs = std::filesystem;
using nlohmann::ordered_json;

struct Options
{
    std::vector<std::string> accel;
    std::vector<std::string> accel_files;
    std::string mode = "steady";
    std::size_t sample = 0;
    std::uint64_t seed = 0;
    int threads = 1;
    int epochs = 50;
    std::string metric = "latency";
    std::string out;
    std::string cells;
    std::string results;
    std::string model;
    int max_vertices = nas::kMaxVertices;
    int max_edges = nas::kMaxEdges;
};

constexpr std::size_t kChunk = 4096;

void write_meta(const fs::path &out, const std::string &command, const Options &o, ordered_json extra = {})
{
    ordered_json meta;
    meta["command"] = command;
    meta["seed"] = o.seed;
    if (!extra.is_null())
        for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
    fs::path path = out;
    path += ".meta.json";
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path.string());
    f << meta.dump(2) << '\n';
}

std::vector<accel::AcceleratorConfig> accelerators(const Options &o)
{
    std::vector<accel::AcceleratorConfig> out;
    for (const auto &name : o.accel) out.push_back(accel::preset(name));
    for (const auto &file : o.accel_files) out.push_back(accel::load_config(file));
    if (out.empty())
        for (const auto &name : accel::preset_names()) out.push_back(accel::preset(name));
    std::map<std::string, int> seen;
    for (const auto &cfg : out)
        if (seen[cfg.name]++) throw Error("accelerator '" + cfg.name + "' selected twice");
    return out;
}

bool metric_is_energy(const std::string &metric)
{
    if (metric == "latency") return false;
    if (metric == "energy") return true;
    throw Error("unknown metric '" + metric + "' (expected latency or energy)");
}

double metric_value(const analysis::ResultRow &row, bool energy) { return energy ? row.energy_mj : row.latency_ms; }

std::string require_path(const std::string &value, const char *flag)
{
    if (value.empty()) throw Error(std::string("missing required flag ") + flag);
    return value;
}

// --- subcommands ----------------------------------------------------------

int cmd_generate(const Options &o, std::ostream &out)
{
    const fs::path path = require_path(o.out, "--out");
    const nas::EnumerationLimits limits{o.max_vertices, o.max_edges};
    io::CellWriter writer(path);
    if (o.sample > 0)
    {
        for (const auto &cell : nas::sample_cells(o.sample, o.seed, limits)) writer.write(cell);
    }
    else
    {
        nas::for_each_cell(limits, [&](const nas::CellGraph &cell) { writer.write(cell); });
    }
    writer.close();
    write_meta(path,
               "generate",
               o,
               {{"cells", writer.count()},
                {"sample", o.sample},
                {"max_vertices", o.max_vertices},
                {"max_edges", o.max_edges}});
    out << "wrote " << writer.count() << " cells to " << path.string() << '\n';
    return 0;
}

int cmd_estimate(const Options &o, std::ostream &out)
{
    const fs::path path = require_path(o.out, "--out");
    const auto configs = accelerators(o);
    const auto mode = cost::parse_mode(o.mode);
    const int threads = resolve_threads(o.threads);

    io::CellReader reader(require_path(o.cells, "--cells"));
    // The accuracy column is written when the first chunk carries accuracies.
    std::optional<io::ResultWriter> writer;
    std::vector<io::CellRecord> chunk;
    std::vector<analysis::ResultRow> rows;
    std::size_t cells = 0;
    bool more = true;
    while (more)
    {
        chunk.clear();
        io::CellRecord record;
        while (chunk.size() < kChunk && (more = reader.next(record))) chunk.push_back(std::move(record));
        rows.assign(chunk.size() * configs.size(), {});
        parallel_for(chunk.size(), threads, [&](std::size_t i) {
            const auto net = nas::expand_network(chunk[i].cell);
            for (std::size_t a = 0; a < configs.size(); ++a)
            {
                auto &row = rows[i * configs.size() + a];
                row = analysis::make_row(chunk[i].cell, net, configs[a], cost::estimate(net, configs[a], mode));
                row.mean_validation_accuracy = chunk[i].metadata.mean_validation_accuracy;
            }
        });
        if (!writer)
        {
            const bool with_accuracy = std::any_of(chunk.begin(), chunk.end(), [](const io::CellRecord &r) {
                return r.metadata.mean_validation_accuracy.has_value();
            });
            writer.emplace(path, with_accuracy);
        }
        for (const auto &row : rows) writer->write(row);
        cells += chunk.size();
    }
    if (!writer) writer.emplace(path, false);
    writer->close();

    ordered_json names = ordered_json::array();
    for (const auto &cfg : configs) names.push_back(cfg.name);
    write_meta(path, "estimate", o, {{"cells", cells}, {"accelerators", names}, {"mode", cost::to_string(mode)}});
    out << "wrote " << cells * configs.size() << " rows for " << cells << " cells to " << path.string() << '\n';
    return 0;
}

// Joins result rows of one accelerator with the cell file, in cell-file order.
std::vector<gnn::Sample> join_samples(const Options &o, const std::string &accel_name, bool energy)
{
    std::unordered_map<std::string, double> targets;
    io::ResultReader results(require_path(o.results, "--results"));
    analysis::ResultRow row;
    while (results.next(row))
        if (row.accel == accel_name) targets.emplace(row.cell_hash, metric_value(row, energy));
    if (targets.empty()) throw Error("no result rows for accelerator '" + accel_name + "'");

    std::vector<gnn::Sample> samples;
    io::CellReader cells(require_path(o.cells, "--cells"));
    io::CellRecord record;
    while (cells.next(record))
        if (auto it = targets.find(record.hash); it != targets.end()) samples.push_back({record.cell, it->second});
    if (samples.empty()) throw Error("no cell in " + o.cells + " has a result row");
    return samples;
}

std::string single_accel(const Options &o, const std::string &fallback)
{
    if (o.accel.size() > 1) throw Error("this command takes a single --accel");
    if (!o.accel.empty()) return o.accel.front();
    if (!o.accel_files.empty()) return accel::load_config(o.accel_files.front()).name;
    if (!fallback.empty()) return fallback;
    throw Error("missing required flag --accel");
}

std::string infer_accel(const Options &o)
{
    if (!o.accel.empty() || !o.accel_files.empty()) return single_accel(o, "");
    io::ResultReader reader(require_path(o.results, "--results"));
    analysis::ResultRow row;
    std::string name;
    while (reader.next(row))
    {
        if (name.empty()) name = row.accel;
        if (row.accel != name) throw Error("results hold several accelerators; choose one with --accel");
    }
    if (name.empty()) throw Error("results file has no rows");
    return name;
}

int cmd_train(const Options &o, std::ostream &out, std::ostream &err)
{
    const fs::path path = require_path(o.out, "--out");
    const bool energy = metric_is_energy(o.metric);
    const std::string accel_name = infer_accel(o);
    const auto samples = join_samples(o, accel_name, energy);

    gnn::TrainConfig cfg;
    cfg.seed = o.seed;
    cfg.epochs = o.epochs;
    const auto start = std::chrono::steady_clock::now();
    auto result = gnn::train(samples, cfg, [&](const gnn::EpochReport &e) {
        err << "epoch " << e.epoch << "  train loss " << e.train_loss << "  validation loss " << e.validation_loss
            << '\n';
    });
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    gnn::Checkpoint ckpt;
    ckpt.model = result.model;
    ckpt.config = result.config;
    ckpt.metadata = {{"accelerator", accel_name},
                     {"metric", o.metric},
                     {"unit", energy ? "mJ" : "ms"},
                     {"best_epoch", result.best_epoch},
                     {"split", {result.split.train, result.split.validation, result.split.test}},
                     {"test_metrics", gnn::to_json(result.test)}};
    gnn::save_checkpoint(path, ckpt);

    ordered_json metrics = gnn::to_json(result.test);
    write_meta(path,
               "train",
               o,
               {{"accelerator", accel_name},
                {"metric", o.metric},
                {"samples", samples.size()},
                {"epochs", o.epochs},
                {"best_epoch", result.best_epoch},
                {"best_validation_loss", result.best_validation_loss},
                {"test_metrics", metrics}});
    ordered_json report = {{"accelerator", accel_name},
                           {"metric", o.metric},
                           {"samples", samples.size()},
                           {"best_epoch", result.best_epoch},
                           {"seconds", seconds},
                           {"test", metrics}};
    out << report.dump(2) << '\n';
    return 0;
}

int cmd_predict(const Options &o, std::ostream &out)
{
    const fs::path path = require_path(o.out, "--out");
    const auto ckpt = gnn::load_checkpoint(require_path(o.model, "--model"));
    const auto records = io::read_cells(require_path(o.cells, "--cells"));
    std::vector<double> predictions(records.size());
    parallel_for(records.size(), resolve_threads(o.threads), [&](std::size_t i) {
        predictions[i] = gnn::predict(ckpt.model, records[i].cell);
    });

    const std::string unit = ckpt.metadata.value("unit", "");
    const std::string metric = ckpt.metadata.value("metric", "value");
    io::LineWriter writer(path);
    writer.write("cell_hash,predicted_" + metric + (unit.empty() ? "" : "_" + unit));
    for (std::size_t i = 0; i < records.size(); ++i)
        writer.write(records[i].hash + "," + io::format_double(predictions[i]));
    writer.close();
    write_meta(path, "predict", o, {{"cells", records.size()}, {"model", o.model}});
    out << "wrote " << records.size() << " predictions to " << path.string() << '\n';
    return 0;
}

int cmd_evaluate(const Options &o, std::ostream &out)
{
    const auto ckpt = gnn::load_checkpoint(require_path(o.model, "--model"));
    const std::string metric = ckpt.metadata.value("metric", o.metric);
    const std::string accel_name = single_accel(o, ckpt.metadata.value("accelerator", ""));
    const auto samples = join_samples(o, accel_name, metric_is_energy(metric));
    const auto metrics = gnn::evaluate(ckpt.model, samples);

    ordered_json report = {{"accelerator", accel_name}, {"metric", metric}, {"metrics", gnn::to_json(metrics)}};
    if (!o.out.empty())
    {
        std::ofstream f(o.out);
        if (!f) throw Error("cannot write " + o.out);
        f << report.dump(2) << '\n';
        write_meta(o.out, "evaluate", o, {{"model", o.model}});
    }
    out << report.dump(2) << '\n';
    return 0;
}

int cmd_analyze(const Options &o, std::ostream &out)
{
    const auto rows = io::read_results(require_path(o.results, "--results"));
    const auto buckets = analysis::best_config_buckets(rows);
    const auto trends = analysis::trend_report(rows);
    analysis::write_summary(out, buckets, trends);

    if (!o.out.empty())
    {
        const fs::path dir = o.out;
        fs::create_directories(dir);
        auto open = [&](const char *name) {
            std::ofstream f(dir / name);
            if (!f) throw Error("cannot write " + (dir / name).string());
            return f;
        };
        auto buckets_csv = open("buckets.csv");
        analysis::write_bucket_csv(buckets_csv, buckets);
        auto trends_csv = open("trends.csv");
        analysis::write_trend_csv(trends_csv, trends);
        auto long_csv = open("long.csv");
        analysis::write_long_format(long_csv, rows);
        auto summary = open("summary.txt");
        analysis::write_summary(summary, buckets, trends);
        write_meta(dir, "analyze", o, {{"rows", rows.size()}, {"cells", buckets.cells}});
    }
    return 0;
}

int cmd_swap(const Options &o, std::ostream &out)
{
    std::vector<nas::CellGraph> cells;
    for (auto &r : io::read_cells(require_path(o.cells, "--cells"))) cells.push_back(std::move(r.cell));
    const auto rows = io::read_results(require_path(o.results, "--results"));

    std::vector<std::string> names = o.accel;
    for (const auto &file : o.accel_files) names.push_back(accel::load_config(file).name);
    if (names.empty())
    {
        std::map<std::string, int> seen;
        for (const auto &r : rows) seen[r.accel];
        for (const auto &[name, _] : seen) names.push_back(name);
    }

    std::vector<analysis::SwapImpactMatrix> matrices;
    for (const auto &name : names) matrices.push_back(analysis::swap_impact(cells, rows, name));
    analysis::write_swap_summary(out, matrices);
    if (!o.out.empty())
    {
        std::ofstream f(o.out);
        if (!f) throw Error("cannot write " + o.out);
        analysis::write_swap_csv(f, matrices);
        write_meta(o.out, "swap", o, {{"cells", cells.size()}});
    }
    return 0;
}

}  // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Cell enumeration, accelerator cost estimation and learned performance models"};
    app.require_subcommand(1);
    Options o;

    auto add_accel = [&](CLI::App *sub) {
        sub->add_option("--accel", o.accel, "Accelerator preset(s): V1, V2, V3");
        sub->add_option("--accel-file", o.accel_files, "Accelerator config JSON file(s)")->check(CLI::ExistingFile);
    };
    auto add_seed = [&](CLI::App *sub) { sub->add_option("--seed", o.seed, "Random seed (default 0)"); };
    auto add_threads = [&](CLI::App *sub) {
        sub->add_option("--threads", o.threads, "Worker threads; 0 uses every core (default 1)")
            ->check(CLI::NonNegativeNumber);
    };
    auto add_cells = [&](CLI::App *sub, bool required) {
        auto *opt = sub->add_option("--cells", o.cells, "Cell file (NDJSON, optionally .gz)")->check(CLI::ExistingFile);
        if (required) opt->required();
    };
    auto add_results = [&](CLI::App *sub) {
        sub->add_option("--results", o.results, "Results CSV (optionally .gz)")->required()->check(CLI::ExistingFile);
    };
    auto add_model = [&](CLI::App *sub) {
        sub->add_option("--model", o.model, "Model checkpoint")->required()->check(CLI::ExistingFile);
    };

    auto *generate = app.add_subcommand("generate", "Enumerate or sample unique cells into a cell file");
    generate->add_option("--sample", o.sample, "Uniform sample size; 0 writes the whole space (default 0)");
    add_seed(generate);
    generate->add_option("--max-vertices", o.max_vertices, "Vertex limit (default 7)")->check(CLI::Range(2, 7));
    generate->add_option("--max-edges", o.max_edges, "Edge limit (default 9)")->check(CLI::Range(1, 9));
    generate->add_option("--out", o.out, "Output cell file")->required();

    auto *estimate = app.add_subcommand("estimate", "Estimate latency and energy of every cell");
    add_cells(estimate, true);
    add_accel(estimate);
    estimate->add_option("--mode", o.mode, "steady or cold (default steady)")
        ->check(CLI::IsMember({"steady", "steady_state", "cold"}));
    add_threads(estimate);
    add_seed(estimate);
    estimate->add_option("--out", o.out, "Output results CSV")->required();

    auto *train = app.add_subcommand("train", "Train a graph network on estimated results");
    add_cells(train, true);
    add_results(train);
    add_accel(train);
    train->add_option("--metric", o.metric, "latency or energy (default latency)")
        ->check(CLI::IsMember({"latency", "energy"}));
    train->add_option("--epochs", o.epochs, "Training epochs (default 50)")->check(CLI::NonNegativeNumber);
    add_seed(train);
    train->add_option("--out", o.out, "Output checkpoint")->required();

    auto *predict = app.add_subcommand("predict", "Predict a metric for every cell with a trained model");
    add_model(predict);
    add_cells(predict, true);
    add_threads(predict);
    add_seed(predict);
    predict->add_option("--out", o.out, "Output predictions CSV")->required();

    auto *evaluate = app.add_subcommand("evaluate", "Score a trained model against results");
    add_model(evaluate);
    add_cells(evaluate, true);
    add_results(evaluate);
    add_accel(evaluate);
    add_seed(evaluate);
    evaluate->add_option("--out", o.out, "Optional metrics JSON");

    auto *analyze = app.add_subcommand("analyze", "Best-configuration buckets and structural trends");
    add_results(analyze);
    add_seed(analyze);
    analyze->add_option("--out", o.out, "Optional report directory");

    auto *swap = app.add_subcommand("swap", "Mean latency change from single-operation swaps");
    add_cells(swap, true);
    add_results(swap);
    add_accel(swap);
    add_seed(swap);
    swap->add_option("--out", o.out, "Optional swap matrix CSV");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        return app.exit(e, out, err);
    }

    try
    {
        if (*generate) return cmd_generate(o, out);
        if (*estimate) return cmd_estimate(o, out);
        if (*train) return cmd_train(o, out, err);
        if (*predict) return cmd_predict(o, out);
        if (*evaluate) return cmd_evaluate(o, out);
        if (*analyze) return cmd_analyze(o, out);
        if (*swap) return cmd_swap(o, out);
    }
    catch (const Error &e)
    {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    catch (const std::exception &e)
    {
        err << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}

int run(int argc, const char *const *argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace edgeperf::cli
