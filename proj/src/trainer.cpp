// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>

#include "edgeperf/analysis.hpp"
#include "edgeperf/error.hpp"
#include "edgeperf/rng.hpp"

namespace edgeperf::gnn
{

void TrainConfig::validate() const
{
    if (!(learning_rate > 0.0)) throw Error("learning rate must be positive");
    if (batch_size <= 0) throw Error("batch size must be positive");
    if (epochs < 0) throw Error("epochs must be non-negative");
    if (latent_width <= 0) throw Error("latent width must be positive");
    if (message_passing_steps < 0) throw Error("message passing steps must be non-negative");
    for (double f : {train_fraction, validation_fraction, test_fraction})
        if (f < 0.0 || f > 1.0) throw Error("split fractions must lie in [0, 1]");
    if (std::abs(train_fraction + validation_fraction + test_fraction - 1.0) > 1e-9)
        throw Error("split fractions must sum to 1");
    if (!(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0)) throw Error("Adam betas must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw Error("Adam epsilon must be positive");
}

nlohmann::json to_json(const TrainConfig &cfg)
{
    return {
        {"learning_rate", cfg.learning_rate},
        {"batch_size", cfg.batch_size},
        {"split", {cfg.train_fraction, cfg.validation_fraction, cfg.test_fraction}},
        {"seed", cfg.seed},
        {"epochs", cfg.epochs},
        {"latent_width", cfg.latent_width},
        {"message_passing_steps", cfg.message_passing_steps},
        {"adam", {{"beta1", cfg.beta1}, {"beta2", cfg.beta2}, {"epsilon", cfg.epsilon}}},
        {"target_normalization", {{"mean", cfg.target_mean}, {"std", cfg.target_std}}},
    };
}

TrainConfig train_config_from_json(const nlohmann::json &j)
{
    try
    {
        TrainConfig cfg;
        cfg.learning_rate = j.at("learning_rate").get<double>();
        cfg.batch_size = j.at("batch_size").get<int>();
        const auto &split = j.at("split");
        cfg.train_fraction = split.at(0).get<double>();
        cfg.validation_fraction = split.at(1).get<double>();
        cfg.test_fraction = split.at(2).get<double>();
        cfg.seed = j.at("seed").get<std::uint64_t>();
        cfg.epochs = j.at("epochs").get<int>();
        cfg.latent_width = j.at("latent_width").get<int>();
        cfg.message_passing_steps = j.at("message_passing_steps").get<int>();
        cfg.beta1 = j.at("adam").at("beta1").get<double>();
        cfg.beta2 = j.at("adam").at("beta2").get<double>();
        cfg.epsilon = j.at("adam").at("epsilon").get<double>();
        cfg.target_mean = j.at("target_normalization").at("mean").get<double>();
        cfg.target_std = j.at("target_normalization").at("std").get<double>();
        cfg.validate();
        return cfg;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(std::string("malformed train config: ") + e.what());
    }
}

SplitSizes split_sizes(std::size_t n, const TrainConfig &cfg)
{
    SplitSizes s;
    s.validation = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.validation_fraction));
    s.test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * cfg.test_fraction));
    if (s.validation + s.test > n) s.test = n - s.validation;
    s.train = n - s.validation - s.test;
    return s;
}

nlohmann::json to_json(const EvalMetrics &m)
{
    return {{"count", m.count},
            {"accuracy", m.accuracy},
            {"accuracy_definition", "1 - mean absolute percentage error"},
            {"mape", m.mape},
            {"spearman", m.spearman},
            {"pearson", m.pearson},
            {"rmse", m.rmse}};
}

EvalMetrics compute_metrics(std::span<const double> predictions, std::span<const double> targets)
{
    if (predictions.size() != targets.size()) throw Error("prediction and target counts differ");
    if (predictions.empty()) throw Error("metrics need at least one sample");
    EvalMetrics m;
    m.count = predictions.size();
    double ape = 0.0;
    double se = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i)
    {
        if (targets[i] == 0.0) throw Error("percentage error undefined for a zero target");
        ape += std::abs((predictions[i] - targets[i]) / targets[i]);
        se += (predictions[i] - targets[i]) * (predictions[i] - targets[i]);
    }
    m.mape = ape / static_cast<double>(m.count);
    m.accuracy = 1.0 - m.mape;
    m.rmse = std::sqrt(se / static_cast<double>(m.count));
    if (m.count >= 2)
    {
        // Correlations are undefined for constant vectors; report NaN then.
        try
        {
            m.spearman = analysis::spearman(predictions, targets);
            m.pearson = analysis::pearson(predictions, targets);
        }
        catch (const Error &)
        {
            m.spearman = m.pearson = std::numeric_limits<double>::quiet_NaN();
        }
    }
    return m;
}

EvalMetrics evaluate(const GraphNetModel &model, std::span<const Sample> samples)
{
    std::vector<double> predictions;
    std::vector<double> targets;
    predictions.reserve(samples.size());
    targets.reserve(samples.size());
    Workspace ws;
    for (const auto &s : samples)
    {
        predictions.push_back(forward(model, encode_cell(s.cell), ws).prediction);
        targets.push_back(s.target);
    }
    return compute_metrics(predictions, targets);
}

AdamOptimizer::AdamOptimizer(const GraphNetModel &shape, double learning_rate, double beta1, double beta2, double epsilon)
    : m_(zeros_like(shape)), v_(zeros_like(shape)), lr_(learning_rate), beta1_(beta1), beta2_(beta2), epsilon_(epsilon)
{
}

void AdamOptimizer::step(GraphNetModel &params, GraphNetModel &grads)
{
    ++t_;
    const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));

    std::vector<std::vector<double> *> p, g, m, v;
    for_each_tensor(params, [&](const std::string &, std::vector<double> &x, int, int) { p.push_back(&x); });
    for_each_tensor(grads, [&](const std::string &, std::vector<double> &x, int, int) { g.push_back(&x); });
    for_each_tensor(m_, [&](const std::string &, std::vector<double> &x, int, int) { m.push_back(&x); });
    for_each_tensor(v_, [&](const std::string &, std::vector<double> &x, int, int) { v.push_back(&x); });
    if (p.size() != g.size()) throw Error("gradient structure does not match parameters");

    for (std::size_t t = 0; t < p.size(); ++t)
    {
        auto &pt = *p[t];
        const auto &gt = *g[t];
        auto &mt = *m[t];
        auto &vt = *v[t];
        if (pt.size() != gt.size()) throw Error("gradient tensor size does not match parameter");
        for (std::size_t i = 0; i < pt.size(); ++i)
        {
            mt[i] = beta1_ * mt[i] + (1.0 - beta1_) * gt[i];
            vt[i] = beta2_ * vt[i] + (1.0 - beta2_) * gt[i] * gt[i];
            pt[i] -= lr_ * (mt[i] / c1) / (std::sqrt(vt[i] / c2) + epsilon_);
        }
    }
}

double mean_loss(const GraphNetModel &model, std::span<const Sample> samples)
{
    if (samples.empty()) return 0.0;
    Workspace ws;
    double sum = 0.0;
    for (const auto &s : samples)
    {
        const auto out = forward(model, encode_cell(s.cell), ws);
        sum += loss(out.step_outputs, normalize_target(model, s.target));
    }
    return sum / static_cast<double>(samples.size());
}

namespace
{

void scale_tensors(GraphNetModel &model, double factor)
{
    for_each_tensor(model, [&](const std::string &, std::vector<double> &x, int, int) {
        for (auto &value : x) value *= factor;
    });
}

}  // namespace

TrainResult train(std::span<const Sample> dataset, const TrainConfig &config, const EpochCallback &on_epoch)
{
    config.validate();
    if (dataset.empty()) throw Error("training dataset is empty");
    for (const auto &s : dataset)
        if (!std::isfinite(s.target)) throw Error("training targets must be finite");

    TrainResult result;
    result.config = config;
    result.split = split_sizes(dataset.size(), config);
    if (result.split.train == 0) throw Error("training split is empty");

    Rng rng(config.seed);
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<Sample> train_set, val_set, test_set;
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        const auto &s = dataset[order[i]];
        if (i < result.split.train)
            train_set.push_back(s);
        else if (i < result.split.train + result.split.validation)
            val_set.push_back(s);
        else
            test_set.push_back(s);
    }

    double mean = 0.0;
    for (const auto &s : train_set) mean += s.target;
    mean /= static_cast<double>(train_set.size());
    double var = 0.0;
    for (const auto &s : train_set) var += (s.target - mean) * (s.target - mean);
    var /= static_cast<double>(train_set.size());
    const double stddev = std::sqrt(var);
    if (!(stddev > 1e-12 * std::max(1.0, std::abs(mean)))) throw Error("degenerate target variance: all targets equal");
    result.config.target_mean = mean;
    result.config.target_std = stddev;

    GraphNetModel model = init_model(mix64(config.seed ^ 0x6a09e667f3bcc909ULL),
                                      config.latent_width,
                                      config.message_passing_steps);
    model.target_mean = mean;
    model.target_std = stddev;

    std::vector<GraphFeatures> features;
    features.reserve(train_set.size());
    for (const auto &s : train_set) features.push_back(encode_cell(s.cell));

    AdamOptimizer adam(model, config.learning_rate, config.beta1, config.beta2, config.epsilon);
    GraphNetModel grads = zeros_like(model);
    Workspace ws;

    const auto &select = val_set.empty() ? train_set : val_set;
    result.model = model;
    result.best_validation_loss = mean_loss(model, select);
    result.best_epoch = 0;
    result.validation_loss.push_back(result.best_validation_loss);

    std::vector<std::size_t> perm(train_set.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    const auto batch = static_cast<std::size_t>(config.batch_size);

    for (int epoch = 1; epoch <= config.epochs; ++epoch)
    {
        rng.shuffle(std::span<std::size_t>(perm));
        double epoch_loss = 0.0;
        for (std::size_t begin = 0; begin < perm.size(); begin += batch)
        {
            const std::size_t end = std::min(begin + batch, perm.size());
            scale_tensors(grads, 0.0);
            for (std::size_t i = begin; i < end; ++i)
                epoch_loss += accumulate_gradients(model, features[perm[i]], train_set[perm[i]].target, grads, ws);
            scale_tensors(grads, 1.0 / static_cast<double>(end - begin));
            adam.step(model, grads);
        }
        epoch_loss /= static_cast<double>(perm.size());
        const double val_loss = mean_loss(model, select);
        result.train_loss.push_back(epoch_loss);
        result.validation_loss.push_back(val_loss);
        if (val_loss < result.best_validation_loss)
        {
            result.best_validation_loss = val_loss;
            result.best_epoch = epoch;
            result.model = model;
        }
        if (on_epoch) on_epoch({epoch, epoch_loss, val_loss});
    }

    if (!test_set.empty()) result.test = evaluate(result.model, test_set);
    if (!val_set.empty()) result.validation = evaluate(result.model, val_set);
    return result;
}

// ---------------------------------------------------------------------------
// Checkpoints

nlohmann::json checkpoint_to_json(const Checkpoint &ckpt)
{
    nlohmann::json tensors = nlohmann::json::array();
    for_each_tensor(ckpt.model, [&](const std::string &name, const std::vector<double> &values, int rows, int cols) {
        tensors.push_back({{"name", name}, {"shape", {rows, cols}}, {"values", values}});
    });
    return {
        {"format", "edgeperf-graph-net"},
        {"version", 1},
        {"latent_width", ckpt.model.latent_width},
        {"num_message_passing_steps", ckpt.model.num_message_passing_steps},
        {"target_normalization", {{"mean", ckpt.model.target_mean}, {"std", ckpt.model.target_std}}},
        {"train_config", to_json(ckpt.config)},
        {"metadata", ckpt.metadata},
        {"tensors", tensors},
    };
}

Checkpoint checkpoint_from_json(const nlohmann::json &j)
{
    try
    {
        if (j.at("format").get<std::string>() != "edgeperf-graph-net") throw Error("not a graph-net checkpoint");
        if (j.at("version").get<int>() != 1) throw Error("unsupported checkpoint version");
        Checkpoint ckpt;
        ckpt.config = train_config_from_json(j.at("train_config"));
        ckpt.metadata = j.value("metadata", nlohmann::json::object());
        ckpt.model = init_model(0, j.at("latent_width").get<int>(), j.at("num_message_passing_steps").get<int>());
        ckpt.model.target_mean = j.at("target_normalization").at("mean").get<double>();
        ckpt.model.target_std = j.at("target_normalization").at("std").get<double>();
        if (!(ckpt.model.target_std > 0.0)) throw Error("checkpoint target std must be positive");

        const auto &tensors = j.at("tensors");
        std::size_t index = 0;
        for_each_tensor(ckpt.model, [&](const std::string &name, std::vector<double> &values, int rows, int cols) {
            if (index >= tensors.size()) throw Error("checkpoint is missing tensor " + name);
            const auto &t = tensors.at(index++);
            if (t.at("name").get<std::string>() != name)
                throw Error("checkpoint tensor order mismatch at " + name);
            if (t.at("shape").at(0).get<int>() != rows || t.at("shape").at(1).get<int>() != cols)
                throw Error("checkpoint tensor " + name + " has the wrong shape");
            auto stored = t.at("values").get<std::vector<double>>();
            if (stored.size() != values.size()) throw Error("checkpoint tensor " + name + " has the wrong size");
            values = std::move(stored);
        });
        if (index != tensors.size()) throw Error("checkpoint has unexpected extra tensors");
        return ckpt;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error(std::string("malformed checkpoint: ") + e.what());
    }
}

void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt)
{
    std::ofstream out(path);
    if (!out) throw Error("cannot write checkpoint " + path.string());
    out << checkpoint_to_json(ckpt).dump() << '\n';
    if (!out) throw Error("failed writing checkpoint " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open checkpoint " + path.string());
    nlohmann::json j;
    try
    {
        in >> j;
    }
    catch (const nlohmann::json::exception &e)
    {
        throw Error("checkpoint " + path.string() + " is not valid JSON: " + e.what());
    }
    return checkpoint_from_json(j);
}

}  // namespace edgeperf::gnn
