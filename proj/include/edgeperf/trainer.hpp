// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include "json.hpp"

#include "edgeperf/graph_net.hpp"

namespace edgeperf::gnn
{

struct TrainConfig
{
    double learning_rate = 1e-3;
    int batch_size = 16;
    double train_fraction = 0.6;
    double validation_fraction = 0.2;
    double test_fraction = 0.2;
    std::uint64_t seed = 0;
    int epochs = 50;
    int latent_width = kLatentWidth;
    int message_passing_steps = kDefaultSteps;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    // Filled in by train() from the training split.
    double target_mean = 0.0;
    double target_std = 1.0;

    void validate() const;
};

nlohmann::json to_json(const TrainConfig &cfg);
TrainConfig train_config_from_json(const nlohmann::json &j);

struct SplitSizes
{
    std::size_t train = 0;
    std::size_t validation = 0;
    std::size_t test = 0;
};

// validation = round(n * validation_fraction), test likewise, train takes the rest.
SplitSizes split_sizes(std::size_t n, const TrainConfig &cfg);

struct Sample
{
    nas::CellGraph cell;
    double target = 0.0;
};

struct EvalMetrics
{
    std::size_t count = 0;
    double mape = 0.0;
    double accuracy = 0.0;  // 1 - mape
    double spearman = 0.0;
    double pearson = 0.0;
    double rmse = 0.0;
};

nlohmann::json to_json(const EvalMetrics &m);

// Predictions and targets in original units; targets must be non-zero.
EvalMetrics compute_metrics(std::span<const double> predictions, std::span<const double> targets);

EvalMetrics evaluate(const GraphNetModel &model, std::span<const Sample> samples);

class AdamOptimizer
{
   public:
    AdamOptimizer(const GraphNetModel &shape, double learning_rate, double beta1, double beta2, double epsilon);

    // params -= lr * m_hat / (sqrt(v_hat) + eps)
    void step(GraphNetModel &params, GraphNetModel &grads);
    std::int64_t steps_taken() const { return t_; }

   private:
    GraphNetModel m_;
    GraphNetModel v_;
    double lr_;
    double beta1_;
    double beta2_;
    double epsilon_;
    std::int64_t t_ = 0;
};

struct TrainResult
{
    GraphNetModel model;  // parameters with the best validation loss
    TrainConfig config;
    SplitSizes split;
    EvalMetrics test;
    EvalMetrics validation;
    double best_validation_loss = 0.0;
    int best_epoch = -1;
    std::vector<double> train_loss;  // one per epoch
    std::vector<double> validation_loss;  // index 0 is the initial model
};

struct EpochReport
{
    int epoch = 0;
    double train_loss = 0.0;
    double validation_loss = 0.0;
};

using EpochCallback = std::function<void(const EpochReport &)>;

TrainResult train(std::span<const Sample> dataset, const TrainConfig &cfg, const EpochCallback &on_epoch = {});

// Mean per-sample loss in normalized units.
double mean_loss(const GraphNetModel &model, std::span<const Sample> samples);

struct Checkpoint
{
    GraphNetModel model;
    TrainConfig config;
    nlohmann::json metadata = nlohmann::json::object();
};

nlohmann::json checkpoint_to_json(const Checkpoint &ckpt);
Checkpoint checkpoint_from_json(const nlohmann::json &j);
void save_checkpoint(const std::filesystem::path &path, const Checkpoint &ckpt);
Checkpoint load_checkpoint(const std::filesystem::path &path);

}  // namespace edgeperf::gnn
