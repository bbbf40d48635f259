// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "edgeperf/nas_graph.hpp"

namespace edgeperf::gnn
{

inline constexpr int kLatentWidth = 16;
inline constexpr int kDefaultSteps = 7;
inline constexpr double kLayerNormEpsilon = 1e-8;

// Attributed directed graph. Node and edge attributes are stored row-major,
// one row per node / edge.
struct GraphFeatures
{
    int node_width = 0;
    int edge_width = 0;
    int global_width = 0;
    std::vector<double> nodes;
    std::vector<double> edges;
    std::vector<int> senders;
    std::vector<int> receivers;
    std::vector<double> global;

    int num_nodes() const { return node_width == 0 ? 0 : static_cast<int>(nodes.size()) / node_width; }
    int num_edges() const { return static_cast<int>(senders.size()); }
    std::span<const double> node(int i) const;
    std::span<const double> edge(int i) const;

    // Throws Error on inconsistent sizes or out-of-range endpoints.
    void validate() const;
};

// Row-major weight (out x in) and bias (out).
struct Dense
{
    int in = 0;
    int out = 0;
    std::vector<double> weight;
    std::vector<double> bias;
};

// dense -> relu -> dense -> relu -> layer norm (scale, offset)
struct MlpBlock
{
    Dense hidden;
    Dense output;
    std::vector<double> ln_scale;
    std::vector<double> ln_offset;

    int input_width() const { return hidden.in; }
    int output_width() const { return output.out; }
};

struct BlockSet
{
    MlpBlock edge;
    MlpBlock node;
    MlpBlock global;
};

// Encode-process-decode graph network. The core sees the encoder output
// concatenated with the previous core output; after every core step the
// decoded global feature is mapped to one scalar by output_transform.
struct GraphNetModel
{
    int latent_width = kLatentWidth;
    int num_message_passing_steps = kDefaultSteps;
    BlockSet encoder;
    BlockSet core;
    BlockSet decoder;
    Dense output_transform;
    double target_mean = 0.0;
    double target_std = 1.0;

    std::size_t parameter_count() const;
};

// Calls fn(name, values, rows, cols) for every parameter tensor in a fixed order.
template <class Model, class Fn>
void for_each_tensor(Model &model, Fn &&fn);

// Same architecture with every parameter set to zero; used as gradient storage.
GraphNetModel zeros_like(const GraphNetModel &model);

// Weights ~ truncated normal (|x| <= 2 sigma, sigma = 1 / sqrt(fan_in)),
// biases 0, layer-norm scale 1 and offset 0.
GraphNetModel init_model(std::uint64_t seed, int latent_width = kLatentWidth, int steps = kDefaultSteps);

MlpBlock make_mlp(int in, int hidden, int out);

// Nodes: input 1, conv3x3 2, maxpool3x3 3, conv1x1 4, output 5. Edges and
// global are [1.0].
GraphFeatures encode_cell(const nas::CellGraph &cell);

std::vector<double> apply_mlp(const MlpBlock &block, std::span<const double> x);

// Encoder/decoder stage: each block applied to its own attribute only.
GraphFeatures apply_independent(const GraphFeatures &graph, const BlockSet &blocks);

// One full message-passing block with sum aggregation:
//   e' = phi_e(e, v_receiver, v_sender, u)
//   v' = phi_v(sum of incoming e', v, u)
//   u' = phi_u(sum e', sum v', u)
GraphFeatures gn_block(const GraphFeatures &graph, const BlockSet &blocks);

struct ForwardResult
{
    std::vector<double> step_outputs;  // normalized units, one per core step
    double prediction = 0.0;           // last step, original units
};

ForwardResult forward(const GraphNetModel &model, const nas::CellGraph &cell);
ForwardResult forward(const GraphNetModel &model, const GraphFeatures &input);
double predict(const GraphNetModel &model, const nas::CellGraph &cell);

// Fully decoded graph after the last core step (edge and node decoders are
// not used by the scalar prediction).
GraphFeatures decode_graph(const GraphNetModel &model, const nas::CellGraph &cell);

// Mean over steps of the squared error against the normalized target.
double loss(std::span<const double> step_outputs, double normalized_target);

double normalize_target(const GraphNetModel &model, double target);
double denormalize(const GraphNetModel &model, double value);

// Reusable scratch memory for forward/backward passes; one per thread.
class Workspace
{
   public:
    Workspace();
    ~Workspace();
    Workspace(Workspace &&) noexcept;
    Workspace &operator=(Workspace &&) noexcept;

    struct Tape;
    Tape &tape() { return *tape_; }

   private:
    std::unique_ptr<Tape> tape_;
};

ForwardResult forward(const GraphNetModel &model, const GraphFeatures &input, Workspace &workspace);

// Adds d(loss)/d(parameter) for one sample into `gradients`; returns the loss.
// `target` is in original units.
double accumulate_gradients(const GraphNetModel &model,
                            const GraphFeatures &input,
                            double target,
                            GraphNetModel &gradients,
                            Workspace &workspace);

GraphNetModel backward(const GraphNetModel &model, const nas::CellGraph &cell, double target);

// ---------------------------------------------------------------------------

namespace detail
{

template <class Block, class Fn>
void visit_mlp(Block &block, const std::string &prefix, Fn &fn)
{
    fn(prefix + ".hidden.weight", block.hidden.weight, block.hidden.out, block.hidden.in);
    fn(prefix + ".hidden.bias", block.hidden.bias, block.hidden.out, 1);
    fn(prefix + ".output.weight", block.output.weight, block.output.out, block.output.in);
    fn(prefix + ".output.bias", block.output.bias, block.output.out, 1);
    fn(prefix + ".layer_norm.scale", block.ln_scale, static_cast<int>(block.ln_scale.size()), 1);
    fn(prefix + ".layer_norm.offset", block.ln_offset, static_cast<int>(block.ln_offset.size()), 1);
}

template <class Set, class Fn>
void visit_set(Set &set, const std::string &prefix, Fn &fn)
{
    visit_mlp(set.edge, prefix + ".edge", fn);
    visit_mlp(set.node, prefix + ".node", fn);
    visit_mlp(set.global, prefix + ".global", fn);
}

}  // namespace detail

template <class Model, class Fn>
void for_each_tensor(Model &model, Fn &&fn)
{
    detail::visit_set(model.encoder, "encoder", fn);
    detail::visit_set(model.core, "core", fn);
    detail::visit_set(model.decoder, "decoder", fn);
    fn(std::string("output_transform.weight"),
       model.output_transform.weight,
       model.output_transform.out,
       model.output_transform.in);
    fn(std::string("output_transform.bias"), model.output_transform.bias, model.output_transform.out, 1);
}

}  // namespace edgeperf::gnn
