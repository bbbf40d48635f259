// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "edgeperf/nas_graph.hpp"

namespace edgeperf::nas
{

// Full-network skeleton a cell is stacked into. Defaults describe the
// CIFAR-10 network: 3x3 stem, 3 stacks of 3 cells, 2x2 max-pool downsampling
// with channel doubling between stacks, global average pool and a dense
// classifier.
struct NetworkSpec
{
    int input_height = 32;
    int input_width = 32;
    int input_channels = 3;
    int stem_channels = 128;
    int num_stacks = 3;
    int cells_per_stack = 3;
    int num_classes = 10;

    int bytes_per_weight = 1;
    int bytes_per_activation = 1;
    // Two trainable normalization parameters (scale, offset) per conv output channel.
    bool normalization_params = true;

    void validate() const;
    bool operator==(const NetworkSpec &) const = default;
};

enum class LayerKind : std::uint8_t
{
    Stem,
    Projection,
    Conv3x3,
    Conv1x1,
    MaxPool3x3,
    Downsample,
    GlobalPool,
    Dense,
};

std::string_view to_string(LayerKind kind);

struct LayerWorkload
{
    LayerKind kind = LayerKind::Stem;
    int out_height = 0;
    int out_width = 0;
    int in_channels = 0;
    int out_channels = 0;
    int kernel_h = 0;
    int kernel_w = 0;
    std::int64_t macs = 0;
    // Element visits for pooling layers (window taps per output element).
    std::int64_t element_ops = 0;
    std::int64_t params = 0;
    std::int64_t param_bytes = 0;
    std::int64_t input_activation_bytes = 0;
    std::int64_t output_activation_bytes = 0;
    int depth_rank = 0;

    bool uses_macs() const;
    bool operator==(const LayerWorkload &) const = default;
};

struct NetworkWorkload
{
    std::vector<LayerWorkload> layers;
    std::int64_t total_params = 0;
    std::int64_t total_macs = 0;
    CellGraph source_cell;
    NetworkSpec spec;

    std::int64_t total_param_bytes() const;
    bool operator==(const NetworkWorkload &) const = default;
};

// Channel count of every vertex when a cell maps `in_channels` to
// `out_channels`: the output budget is split evenly over the vertices feeding
// Output (remainder to the earliest ones); other interior vertices take the
// maximum over their successors.
std::vector<int> vertex_channels(const CellGraph &cell, int in_channels, int out_channels);

// Layers emitted per cell instantiation: one per interior vertex plus one 1x1
// projection for every edge leaving Input.
int cell_layer_count(const CellGraph &cell);

// Layers outside the cells: stem, downsamples, global pool, dense.
int fixed_layer_count(const NetworkSpec &spec);

NetworkWorkload expand_network(const CellGraph &cell, const NetworkSpec &spec = {});

}  // namespace edgeperf::nas
