// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/network.hpp"

#include <algorithm>

#include "edgeperf/error.hpp"

namespace edgeperf::nas
{

void NetworkSpec::validate() const
{
    const int fields[] = {input_height,
                          input_width,
                          input_channels,
                          stem_channels,
                          num_stacks,
                          cells_per_stack,
                          num_classes,
                          bytes_per_weight,
                          bytes_per_activation};
    for (int f : fields)
        if (f <= 0) throw Error("network spec fields must be positive integers");
}

std::string_view to_string(LayerKind kind)
{
    switch (kind)
    {
        case LayerKind::Stem: return "stem";
        case LayerKind::Projection: return "projection";
        case LayerKind::Conv3x3: return "conv3x3";
        case LayerKind::Conv1x1: return "conv1x1";
        case LayerKind::MaxPool3x3: return "maxpool3x3";
        case LayerKind::Downsample: return "downsample";
        case LayerKind::GlobalPool: return "global_pool";
        case LayerKind::Dense: return "dense";
    }
    return "unknown";
}

bool LayerWorkload::uses_macs() const
{
    return kind != LayerKind::MaxPool3x3 && kind != LayerKind::Downsample && kind != LayerKind::GlobalPool;
}

std::int64_t NetworkWorkload::total_param_bytes() const
{
    std::int64_t sum = 0;
    for (const auto &layer : layers) sum += layer.param_bytes;
    return sum;
}

std::vector<int> vertex_channels(const CellGraph &cell, int in_channels, int out_channels)
{
    const int n = cell.num_vertices();
    std::vector<int> channels(static_cast<std::size_t>(n), 0);
    channels.front() = in_channels;
    channels.back() = out_channels;
    if (n == 2) return channels;

    int fan_in = 0;
    for (int v = 1; v < n - 1; ++v)
        if (cell.edge(v, n - 1)) ++fan_in;
    if (fan_in == 0) throw Error("channel allocation infeasible: no interior vertex feeds output");

    const int share = out_channels / fan_in;
    int remainder = out_channels % fan_in;
    for (int v = 1; v < n - 1; ++v)
    {
        if (!cell.edge(v, n - 1)) continue;
        channels[static_cast<std::size_t>(v)] = share;
        if (remainder > 0)
        {
            ++channels[static_cast<std::size_t>(v)];
            --remainder;
        }
    }

    for (int v = n - 3; v > 0; --v)
    {
        if (cell.edge(v, n - 1)) continue;
        for (int dst = v + 1; dst < n - 1; ++dst)
            if (cell.edge(v, dst))
                channels[static_cast<std::size_t>(v)] =
                    std::max(channels[static_cast<std::size_t>(v)], channels[static_cast<std::size_t>(dst)]);
    }
    for (int v = 1; v < n - 1; ++v)
        if (channels[static_cast<std::size_t>(v)] <= 0)
            throw Error("channel allocation infeasible at vertex " + std::to_string(v));
    return channels;
}

int cell_layer_count(const CellGraph &cell)
{
    const int n = cell.num_vertices();
    int count = n - 2;
    for (int v = 1; v < n; ++v)
        if (cell.edge(0, v)) ++count;
    return count;
}

int fixed_layer_count(const NetworkSpec &spec) { return 1 + (spec.num_stacks - 1) + 2; }

namespace
{

class Builder
{
   public:
    explicit Builder(const NetworkSpec &spec) : spec_(spec) {}

    void conv(LayerKind kind, int height, int width, int in_ch, int out_ch, int kernel, int rank)
    {
        LayerWorkload layer = base(kind, height, width, in_ch, out_ch, kernel, rank);
        const std::int64_t weights = std::int64_t{kernel} * kernel * in_ch * out_ch;
        const std::int64_t norm = spec_.normalization_params ? 2 * std::int64_t{out_ch} : 0;
        layer.params = weights + norm;
        layer.param_bytes = layer.params * spec_.bytes_per_weight;
        layer.macs = std::int64_t{height} * width * weights;
        push(layer);
    }

    void pool(LayerKind kind, int height, int width, int channels, int window, int in_h, int in_w, int rank)
    {
        LayerWorkload layer = base(kind, height, width, channels, channels, window, rank);
        layer.element_ops = std::int64_t{height} * width * channels * window * window;
        layer.input_activation_bytes = std::int64_t{in_h} * in_w * channels * spec_.bytes_per_activation;
        push(layer);
    }

    // Average over the whole map: every input element is visited once.
    void global_pool(int in_h, int in_w, int channels, int rank)
    {
        LayerWorkload layer = base(LayerKind::GlobalPool, 1, 1, channels, channels, 1, rank);
        layer.kernel_h = in_h;
        layer.kernel_w = in_w;
        layer.element_ops = std::int64_t{in_h} * in_w * channels;
        layer.input_activation_bytes = layer.element_ops * spec_.bytes_per_activation;
        push(layer);
    }

    void dense(int in_features, int classes, int rank)
    {
        LayerWorkload layer = base(LayerKind::Dense, 1, 1, in_features, classes, 1, rank);
        layer.params = std::int64_t{in_features} * classes + classes;
        layer.param_bytes = layer.params * spec_.bytes_per_weight;
        layer.macs = std::int64_t{in_features} * classes;
        push(layer);
    }

    std::vector<LayerWorkload> take() { return std::move(layers_); }

   private:
    LayerWorkload base(LayerKind kind, int height, int width, int in_ch, int out_ch, int kernel, int rank) const
    {
        LayerWorkload layer;
        layer.kind = kind;
        layer.out_height = height;
        layer.out_width = width;
        layer.in_channels = in_ch;
        layer.out_channels = out_ch;
        layer.kernel_h = kernel;
        layer.kernel_w = kernel;
        layer.depth_rank = rank;
        layer.input_activation_bytes = std::int64_t{height} * width * in_ch * spec_.bytes_per_activation;
        layer.output_activation_bytes = std::int64_t{height} * width * out_ch * spec_.bytes_per_activation;
        return layer;
    }

    void push(const LayerWorkload &layer) { layers_.push_back(layer); }

    const NetworkSpec &spec_;
    std::vector<LayerWorkload> layers_;
};

// Appends one cell instantiation; returns the depth rank of its output.
int emit_cell(Builder &builder, const CellGraph &cell, int height, int width, int in_ch, int out_ch, int base_rank)
{
    const int n = cell.num_vertices();
    const auto channels = vertex_channels(cell, in_ch, out_ch);
    std::vector<int> rank(static_cast<std::size_t>(n), base_rank);
    int output_rank = base_rank;

    for (int t = 1; t < n - 1; ++t)
    {
        const int ch = channels[static_cast<std::size_t>(t)];
        int input_rank = base_rank;
        if (cell.edge(0, t))
        {
            builder.conv(LayerKind::Projection, height, width, in_ch, ch, 1, base_rank + 1);
            input_rank = base_rank + 1;
        }
        for (int src = 1; src < t; ++src)
            if (cell.edge(src, t)) input_rank = std::max(input_rank, rank[static_cast<std::size_t>(src)]);
        const int r = input_rank + 1;
        rank[static_cast<std::size_t>(t)] = r;

        switch (cell.op(t))
        {
            case OperationKind::Conv3x3: builder.conv(LayerKind::Conv3x3, height, width, ch, ch, 3, r); break;
            case OperationKind::Conv1x1: builder.conv(LayerKind::Conv1x1, height, width, ch, ch, 1, r); break;
            case OperationKind::MaxPool3x3:
                builder.pool(LayerKind::MaxPool3x3, height, width, ch, 3, height, width, r);
                break;
            default: throw Error("interior vertex carries a terminal operation");
        }
        if (cell.edge(t, n - 1)) output_rank = std::max(output_rank, r);
    }
    if (cell.edge(0, n - 1))
    {
        builder.conv(LayerKind::Projection, height, width, in_ch, out_ch, 1, base_rank + 1);
        output_rank = std::max(output_rank, base_rank + 1);
    }
    return output_rank;
}

}  // namespace

NetworkWorkload expand_network(const CellGraph &cell, const NetworkSpec &spec)
{
    require_valid(cell);
    spec.validate();

    Builder builder(spec);
    int height = spec.input_height;
    int width = spec.input_width;
    int rank = 0;

    builder.conv(LayerKind::Stem, height, width, spec.input_channels, spec.stem_channels, 3, rank);
    int current = spec.stem_channels;
    int target = spec.stem_channels;

    for (int stack = 0; stack < spec.num_stacks; ++stack)
    {
        if (stack > 0)
        {
            const int in_h = height;
            const int in_w = width;
            height = (height + 1) / 2;
            width = (width + 1) / 2;
            builder.pool(LayerKind::Downsample, height, width, current, 2, in_h, in_w, ++rank);
            target *= 2;
        }
        for (int c = 0; c < spec.cells_per_stack; ++c)
        {
            rank = emit_cell(builder, cell, height, width, current, target, rank);
            current = target;
        }
    }

    builder.global_pool(height, width, current, ++rank);
    builder.dense(current, spec.num_classes, ++rank);

    NetworkWorkload net;
    net.layers = builder.take();

    for (const auto &layer : net.layers)
    {
        net.total_params += layer.params;
        net.total_macs += layer.macs;
    }
    net.source_cell = cell;
    net.spec = spec;
    return net;
}

}  // namespace edgeperf::nas
