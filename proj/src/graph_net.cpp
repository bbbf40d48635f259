// SPDX-FileCopyrightText: © 2026 The edgeperf Authors
//
// SPDX-License-Identifier: Apache-2.0
#include "edgeperf/graph_net.hpp"

#include <algorithm>
#include <cmath>

#include "edgeperf/error.hpp"
#include "edgeperf/rng.hpp"

namespace edgeperf::gnn
{

std::span<const double> GraphFeatures::node(int i) const
{
    return {nodes.data() + static_cast<std::size_t>(i) * node_width, static_cast<std::size_t>(node_width)};
}

std::span<const double> GraphFeatures::edge(int i) const
{
    return {edges.data() + static_cast<std::size_t>(i) * edge_width, static_cast<std::size_t>(edge_width)};
}

void GraphFeatures::validate() const
{
    if (node_width <= 0 || global_width <= 0) throw Error("graph features need positive node and global widths");
    if (nodes.size() % static_cast<std::size_t>(node_width) != 0) throw Error("node attribute size mismatch");
    if (senders.size() != receivers.size()) throw Error("sender/receiver count mismatch");
    if (edges.size() != senders.size() * static_cast<std::size_t>(edge_width))
        throw Error("edge attribute size mismatch");
    if (global.size() != static_cast<std::size_t>(global_width)) throw Error("global attribute size mismatch");
    const int n = num_nodes();
    for (std::size_t e = 0; e < senders.size(); ++e)
        if (senders[e] < 0 || senders[e] >= n || receivers[e] < 0 || receivers[e] >= n)
            throw Error("edge " + std::to_string(e) + " references a missing node");
}

std::size_t GraphNetModel::parameter_count() const
{
    std::size_t count = 0;
    for_each_tensor(*this, [&](const std::string &, const std::vector<double> &values, int, int) {
        count += values.size();
    });
    return count;
}

GraphNetModel zeros_like(const GraphNetModel &model)
{
    GraphNetModel zero = model;
    for_each_tensor(zero, [](const std::string &, std::vector<double> &values, int, int) {
        std::fill(values.begin(), values.end(), 0.0);
    });
    return zero;
}

namespace
{

Dense make_dense(int in, int out)
{
    Dense d;
    d.in = in;
    d.out = out;
    d.weight.assign(static_cast<std::size_t>(in) * out, 0.0);
    d.bias.assign(static_cast<std::size_t>(out), 0.0);
    return d;
}

bool ends_with(const std::string &s, std::string_view suffix)
{
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

MlpBlock make_mlp(int in, int hidden, int out)
{
    MlpBlock block;
    block.hidden = make_dense(in, hidden);
    block.output = make_dense(hidden, out);
    block.ln_scale.assign(static_cast<std::size_t>(out), 1.0);
    block.ln_offset.assign(static_cast<std::size_t>(out), 0.0);
    return block;
}

GraphNetModel init_model(std::uint64_t seed, int latent_width, int steps)
{
    if (latent_width <= 0) throw Error("latent width must be positive");
    if (steps < 0) throw Error("message passing steps must be non-negative");

    const int L = latent_width;
    GraphNetModel model;
    model.latent_width = L;
    model.num_message_passing_steps = steps;
    model.encoder = {make_mlp(1, L, L), make_mlp(1, L, L), make_mlp(1, L, L)};
    // Core inputs are [encoder output | previous latent] for every attribute.
    model.core = {make_mlp(8 * L, L, L), make_mlp(L + 4 * L, L, L), make_mlp(2 * L + 2 * L, L, L)};
    model.decoder = {make_mlp(L, L, L), make_mlp(L, L, L), make_mlp(L, L, L)};
    model.output_transform = make_dense(L, 1);

    Rng rng(seed);
    for_each_tensor(model, [&](const std::string &name, std::vector<double> &values, int, int cols) {
        if (ends_with(name, ".weight"))
        {
            const double sigma = 1.0 / std::sqrt(static_cast<double>(cols));
            for (auto &w : values) w = rng.truncated_normal(sigma);
        }
        else if (ends_with(name, ".scale"))
        {
            std::fill(values.begin(), values.end(), 1.0);
        }
        else
        {
            std::fill(values.begin(), values.end(), 0.0);
        }
    });
    return model;
}

GraphFeatures encode_cell(const nas::CellGraph &cell)
{
    nas::require_valid(cell);
    GraphFeatures g;
    g.node_width = 1;
    g.edge_width = 1;
    g.global_width = 1;
    const int n = cell.num_vertices();
    for (int v = 0; v < n; ++v)
    {
        double code = 0.0;
        switch (cell.op(v))
        {
            case nas::OperationKind::Input: code = 1.0; break;
            case nas::OperationKind::Conv3x3: code = 2.0; break;
            case nas::OperationKind::MaxPool3x3: code = 3.0; break;
            case nas::OperationKind::Conv1x1: code = 4.0; break;
            case nas::OperationKind::Output: code = 5.0; break;
        }
        g.nodes.push_back(code);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (cell.edge(i, j))
            {
                g.senders.push_back(i);
                g.receivers.push_back(j);
                g.edges.push_back(1.0);
            }
    g.global = {1.0};
    return g;
}

// ---------------------------------------------------------------------------
// MLP kernels with a tape for reverse mode.

namespace
{

struct MlpTape
{
    int rows = 0;
    int in = 0;
    int hidden = 0;
    int out = 0;
    std::vector<double> x, h1, h2, xhat, inv_std, y;

    void shape(const MlpBlock &block, int r)
    {
        rows = r;
        in = block.hidden.in;
        hidden = block.hidden.out;
        out = block.output.out;
        const auto R = static_cast<std::size_t>(r);
        x.resize(R * in);
        h1.resize(R * hidden);
        h2.resize(R * out);
        xhat.resize(R * out);
        inv_std.resize(R);
        y.resize(R * out);
    }

    double *x_row(int r) { return x.data() + static_cast<std::size_t>(r) * in; }
    const double *y_row(int r) const { return y.data() + static_cast<std::size_t>(r) * out; }
};

inline void dense_relu(const Dense &d, const double *x, double *y)
{
    const double *w = d.weight.data();
    for (int o = 0; o < d.out; ++o, w += d.in)
    {
        double acc = d.bias[static_cast<std::size_t>(o)];
        for (int i = 0; i < d.in; ++i) acc += w[i] * x[i];
        y[o] = acc > 0.0 ? acc : 0.0;
    }
}

void mlp_forward(const MlpBlock &block, MlpTape &t)
{
    const int out = t.out;
    for (int r = 0; r < t.rows; ++r)
    {
        const double *x = t.x.data() + static_cast<std::size_t>(r) * t.in;
        double *h1 = t.h1.data() + static_cast<std::size_t>(r) * t.hidden;
        double *h2 = t.h2.data() + static_cast<std::size_t>(r) * out;
        double *xhat = t.xhat.data() + static_cast<std::size_t>(r) * out;
        double *y = t.y.data() + static_cast<std::size_t>(r) * out;
        dense_relu(block.hidden, x, h1);
        dense_relu(block.output, h1, h2);

        double mean = 0.0;
        for (int o = 0; o < out; ++o) mean += h2[o];
        mean /= out;
        double var = 0.0;
        for (int o = 0; o < out; ++o) var += (h2[o] - mean) * (h2[o] - mean);
        var /= out;
        const double inv = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        t.inv_std[static_cast<std::size_t>(r)] = inv;
        for (int o = 0; o < out; ++o)
        {
            xhat[o] = (h2[o] - mean) * inv;
            y[o] = block.ln_scale[static_cast<std::size_t>(o)] * xhat[o] + block.ln_offset[static_cast<std::size_t>(o)];
        }
    }
}

struct Scratch
{
    std::vector<double> a, b, c;
};

// dy: rows x out. dx (rows x in) is overwritten when non-null.
void mlp_backward(const MlpBlock &block, const MlpTape &t, const double *dy, MlpBlock &grad, double *dx, Scratch &s)
{
    const int in = t.in;
    const int hidden = t.hidden;
    const int out = t.out;
    s.a.resize(static_cast<std::size_t>(out));
    s.b.resize(static_cast<std::size_t>(out));
    s.c.resize(static_cast<std::size_t>(hidden));
    double *dxhat = s.a.data();
    double *dh2 = s.b.data();
    double *dh1 = s.c.data();

    for (int r = 0; r < t.rows; ++r)
    {
        const double *x = t.x.data() + static_cast<std::size_t>(r) * in;
        const double *h1 = t.h1.data() + static_cast<std::size_t>(r) * hidden;
        const double *h2 = t.h2.data() + static_cast<std::size_t>(r) * out;
        const double *xhat = t.xhat.data() + static_cast<std::size_t>(r) * out;
        const double *dyr = dy + static_cast<std::size_t>(r) * out;
        const double inv = t.inv_std[static_cast<std::size_t>(r)];

        double m1 = 0.0;
        double m2 = 0.0;
        for (int o = 0; o < out; ++o)
        {
            const auto uo = static_cast<std::size_t>(o);
            grad.ln_scale[uo] += dyr[o] * xhat[o];
            grad.ln_offset[uo] += dyr[o];
            dxhat[o] = dyr[o] * block.ln_scale[uo];
            m1 += dxhat[o];
            m2 += dxhat[o] * xhat[o];
        }
        m1 /= out;
        m2 /= out;
        for (int o = 0; o < out; ++o) dh2[o] = h2[o] > 0.0 ? inv * (dxhat[o] - m1 - xhat[o] * m2) : 0.0;

        std::fill(dh1, dh1 + hidden, 0.0);
        for (int o = 0; o < out; ++o)
        {
            if (dh2[o] == 0.0) continue;
            const double *w = block.output.weight.data() + static_cast<std::size_t>(o) * hidden;
            double *gw = grad.output.weight.data() + static_cast<std::size_t>(o) * hidden;
            grad.output.bias[static_cast<std::size_t>(o)] += dh2[o];
            for (int i = 0; i < hidden; ++i)
            {
                gw[i] += dh2[o] * h1[i];
                dh1[i] += w[i] * dh2[o];
            }
        }
        for (int i = 0; i < hidden; ++i)
            if (h1[i] <= 0.0) dh1[i] = 0.0;

        double *dxr = dx ? dx + static_cast<std::size_t>(r) * in : nullptr;
        if (dxr) std::fill(dxr, dxr + in, 0.0);
        for (int h = 0; h < hidden; ++h)
        {
            if (dh1[h] == 0.0) continue;
            const double *w = block.hidden.weight.data() + static_cast<std::size_t>(h) * in;
            double *gw = grad.hidden.weight.data() + static_cast<std::size_t>(h) * in;
            grad.hidden.bias[static_cast<std::size_t>(h)] += dh1[h];
            for (int j = 0; j < in; ++j) gw[j] += dh1[h] * x[j];
            if (dxr)
                for (int j = 0; j < in; ++j) dxr[j] += w[j] * dh1[h];
        }
    }
}

struct Topology
{
    int num_nodes = 0;
    int num_edges = 0;
    const int *senders = nullptr;
    const int *receivers = nullptr;
};

struct StepTape
{
    // Core inputs, row-major.
    std::vector<double> edge_in, node_in, global_in;
    int edge_width = 0, node_width = 0, global_width = 0;
    MlpTape edge, node, global;
    std::vector<double> aggregate;  // nodes x edge-output width
};

void require_width(const MlpBlock &block, int expected, const char *what)
{
    if (block.input_width() != expected)
        throw Error(std::string("width mismatch in ") + what + " block: expects " +
                    std::to_string(block.input_width()) + ", got " + std::to_string(expected));
}

// Runs one GN block on the inputs already stored in `t`.
void core_forward(const BlockSet &blocks, const Topology &topo, StepTape &t)
{
    const int ew = t.edge_width;
    const int nw = t.node_width;
    const int gw = t.global_width;
    const int le = blocks.edge.output_width();
    const int ln = blocks.node.output_width();
    require_width(blocks.edge, ew + 2 * nw + gw, "edge");
    require_width(blocks.node, le + nw + gw, "node");
    require_width(blocks.global, le + ln + gw, "global");

    t.edge.shape(blocks.edge, topo.num_edges);
    for (int e = 0; e < topo.num_edges; ++e)
    {
        double *x = t.edge.x_row(e);
        const auto r = static_cast<std::size_t>(topo.receivers[e]);
        const auto s = static_cast<std::size_t>(topo.senders[e]);
        x = std::copy_n(t.edge_in.data() + static_cast<std::size_t>(e) * ew, ew, x);
        x = std::copy_n(t.node_in.data() + r * nw, nw, x);
        x = std::copy_n(t.node_in.data() + s * nw, nw, x);
        std::copy_n(t.global_in.data(), gw, x);
    }
    mlp_forward(blocks.edge, t.edge);

    t.aggregate.assign(static_cast<std::size_t>(topo.num_nodes) * le, 0.0);
    for (int e = 0; e < topo.num_edges; ++e)
    {
        double *agg = t.aggregate.data() + static_cast<std::size_t>(topo.receivers[e]) * le;
        const double *y = t.edge.y_row(e);
        for (int i = 0; i < le; ++i) agg[i] += y[i];
    }

    t.node.shape(blocks.node, topo.num_nodes);
    for (int v = 0; v < topo.num_nodes; ++v)
    {
        double *x = t.node.x_row(v);
        x = std::copy_n(t.aggregate.data() + static_cast<std::size_t>(v) * le, le, x);
        x = std::copy_n(t.node_in.data() + static_cast<std::size_t>(v) * nw, nw, x);
        std::copy_n(t.global_in.data(), gw, x);
    }
    mlp_forward(blocks.node, t.node);

    t.global.shape(blocks.global, 1);
    double *x = t.global.x_row(0);
    std::fill(x, x + le + ln, 0.0);
    for (int e = 0; e < topo.num_edges; ++e)
        for (int i = 0; i < le; ++i) x[i] += t.edge.y_row(e)[i];
    for (int v = 0; v < topo.num_nodes; ++v)
        for (int i = 0; i < ln; ++i) x[le + i] += t.node.y_row(v)[i];
    std::copy_n(t.global_in.data(), gw, x + le + ln);
    mlp_forward(blocks.global, t.global);
}

struct CoreGradScratch
{
    std::vector<double> dx_global, dy_node, dx_node, dy_edge, dx_edge;
    Scratch mlp;
};

// Accumulates into d_edge_in / d_node_in / d_global_in (which must be sized).
void core_backward(const BlockSet &blocks,
                   const Topology &topo,
                   const StepTape &t,
                   const double *d_edge_out,
                   const double *d_node_out,
                   const double *d_global_out,
                   BlockSet &grad,
                   double *d_edge_in,
                   double *d_node_in,
                   double *d_global_in,
                   CoreGradScratch &s)
{
    const int ew = t.edge_width;
    const int nw = t.node_width;
    const int gw = t.global_width;
    const int le = blocks.edge.output_width();
    const int ln = blocks.node.output_width();
    const auto V = static_cast<std::size_t>(topo.num_nodes);
    const auto E = static_cast<std::size_t>(topo.num_edges);

    s.dx_global.resize(static_cast<std::size_t>(le + ln + gw));
    mlp_backward(blocks.global, t.global, d_global_out, grad.global, s.dx_global.data(), s.mlp);
    const double *d_sum_edges = s.dx_global.data();
    const double *d_sum_nodes = s.dx_global.data() + le;
    for (int i = 0; i < gw; ++i) d_global_in[i] += s.dx_global[static_cast<std::size_t>(le + ln + i)];

    s.dy_node.resize(V * ln);
    for (std::size_t v = 0; v < V; ++v)
        for (int i = 0; i < ln; ++i) s.dy_node[v * ln + i] = d_node_out[v * ln + i] + d_sum_nodes[i];
    const int node_in = le + nw + gw;
    s.dx_node.resize(V * node_in);
    mlp_backward(blocks.node, t.node, s.dy_node.data(), grad.node, s.dx_node.data(), s.mlp);
    for (std::size_t v = 0; v < V; ++v)
    {
        const double *dx = s.dx_node.data() + v * node_in;
        for (int i = 0; i < nw; ++i) d_node_in[v * nw + i] += dx[le + i];
        for (int i = 0; i < gw; ++i) d_global_in[i] += dx[le + nw + i];
    }

    s.dy_edge.resize(E * le);
    for (std::size_t e = 0; e < E; ++e)
    {
        const double *d_agg = s.dx_node.data() + static_cast<std::size_t>(topo.receivers[e]) * node_in;
        for (int i = 0; i < le; ++i) s.dy_edge[e * le + i] = d_edge_out[e * le + i] + d_sum_edges[i] + d_agg[i];
    }
    const int edge_in = ew + 2 * nw + gw;
    s.dx_edge.resize(E * edge_in);
    mlp_backward(blocks.edge, t.edge, s.dy_edge.data(), grad.edge, s.dx_edge.data(), s.mlp);
    for (std::size_t e = 0; e < E; ++e)
    {
        const double *dx = s.dx_edge.data() + e * edge_in;
        const auto r = static_cast<std::size_t>(topo.receivers[e]);
        const auto snd = static_cast<std::size_t>(topo.senders[e]);
        for (int i = 0; i < ew; ++i) d_edge_in[e * ew + i] += dx[i];
        for (int i = 0; i < nw; ++i) d_node_in[r * nw + i] += dx[ew + i];
        for (int i = 0; i < nw; ++i) d_node_in[snd * nw + i] += dx[ew + nw + i];
        for (int i = 0; i < gw; ++i) d_global_in[i] += dx[ew + 2 * nw + i];
    }
}

void apply_rows(const MlpBlock &block, const std::vector<double> &in, int rows, MlpTape &t)
{
    t.shape(block, rows);
    std::copy(in.begin(), in.end(), t.x.begin());
    mlp_forward(block, t);
}

}  // namespace

std::vector<double> apply_mlp(const MlpBlock &block, std::span<const double> x)
{
    if (static_cast<int>(x.size()) != block.input_width()) throw Error("width mismatch in MLP input");
    MlpTape t;
    t.shape(block, 1);
    std::copy(x.begin(), x.end(), t.x.begin());
    mlp_forward(block, t);
    return t.y;
}

GraphFeatures apply_independent(const GraphFeatures &graph, const BlockSet &blocks)
{
    graph.validate();
    require_width(blocks.edge, graph.edge_width, "edge");
    require_width(blocks.node, graph.node_width, "node");
    require_width(blocks.global, graph.global_width, "global");

    GraphFeatures out;
    out.senders = graph.senders;
    out.receivers = graph.receivers;
    out.edge_width = blocks.edge.output_width();
    out.node_width = blocks.node.output_width();
    out.global_width = blocks.global.output_width();

    MlpTape t;
    apply_rows(blocks.edge, graph.edges, graph.num_edges(), t);
    out.edges = t.y;
    apply_rows(blocks.node, graph.nodes, graph.num_nodes(), t);
    out.nodes = t.y;
    apply_rows(blocks.global, graph.global, 1, t);
    out.global = t.y;
    return out;
}

GraphFeatures gn_block(const GraphFeatures &graph, const BlockSet &blocks)
{
    graph.validate();
    StepTape t;
    t.edge_width = graph.edge_width;
    t.node_width = graph.node_width;
    t.global_width = graph.global_width;
    t.edge_in = graph.edges;
    t.node_in = graph.nodes;
    t.global_in = graph.global;
    const Topology topo{graph.num_nodes(), graph.num_edges(), graph.senders.data(), graph.receivers.data()};
    core_forward(blocks, topo, t);

    GraphFeatures out;
    out.senders = graph.senders;
    out.receivers = graph.receivers;
    out.edge_width = blocks.edge.output_width();
    out.node_width = blocks.node.output_width();
    out.global_width = blocks.global.output_width();
    out.edges = t.edge.y;
    out.nodes = t.node.y;
    out.global = t.global.y;
    return out;
}

// ---------------------------------------------------------------------------
// Whole-model forward / backward.

struct Workspace::Tape
{
    std::vector<int> senders, receivers;
    Topology topo;
    MlpTape enc_edge, enc_node, enc_global;
    std::vector<StepTape> steps;
    std::vector<MlpTape> decoders;
    std::vector<double> outputs;

    CoreGradScratch core_scratch;
    Scratch mlp_scratch;
    std::vector<double> d_enc_edge, d_enc_node, d_enc_global;
    std::vector<double> d_edge, d_node, d_global;
    std::vector<double> d_edge_in, d_node_in, d_global_in;
    std::vector<double> d_decoded, d_decoder_in;
};

Workspace::Workspace() : tape_(std::make_unique<Tape>()) {}
Workspace::~Workspace() = default;
Workspace::Workspace(Workspace &&) noexcept = default;
Workspace &Workspace::operator=(Workspace &&) noexcept = default;

namespace
{

double apply_output(const Dense &d, const double *x)
{
    double acc = d.bias[0];
    for (int i = 0; i < d.in; ++i) acc += d.weight[static_cast<std::size_t>(i)] * x[i];
    return acc;
}

// Builds [encoded | previous] rows for one attribute.
void concat_rows(std::vector<double> &dst, const std::vector<double> &encoded, const std::vector<double> &previous, int rows, int width)
{
    dst.resize(static_cast<std::size_t>(rows) * 2 * width);
    for (int r = 0; r < rows; ++r)
    {
        double *out = dst.data() + static_cast<std::size_t>(r) * 2 * width;
        std::copy_n(encoded.data() + static_cast<std::size_t>(r) * width, width, out);
        std::copy_n(previous.data() + static_cast<std::size_t>(r) * width, width, out + width);
    }
}

void run_forward(const GraphNetModel &model, const GraphFeatures &input, Workspace::Tape &t)
{
    input.validate();
    require_width(model.encoder.edge, input.edge_width, "encoder edge");
    require_width(model.encoder.node, input.node_width, "encoder node");
    require_width(model.encoder.global, input.global_width, "encoder global");

    t.senders = input.senders;
    t.receivers = input.receivers;
    t.topo = {input.num_nodes(), input.num_edges(), t.senders.data(), t.receivers.data()};
    const int L = model.latent_width;
    const int V = t.topo.num_nodes;
    const int E = t.topo.num_edges;

    apply_rows(model.encoder.edge, input.edges, E, t.enc_edge);
    apply_rows(model.encoder.node, input.nodes, V, t.enc_node);
    apply_rows(model.encoder.global, input.global, 1, t.enc_global);

    const int steps = model.num_message_passing_steps;
    const int outputs = std::max(steps, 1);
    t.steps.resize(static_cast<std::size_t>(steps));
    t.decoders.resize(static_cast<std::size_t>(outputs));
    t.outputs.resize(static_cast<std::size_t>(outputs));

    if (steps == 0)
    {
        apply_rows(model.decoder.global, t.enc_global.y, 1, t.decoders[0]);
        t.outputs[0] = apply_output(model.output_transform, t.decoders[0].y.data());
        return;
    }

    for (int k = 0; k < steps; ++k)
    {
        auto &step = t.steps[static_cast<std::size_t>(k)];
        const auto &prev_edge = k == 0 ? t.enc_edge.y : t.steps[static_cast<std::size_t>(k - 1)].edge.y;
        const auto &prev_node = k == 0 ? t.enc_node.y : t.steps[static_cast<std::size_t>(k - 1)].node.y;
        const auto &prev_global = k == 0 ? t.enc_global.y : t.steps[static_cast<std::size_t>(k - 1)].global.y;
        step.edge_width = step.node_width = step.global_width = 2 * L;
        concat_rows(step.edge_in, t.enc_edge.y, prev_edge, E, L);
        concat_rows(step.node_in, t.enc_node.y, prev_node, V, L);
        concat_rows(step.global_in, t.enc_global.y, prev_global, 1, L);
        core_forward(model.core, t.topo, step);

        auto &dec = t.decoders[static_cast<std::size_t>(k)];
        apply_rows(model.decoder.global, step.global.y, 1, dec);
        t.outputs[static_cast<std::size_t>(k)] = apply_output(model.output_transform, dec.y.data());
    }
}

thread_local Workspace tls_workspace;

}  // namespace

double normalize_target(const GraphNetModel &model, double target)
{
    return (target - model.target_mean) / model.target_std;
}

double denormalize(const GraphNetModel &model, double value) { return value * model.target_std + model.target_mean; }

ForwardResult forward(const GraphNetModel &model, const GraphFeatures &input, Workspace &workspace)
{
    auto &t = workspace.tape();
    run_forward(model, input, t);
    return {t.outputs, denormalize(model, t.outputs.back())};
}

ForwardResult forward(const GraphNetModel &model, const GraphFeatures &input)
{
    return forward(model, input, tls_workspace);
}

ForwardResult forward(const GraphNetModel &model, const nas::CellGraph &cell)
{
    return forward(model, encode_cell(cell));
}

double predict(const GraphNetModel &model, const nas::CellGraph &cell) { return forward(model, cell).prediction; }

GraphFeatures decode_graph(const GraphNetModel &model, const nas::CellGraph &cell)
{
    auto &t = tls_workspace.tape();
    run_forward(model, encode_cell(cell), t);
    GraphFeatures latent;
    latent.senders = t.senders;
    latent.receivers = t.receivers;
    latent.edge_width = latent.node_width = latent.global_width = model.latent_width;
    if (t.steps.empty())
    {
        latent.edges = t.enc_edge.y;
        latent.nodes = t.enc_node.y;
        latent.global = t.enc_global.y;
    }
    else
    {
        latent.edges = t.steps.back().edge.y;
        latent.nodes = t.steps.back().node.y;
        latent.global = t.steps.back().global.y;
    }
    return apply_independent(latent, model.decoder);
}

double loss(std::span<const double> step_outputs, double normalized_target)
{
    if (step_outputs.empty()) throw Error("loss needs at least one step output");
    double sum = 0.0;
    for (double p : step_outputs) sum += (p - normalized_target) * (p - normalized_target);
    return sum / static_cast<double>(step_outputs.size());
}

double accumulate_gradients(const GraphNetModel &model,
                            const GraphFeatures &input,
                            double target,
                            GraphNetModel &grad,
                            Workspace &workspace)
{
    auto &t = workspace.tape();
    run_forward(model, input, t);

    const double y = normalize_target(model, target);
    const double result = loss(t.outputs, y);

    const int L = model.latent_width;
    const auto V = static_cast<std::size_t>(t.topo.num_nodes);
    const auto E = static_cast<std::size_t>(t.topo.num_edges);
    const auto UL = static_cast<std::size_t>(L);
    const int steps = model.num_message_passing_steps;
    const double scale = 2.0 / static_cast<double>(t.outputs.size());

    t.d_enc_edge.assign(E * UL, 0.0);
    t.d_enc_node.assign(V * UL, 0.0);
    t.d_enc_global.assign(UL, 0.0);
    t.d_edge.assign(E * UL, 0.0);
    t.d_node.assign(V * UL, 0.0);
    t.d_global.assign(UL, 0.0);
    t.d_decoded.resize(UL);
    t.d_decoder_in.resize(UL);

    // Output head of step k: d loss / d(decoder input) accumulated into `into`.
    auto head_backward = [&](std::size_t k, std::vector<double> &into) {
        const double d_out = scale * (t.outputs[k] - y);
        const auto &dec = t.decoders[k];
        for (std::size_t i = 0; i < UL; ++i)
        {
            grad.output_transform.weight[i] += d_out * dec.y[i];
            t.d_decoded[i] = d_out * model.output_transform.weight[i];
        }
        grad.output_transform.bias[0] += d_out;
        mlp_backward(model.decoder.global, dec, t.d_decoded.data(), grad.decoder.global, t.d_decoder_in.data(), t.mlp_scratch);
        for (std::size_t i = 0; i < UL; ++i) into[i] += t.d_decoder_in[i];
    };

    if (steps == 0)
    {
        head_backward(0, t.d_enc_global);
    }
    else
    {
        for (int k = steps - 1; k >= 0; --k)
        {
            const auto uk = static_cast<std::size_t>(k);
            head_backward(uk, t.d_global);

            t.d_edge_in.assign(E * 2 * UL, 0.0);
            t.d_node_in.assign(V * 2 * UL, 0.0);
            t.d_global_in.assign(2 * UL, 0.0);
            core_backward(model.core,
                          t.topo,
                          t.steps[uk],
                          t.d_edge.data(),
                          t.d_node.data(),
                          t.d_global.data(),
                          grad.core,
                          t.d_edge_in.data(),
                          t.d_node_in.data(),
                          t.d_global_in.data(),
                          t.core_scratch);

            // First half of every core input is the encoder output; the
            // second half is the previous latent (the encoder output at k=0).
            auto split = [&](const std::vector<double> &d_in, std::size_t rows, std::vector<double> &d_enc, std::vector<double> &d_prev) {
                for (std::size_t r = 0; r < rows; ++r)
                    for (std::size_t i = 0; i < UL; ++i)
                    {
                        d_enc[r * UL + i] += d_in[r * 2 * UL + i];
                        d_prev[r * UL + i] = d_in[r * 2 * UL + UL + i];
                    }
            };
            split(t.d_edge_in, E, t.d_enc_edge, t.d_edge);
            split(t.d_node_in, V, t.d_enc_node, t.d_node);
            split(t.d_global_in, 1, t.d_enc_global, t.d_global);
            if (k == 0)
            {
                for (std::size_t i = 0; i < E * UL; ++i) t.d_enc_edge[i] += t.d_edge[i];
                for (std::size_t i = 0; i < V * UL; ++i) t.d_enc_node[i] += t.d_node[i];
                for (std::size_t i = 0; i < UL; ++i) t.d_enc_global[i] += t.d_global[i];
            }
        }
    }

    mlp_backward(model.encoder.edge, t.enc_edge, t.d_enc_edge.data(), grad.encoder.edge, nullptr, t.mlp_scratch);
    mlp_backward(model.encoder.node, t.enc_node, t.d_enc_node.data(), grad.encoder.node, nullptr, t.mlp_scratch);
    mlp_backward(model.encoder.global, t.enc_global, t.d_enc_global.data(), grad.encoder.global, nullptr, t.mlp_scratch);
    return result;
}

GraphNetModel backward(const GraphNetModel &model, const nas::CellGraph &cell, double target)
{
    GraphNetModel grad = zeros_like(model);
    accumulate_gradients(model, encode_cell(cell), target, grad, tls_workspace);
    return grad;
}

}  // namespace edgeperf::gnn
