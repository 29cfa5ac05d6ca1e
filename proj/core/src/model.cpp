#include "gravnet/model.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gravnet/errors.hpp"

namespace gravnet {

namespace {

std::vector<std::size_t> message_dims(const ModelConfig& c, std::size_t w) {
    const std::size_t in = 2 * w + (c.use_edge_encoder ? c.d : 0);
    return {in, w, w};
}

} // namespace

ModelParams init_params(const ModelConfig& config) {
    if (config.d < 1 || config.num_layers < 1 || config.d_out != 3)
        throw std::invalid_argument("init_params: invalid config (need d >= 1, L >= 1, d_out = 3)");

    SplitMix64 rng(config.seed);
    ModelParams p;
    p.config = config;
    p.node_encoder = make_mlp({config.d_in, config.d, config.d}, rng);
    if (config.use_edge_encoder)
        p.edge_encoder = make_mlp({1, config.d, config.d}, rng);

    p.layers.reserve(config.num_layers);
    for (std::size_t l = 0; l < config.num_layers; ++l) {
        const std::size_t w = config.layer_width(l);
        EdgeConvLayer layer;
        layer.message = make_mlp(message_dims(config, w), rng);
        layer.norm = make_layer_norm(2 * w);
        if (config.project_back) {
            layer.proj_weight = Matrix(config.d, 2 * w);
            const double bound = std::sqrt(6.0 / static_cast<double>(3 * w));
            for (double& v : layer.proj_weight.data) v = rng.uniform(-bound, bound);
            layer.proj_bias.assign(config.d, 0.0);
        }
        p.layers.push_back(std::move(layer));
    }

    const std::size_t w_final = config.final_width();
    p.out_weight = Matrix(config.d_out, w_final);
    const double bound = std::sqrt(6.0 / static_cast<double>(w_final + config.d_out));
    for (double& v : p.out_weight.data) v = rng.uniform(-bound, bound);
    p.out_bias.assign(config.d_out, 0.0);
    return p;
}

namespace {

template <typename Params, typename Fn>
void visit_blocks(Params& p, const Fn& fn) {
    auto visit_mlp = [&](auto& mlp, const std::string& prefix) {
        for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
            auto& layer = mlp.layers[l];
            fn(prefix + "." + std::to_string(l) + ".weight", layer.weight.data,
               std::vector<std::size_t>{layer.weight.rows, layer.weight.cols});
            fn(prefix + "." + std::to_string(l) + ".bias", layer.bias,
               std::vector<std::size_t>{layer.bias.size()});
        }
    };
    visit_mlp(p.node_encoder, "node_encoder");
    if (p.config.use_edge_encoder)
        visit_mlp(p.edge_encoder, "edge_encoder");
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const std::string prefix = "layer" + std::to_string(l);
        auto& layer = p.layers[l];
        visit_mlp(layer.message, prefix + ".message");
        fn(prefix + ".norm.gamma", layer.norm.gamma,
           std::vector<std::size_t>{layer.norm.gamma.size()});
        fn(prefix + ".norm.beta", layer.norm.beta,
           std::vector<std::size_t>{layer.norm.beta.size()});
        if (p.config.project_back) {
            fn(prefix + ".proj.weight", layer.proj_weight.data,
               std::vector<std::size_t>{layer.proj_weight.rows, layer.proj_weight.cols});
            fn(prefix + ".proj.bias", layer.proj_bias,
               std::vector<std::size_t>{layer.proj_bias.size()});
        }
    }
    fn("out.weight", p.out_weight.data,
       std::vector<std::size_t>{p.out_weight.rows, p.out_weight.cols});
    fn("out.bias", p.out_bias, std::vector<std::size_t>{p.out_bias.size()});
}

} // namespace

void for_each_block(ModelParams& params,
                    const std::function<void(const std::string&, std::vector<double>&,
                                             const std::vector<std::size_t>&)>& fn) {
    visit_blocks(params, fn);
}

void for_each_block(const ModelParams& params,
                    const std::function<void(const std::string&, const std::vector<double>&,
                                             const std::vector<std::size_t>&)>& fn) {
    visit_blocks(params, fn);
}

std::size_t parameter_count(const ModelParams& params) {
    std::size_t count = 0;
    for_each_block(params, [&](const std::string&, const std::vector<double>& data,
                               const std::vector<std::size_t>&) { count += data.size(); });
    return count;
}

ModelParams zeros_like(const ModelParams& params) {
    ModelParams z = params;
    for_each_block(z, [](const std::string&, std::vector<double>& data,
                         const std::vector<std::size_t>&) {
        std::fill(data.begin(), data.end(), 0.0);
    });
    return z;
}

Matrix encode_nodes(const Matrix& features, const ModelParams& params) {
    return mlp_forward(features, params.node_encoder);
}

Matrix encode_edges(const std::vector<double>& edge_attrs, const ModelParams& params) {
    if (!params.config.use_edge_encoder)
        throw std::logic_error("encode_edges: edge encoder is disabled in this config");
    Matrix attrs(edge_attrs.size(), 1);
    attrs.data = edge_attrs;
    return mlp_forward(attrs, params.edge_encoder);
}

namespace {

// Edge indices sorted by (dst, src): aggregation order for each destination
// is ascending source index, so sums are bitwise deterministic.
std::vector<std::size_t> aggregation_order(
    const std::vector<std::pair<uint32_t, uint32_t>>& edges) {
    std::vector<std::size_t> order(edges.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return edges[a].second < edges[b].second ||
               (edges[a].second == edges[b].second && edges[a].first < edges[b].first);
    });
    return order;
}

struct LayerCache {
    Matrix msg_in;
    MlpCache message_cache;
    Matrix ln_out;       // input to the optional projection
    LayerNormCache ln_cache;
};

struct ForwardCache {
    MlpCache encoder_cache;
    MlpCache edge_encoder_cache;
    std::vector<std::size_t> agg_order;
    std::vector<LayerCache> layers;
    Matrix h_final;
};

Matrix layer_forward(const Matrix& h,
                     const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                     const std::vector<std::size_t>& agg_order,
                     const Matrix* edge_codes, const EdgeConvLayer& layer,
                     bool project_back, LayerCache* cache) {
    const std::size_t n = h.rows;
    const std::size_t w = h.cols;
    const std::size_t e_count = edges.size();
    const std::size_t extra = edge_codes ? edge_codes->cols : 0;

    Matrix msg_in(e_count, 2 * w + extra);
    for (std::size_t e = 0; e < e_count; ++e) {
        const double* hi = h.row(edges[e].second);
        const double* hj = h.row(edges[e].first);
        double* row = msg_in.row(e);
        for (std::size_t c = 0; c < w; ++c) {
            row[c] = hi[c];
            row[w + c] = hj[c] - hi[c];
        }
        if (edge_codes)
            std::memcpy(row + 2 * w, edge_codes->row(e), extra * sizeof(double));
    }

    MlpCache local_cache;
    MlpCache* mc = cache ? &cache->message_cache : &local_cache;
    Matrix messages = mlp_forward(msg_in, layer.message, mc);
    if (cache) cache->msg_in = std::move(msg_in);

    Matrix concat(n, 2 * w);
    for (std::size_t i = 0; i < n; ++i)
        std::memcpy(concat.row(i), h.row(i), w * sizeof(double));
    for (std::size_t e : agg_order) {
        double* m = concat.row(edges[e].second) + w;
        const double* msg = messages.row(e);
        for (std::size_t c = 0; c < w; ++c) m[c] += msg[c];
    }

    Matrix normed = layer_norm(concat, layer.norm, cache ? &cache->ln_cache : nullptr);
    if (!project_back) {
        if (cache) cache->ln_out = normed;
        return normed;
    }
    Matrix projected = linear_forward(normed, layer.proj_weight, layer.proj_bias);
    if (cache) cache->ln_out = std::move(normed);
    return projected;
}

Matrix forward_impl(const FrameGraph& graph, const ModelParams& params, ForwardCache* cache) {
    const ModelConfig& c = params.config;
    if (graph.node_features.cols != c.d_in)
        throw std::invalid_argument("model_forward: feature dim does not match config d_in");

    MlpCache local_enc;
    Matrix h = mlp_forward(graph.node_features, params.node_encoder,
                           cache ? &cache->encoder_cache : &local_enc);

    Matrix edge_codes;
    const Matrix* codes = nullptr;
    if (c.use_edge_encoder) {
        if (graph.edge_attrs.size() != graph.edges.size())
            throw std::invalid_argument("model_forward: edge encoder enabled but graph has no edge attrs");
        Matrix attrs(graph.edge_attrs.size(), 1);
        attrs.data = graph.edge_attrs;
        MlpCache local_edge;
        edge_codes = mlp_forward(attrs, params.edge_encoder,
                                 cache ? &cache->edge_encoder_cache : &local_edge);
        codes = &edge_codes;
    }

    const auto agg_order = aggregation_order(graph.edges);
    if (cache) {
        cache->agg_order = agg_order;
        cache->layers.resize(params.layers.size());
    }
    for (std::size_t l = 0; l < params.layers.size(); ++l)
        h = layer_forward(h, graph.edges, agg_order, codes, params.layers[l],
                          c.project_back, cache ? &cache->layers[l] : nullptr);

    if (cache) cache->h_final = h;
    return linear_forward(h, params.out_weight, params.out_bias);
}

} // namespace

Matrix edge_conv_layer(const Matrix& h,
                       const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                       const Matrix* edge_codes, const EdgeConvLayer& layer,
                       bool project_back) {
    return layer_forward(h, edges, aggregation_order(edges), edge_codes, layer,
                         project_back, nullptr);
}

Matrix model_forward(const FrameGraph& graph, const ModelParams& params) {
    return forward_impl(graph, params, nullptr);
}

std::pair<double, ModelParams> model_backward(const FrameGraph& graph,
                                              const ModelParams& params) {
    const ModelConfig& c = params.config;
    ForwardCache cache;
    Matrix pred = forward_impl(graph, params, &cache);
    const double loss = mse_loss(pred, graph.labels);

    ModelParams grads = zeros_like(params);
    Matrix d = mse_loss_backward(pred, graph.labels);
    d = linear_backward(d, cache.h_final, params.out_weight, grads.out_weight, grads.out_bias);

    Matrix d_edge_codes;
    const bool with_codes = c.use_edge_encoder;
    if (with_codes)
        d_edge_codes = Matrix(graph.edges.size(), c.d);

    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const EdgeConvLayer& layer = params.layers[l];
        LayerCache& lc = cache.layers[l];
        const std::size_t w = layer.norm.gamma.size() / 2;

        Matrix d_normed = c.project_back
                              ? linear_backward(d, lc.ln_out, layer.proj_weight,
                                                grads.layers[l].proj_weight,
                                                grads.layers[l].proj_bias)
                              : std::move(d);
        Matrix d_concat =
            layer_norm_backward(d_normed, layer.norm, lc.ln_cache, grads.layers[l].norm);

        const std::size_t n = d_concat.rows;
        Matrix d_h(n, w);
        Matrix d_messages(graph.edges.size(), w);
        for (std::size_t i = 0; i < n; ++i)
            std::memcpy(d_h.row(i), d_concat.row(i), w * sizeof(double));
        for (std::size_t e = 0; e < graph.edges.size(); ++e)
            std::memcpy(d_messages.row(e), d_concat.row(graph.edges[e].second) + w,
                        w * sizeof(double));

        Matrix d_msg_in = mlp_backward(d_messages, layer.message, lc.message_cache,
                                       grads.layers[l].message);
        for (std::size_t e = 0; e < graph.edges.size(); ++e) {
            const double* row = d_msg_in.row(e);
            double* di = d_h.row(graph.edges[e].second);
            double* dj = d_h.row(graph.edges[e].first);
            for (std::size_t col = 0; col < w; ++col) {
                di[col] += row[col] - row[w + col];
                dj[col] += row[w + col];
            }
            if (with_codes) {
                double* dz = d_edge_codes.row(e);
                for (std::size_t col = 0; col < c.d; ++col) dz[col] += row[2 * w + col];
            }
        }
        d = std::move(d_h);
    }

    mlp_backward(d, params.node_encoder, cache.encoder_cache, grads.node_encoder);
    if (with_codes)
        mlp_backward(d_edge_codes, params.edge_encoder, cache.edge_encoder_cache,
                     grads.edge_encoder);
    return {loss, std::move(grads)};
}

// ---------------------------------------------------------------------------
// Checkpoint I/O ("NBDM")

namespace {

constexpr char kMagic[4] = {'N', 'B', 'D', 'M'};
constexpr uint32_t kVersion = 1;

template <typename T>
void write_pod(std::ofstream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

struct Reader {
    std::ifstream in;
    std::size_t offset = 0;

    void read_bytes(void* p, std::size_t n, const char* what) {
        in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw FormatError(std::string("truncated checkpoint while reading ") + what, offset);
        offset += n;
    }

    template <typename T>
    T read_pod(const char* what) {
        T v;
        read_bytes(&v, sizeof(T), what);
        return v;
    }
};

} // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("save_checkpoint: cannot open " + tmp);
        const ModelConfig& c = ckpt.params.config;
        out.write(kMagic, 4);
        write_pod(out, kVersion);
        write_pod(out, static_cast<uint32_t>(c.d_in));
        write_pod(out, static_cast<uint32_t>(c.d));
        write_pod(out, static_cast<uint32_t>(c.num_layers));
        write_pod(out, static_cast<uint32_t>(c.d_out));
        write_pod(out, static_cast<uint8_t>(c.use_edge_encoder ? 1 : 0));
        write_pod(out, static_cast<uint8_t>(c.project_back ? 1 : 0));
        write_pod(out, static_cast<uint32_t>(ckpt.history_depth));
        write_pod(out, static_cast<uint32_t>(ckpt.k));
        write_pod(out, ckpt.G);
        write_pod(out, ckpt.eps);
        write_pod(out, ckpt.dt);

        uint32_t block_count = 0;
        for_each_block(ckpt.params, [&](const std::string&, const std::vector<double>&,
                                        const std::vector<std::size_t>&) { ++block_count; });
        write_pod(out, block_count);
        for_each_block(ckpt.params, [&](const std::string& name, const std::vector<double>& data,
                                        const std::vector<std::size_t>& dims) {
            write_pod(out, static_cast<uint16_t>(name.size()));
            out.write(name.data(), static_cast<std::streamsize>(name.size()));
            write_pod(out, static_cast<uint8_t>(dims.size()));
            for (std::size_t dim : dims) write_pod(out, static_cast<uint32_t>(dim));
            out.write(reinterpret_cast<const char*>(data.data()),
                      static_cast<std::streamsize>(data.size() * sizeof(double)));
        });
        if (!out)
            throw std::runtime_error("save_checkpoint: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::string& path) {
    Reader r;
    r.in.open(path, std::ios::binary);
    if (!r.in)
        throw FormatError("cannot open " + path, 0);

    char magic[4];
    r.read_bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic, not an NBDM checkpoint", 0);
    const auto version = r.read_pod<uint32_t>("version");
    if (version != kVersion)
        throw FormatError("unsupported NBDM version " + std::to_string(version), 4);

    ModelConfig config;
    config.d_in = r.read_pod<uint32_t>("d_in");
    config.d = r.read_pod<uint32_t>("d");
    config.num_layers = r.read_pod<uint32_t>("L");
    config.d_out = r.read_pod<uint32_t>("d_out");
    config.use_edge_encoder = r.read_pod<uint8_t>("use_edge_encoder") != 0;
    config.project_back = r.read_pod<uint8_t>("project_back") != 0;

    Checkpoint ckpt;
    ckpt.history_depth = r.read_pod<uint32_t>("history_depth");
    ckpt.k = r.read_pod<uint32_t>("k");
    ckpt.G = r.read_pod<double>("G");
    ckpt.eps = r.read_pod<double>("eps");
    ckpt.dt = r.read_pod<double>("dt");

    ckpt.params = init_params(config);
    const auto block_count = r.read_pod<uint32_t>("block_count");

    uint32_t seen = 0;
    for_each_block(ckpt.params, [&](const std::string& name, std::vector<double>& data,
                                    const std::vector<std::size_t>& dims) {
        if (seen++ >= block_count)
            throw FormatError("checkpoint has fewer blocks than the config implies", r.offset);
        const auto name_len = r.read_pod<uint16_t>("block name length");
        std::string stored(name_len, '\0');
        r.read_bytes(stored.data(), name_len, "block name");
        if (stored != name)
            throw FormatError("unexpected block '" + stored + "', wanted '" + name + "'",
                              r.offset);
        const auto rank = r.read_pod<uint8_t>("block rank");
        if (rank != dims.size())
            throw FormatError("block rank mismatch for " + name, r.offset);
        std::size_t total = 1;
        for (uint8_t i = 0; i < rank; ++i) {
            const auto dim = r.read_pod<uint32_t>("block dim");
            if (dim != dims[i])
                throw FormatError("block dim mismatch for " + name, r.offset);
            total *= dim;
        }
        r.read_bytes(data.data(), total * sizeof(double), "block data");
    });
    if (seen != block_count)
        throw FormatError("checkpoint has more blocks than the config implies", r.offset);
    return ckpt;
}

} // namespace gravnet
