#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "gravnet/graph.hpp"
#include "gravnet/neural.hpp"

namespace gravnet {

struct ModelConfig {
    std::size_t d_in = 4;
    std::size_t d = 64;
    std::size_t num_layers = 2;          // L
    std::size_t d_out = 3;
    bool use_edge_encoder = false;
    bool project_back = false;
    uint64_t seed = 0;

    // Width entering layer l: w_0 = d, then doubling unless projected back.
    std::size_t layer_width(std::size_t l) const {
        return project_back ? d : d << l;
    }
    std::size_t final_width() const { return layer_width(num_layers); }
};

struct EdgeConvLayer {
    MlpParams message;            // phi: concat(h_i, h_j - h_i [, z_ij]) -> w
    LayerNormParams norm;         // width 2w, applied to concat(h_i, m_i)
    Matrix proj_weight;           // d x 2w, only when project_back
    std::vector<double> proj_bias;
};

struct ModelParams {
    ModelConfig config;
    MlpParams node_encoder;       // d_in -> d -> d, tanh
    MlpParams edge_encoder;       // 1 -> d -> d, tanh; empty unless enabled
    std::vector<EdgeConvLayer> layers;
    Matrix out_weight;            // d_out x w_L
    std::vector<double> out_bias;
};

ModelParams init_params(const ModelConfig& config);

std::size_t parameter_count(const ModelParams& params);

// Visits every learnable block in a fixed order with a stable name and its
// dims. The same order drives Adam slots and the checkpoint layout.
void for_each_block(ModelParams& params,
                    const std::function<void(const std::string&, std::vector<double>&,
                                             const std::vector<std::size_t>&)>& fn);
void for_each_block(const ModelParams& params,
                    const std::function<void(const std::string&, const std::vector<double>&,
                                             const std::vector<std::size_t>&)>& fn);

Matrix encode_nodes(const Matrix& features, const ModelParams& params);

// z_ij = f_edge(e_ij); throws std::logic_error when the encoder is disabled.
Matrix encode_edges(const std::vector<double>& edge_attrs, const ModelParams& params);

// One message-passing layer on explicit inputs (exposed for unit testing).
// Messages aggregate per destination in ascending source order.
Matrix edge_conv_layer(const Matrix& h,
                       const std::vector<std::pair<uint32_t, uint32_t>>& edges,
                       const Matrix* edge_codes, const EdgeConvLayer& layer,
                       bool project_back);

Matrix model_forward(const FrameGraph& graph, const ModelParams& params);

// Returns (MSE loss vs graph.labels, exact reverse-mode gradients).
std::pair<double, ModelParams> model_backward(const FrameGraph& graph,
                                              const ModelParams& params);

ModelParams zeros_like(const ModelParams& params);

// Self-describing checkpoint: everything a rollout needs.
struct Checkpoint {
    ModelParams params;
    std::size_t history_depth = 0;
    std::size_t k = 8;
    double G = 4.5e-6;
    double eps = 0.05;
    double dt = 1e-4;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace gravnet
