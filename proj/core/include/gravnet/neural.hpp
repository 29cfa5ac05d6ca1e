#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "gravnet/matrix.hpp"
#include "gravnet/rng.hpp"

namespace gravnet {

// y = tanh(x W^T + b). W is out x in.
struct DenseLayer {
    Matrix weight;
    std::vector<double> bias;
};

// Tanh after every layer.
struct MlpParams {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const { return layers.front().weight.cols; }
    std::size_t output_dim() const { return layers.back().weight.rows; }
};

struct MlpCache {
    Matrix input;
    std::vector<Matrix> outputs;   // post-tanh activations per layer
};

MlpParams make_mlp(const std::vector<std::size_t>& dims, SplitMix64& rng);
MlpParams zeros_like(const MlpParams& p);

Matrix mlp_forward(const Matrix& x, const MlpParams& params, MlpCache* cache = nullptr);

// Accumulates into `grads` (same shape as params); returns dL/dx.
Matrix mlp_backward(const Matrix& d_out, const MlpParams& params, const MlpCache& cache,
                    MlpParams& grads);

struct LayerNormParams {
    std::vector<double> gamma;   // init 1
    std::vector<double> beta;    // init 0
    double eps = 1e-5;
};

struct LayerNormCache {
    Matrix normalized;            // xhat per row
    std::vector<double> inv_std;  // per row
};

LayerNormParams make_layer_norm(std::size_t width);

// Per-row: (x - mean)/sqrt(var + eps) * gamma + beta, population variance.
Matrix layer_norm(const Matrix& x, const LayerNormParams& params,
                  LayerNormCache* cache = nullptr);

Matrix layer_norm_backward(const Matrix& d_out, const LayerNormParams& params,
                           const LayerNormCache& cache, LayerNormParams& grads);

// Plain affine map y = x W^T + b (no activation); used for output heads.
Matrix linear_forward(const Matrix& x, const Matrix& weight, const std::vector<double>& bias);
Matrix linear_backward(const Matrix& d_out, const Matrix& x, const Matrix& weight,
                       Matrix& d_weight, std::vector<double>& d_bias);

double mse_loss(const Matrix& pred, const Matrix& target);
// dL/dpred for the mean-over-all-entries squared error.
Matrix mse_loss_backward(const Matrix& pred, const Matrix& target);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    AdamConfig config;
    long t = 0;
    // Flat moment buffers, one pair per parameter block, allocated lazily
    // in block-visit order.
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
};

// In-place bias-corrected Adam update of one parameter block. `slot` selects
// the moment buffers; state.t must already be advanced by adam_begin_step.
void adam_begin_step(AdamState& state);
void adam_update_block(AdamState& state, std::size_t slot,
                       std::vector<double>& params, const std::vector<double>& grads);

// Max relative discrepancy between an analytic gradient and central finite
// differences, with denominator max(|analytic|, |numeric|, 1e-8).
double grad_check(const std::function<double(const std::vector<double>&)>& f,
                  const std::vector<double>& params,
                  const std::vector<double>& analytic_grad, double fd_step);

} // namespace gravnet
