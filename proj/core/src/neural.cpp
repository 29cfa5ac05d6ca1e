#include "gravnet/neural.hpp"

#include <cmath>
#include <stdexcept>

namespace gravnet {

MlpParams make_mlp(const std::vector<std::size_t>& dims, SplitMix64& rng) {
    if (dims.size() < 2)
        throw std::invalid_argument("make_mlp: need at least input and output dims");
    MlpParams p;
    p.layers.reserve(dims.size() - 1);
    for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
        const std::size_t fan_in = dims[l], fan_out = dims[l + 1];
        DenseLayer layer;
        layer.weight = Matrix(fan_out, fan_in);
        const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
        for (double& w : layer.weight.data) w = rng.uniform(-bound, bound);
        layer.bias.assign(fan_out, 0.0);
        p.layers.push_back(std::move(layer));
    }
    return p;
}

MlpParams zeros_like(const MlpParams& p) {
    MlpParams z;
    z.layers.reserve(p.layers.size());
    for (const DenseLayer& l : p.layers)
        z.layers.push_back({Matrix(l.weight.rows, l.weight.cols),
                            std::vector<double>(l.bias.size(), 0.0)});
    return z;
}

Matrix linear_forward(const Matrix& x, const Matrix& weight, const std::vector<double>& bias) {
    if (x.cols != weight.cols || bias.size() != weight.rows)
        throw std::invalid_argument("linear_forward: shape mismatch");
    Matrix y(x.rows, weight.rows);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* xr = x.row(r);
        double* yr = y.row(r);
        for (std::size_t o = 0; o < weight.rows; ++o) yr[o] = bias[o];
        for (std::size_t o = 0; o < weight.rows; ++o) {
            const double* w = weight.row(o);
            double acc = 0.0;
            for (std::size_t c = 0; c < weight.cols; ++c) acc += w[c] * xr[c];
            yr[o] += acc;
        }
    }
    return y;
}

Matrix linear_backward(const Matrix& d_out, const Matrix& x, const Matrix& weight,
                       Matrix& d_weight, std::vector<double>& d_bias) {
    Matrix d_x(x.rows, x.cols);
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* dyr = d_out.row(r);
        const double* xr = x.row(r);
        double* dxr = d_x.row(r);
        for (std::size_t o = 0; o < weight.rows; ++o) {
            const double dy = dyr[o];
            d_bias[o] += dy;
            const double* w = weight.row(o);
            double* dw = d_weight.row(o);
            for (std::size_t c = 0; c < weight.cols; ++c) {
                dw[c] += dy * xr[c];
                dxr[c] += dy * w[c];
            }
        }
    }
    return d_x;
}

Matrix mlp_forward(const Matrix& x, const MlpParams& params, MlpCache* cache) {
    if (x.cols != params.input_dim())
        throw std::invalid_argument("mlp_forward: input dim mismatch");
    if (cache) {
        cache->input = x;
        cache->outputs.clear();
        cache->outputs.reserve(params.layers.size());
    }
    Matrix h = x;
    for (const DenseLayer& layer : params.layers) {
        Matrix y = linear_forward(h, layer.weight, layer.bias);
        for (double& v : y.data) v = std::tanh(v);
        if (cache) cache->outputs.push_back(y);
        h = std::move(y);
    }
    return h;
}

Matrix mlp_backward(const Matrix& d_out, const MlpParams& params, const MlpCache& cache,
                    MlpParams& grads) {
    Matrix d = d_out;
    for (std::size_t l = params.layers.size(); l-- > 0;) {
        const Matrix& y = cache.outputs[l];
        // d(pre-activation) = d * (1 - tanh^2), using the cached tanh output.
        for (std::size_t i = 0; i < d.data.size(); ++i)
            d.data[i] *= 1.0 - y.data[i] * y.data[i];
        const Matrix& input = (l == 0) ? cache.input : cache.outputs[l - 1];
        d = linear_backward(d, input, params.layers[l].weight,
                            grads.layers[l].weight, grads.layers[l].bias);
    }
    return d;
}

LayerNormParams make_layer_norm(std::size_t width) {
    LayerNormParams p;
    p.gamma.assign(width, 1.0);
    p.beta.assign(width, 0.0);
    return p;
}

Matrix layer_norm(const Matrix& x, const LayerNormParams& params, LayerNormCache* cache) {
    const std::size_t w = x.cols;
    if (params.gamma.size() != w || params.beta.size() != w)
        throw std::invalid_argument("layer_norm: width mismatch");
    if (w == 0)
        throw std::invalid_argument("layer_norm: empty rows");
    Matrix y(x.rows, w);
    if (cache) {
        cache->normalized = Matrix(x.rows, w);
        cache->inv_std.assign(x.rows, 0.0);
    }
    for (std::size_t r = 0; r < x.rows; ++r) {
        const double* xr = x.row(r);
        double mean = 0.0;
        for (std::size_t c = 0; c < w; ++c) mean += xr[c];
        mean /= static_cast<double>(w);
        double var = 0.0;
        for (std::size_t c = 0; c < w; ++c) {
            const double d = xr[c] - mean;
            var += d * d;
        }
        var /= static_cast<double>(w);
        const double inv_std = 1.0 / std::sqrt(var + params.eps);
        double* yr = y.row(r);
        for (std::size_t c = 0; c < w; ++c) {
            const double xhat = (xr[c] - mean) * inv_std;
            if (cache) cache->normalized.at(r, c) = xhat;
            yr[c] = xhat * params.gamma[c] + params.beta[c];
        }
        if (cache) cache->inv_std[r] = inv_std;
    }
    return y;
}

Matrix layer_norm_backward(const Matrix& d_out, const LayerNormParams& params,
                           const LayerNormCache& cache, LayerNormParams& grads) {
    const std::size_t w = d_out.cols;
    Matrix d_x(d_out.rows, w);
    for (std::size_t r = 0; r < d_out.rows; ++r) {
        const double* dyr = d_out.row(r);
        const double* xhat = cache.normalized.row(r);
        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
        for (std::size_t c = 0; c < w; ++c) {
            const double dxhat = dyr[c] * params.gamma[c];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat[c];
            grads.gamma[c] += dyr[c] * xhat[c];
            grads.beta[c] += dyr[c];
        }
        const double inv_w = 1.0 / static_cast<double>(w);
        double* dxr = d_x.row(r);
        for (std::size_t c = 0; c < w; ++c) {
            const double dxhat = dyr[c] * params.gamma[c];
            dxr[c] = cache.inv_std[r] *
                     (dxhat - inv_w * sum_dxhat - xhat[c] * inv_w * sum_dxhat_xhat);
        }
    }
    return d_x;
}

double mse_loss(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target))
        throw std::invalid_argument("mse_loss: shape mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < pred.data.size(); ++i) {
        const double d = pred.data[i] - target.data[i];
        acc += d * d;
    }
    return acc / static_cast<double>(pred.data.size());
}

Matrix mse_loss_backward(const Matrix& pred, const Matrix& target) {
    if (!pred.same_shape(target))
        throw std::invalid_argument("mse_loss_backward: shape mismatch");
    Matrix d(pred.rows, pred.cols);
    const double scale = 2.0 / static_cast<double>(pred.data.size());
    for (std::size_t i = 0; i < pred.data.size(); ++i)
        d.data[i] = scale * (pred.data[i] - target.data[i]);
    return d;
}

void adam_begin_step(AdamState& state) { ++state.t; }

void adam_update_block(AdamState& state, std::size_t slot,
                       std::vector<double>& params, const std::vector<double>& grads) {
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_update_block: shape mismatch");
    if (state.m.size() <= slot) {
        state.m.resize(slot + 1);
        state.v.resize(slot + 1);
    }
    if (state.m[slot].empty()) {
        state.m[slot].assign(params.size(), 0.0);
        state.v[slot].assign(params.size(), 0.0);
    }
    const AdamConfig& c = state.config;
    const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& m = state.m[slot][i];
        double& v = state.v[slot][i];
        m = c.beta1 * m + (1.0 - c.beta1) * grads[i];
        v = c.beta2 * v + (1.0 - c.beta2) * grads[i] * grads[i];
        params[i] -= c.lr * (m / bc1) / (std::sqrt(v / bc2) + c.eps);
    }
}

double grad_check(const std::function<double(const std::vector<double>&)>& f,
                  const std::vector<double>& params,
                  const std::vector<double>& analytic_grad, double fd_step) {
    if (params.size() != analytic_grad.size())
        throw std::invalid_argument("grad_check: shape mismatch");
    double max_rel = 0.0;
    std::vector<double> probe = params;
    for (std::size_t i = 0; i < params.size(); ++i) {
        probe[i] = params[i] + fd_step;
        const double up = f(probe);
        probe[i] = params[i] - fd_step;
        const double down = f(probe);
        probe[i] = params[i];
        const double numeric = (up - down) / (2.0 * fd_step);
        const double denom = std::max({std::abs(analytic_grad[i]), std::abs(numeric), 1e-8});
        max_rel = std::max(max_rel, std::abs(analytic_grad[i] - numeric) / denom);
    }
    return max_rel;
}

} // namespace gravnet
