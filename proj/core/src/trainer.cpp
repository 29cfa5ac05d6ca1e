#include "gravnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <numeric>
#include <stdexcept>

#include "gravnet/rng.hpp"

namespace gravnet {

namespace {

void accumulate(ModelParams& into, const ModelParams& other) {
    std::vector<std::vector<double>*> dst;
    for_each_block(into, [&](const std::string&, std::vector<double>& data,
                             const std::vector<std::size_t>&) { dst.push_back(&data); });
    std::size_t i = 0;
    for_each_block(other, [&](const std::string&, const std::vector<double>& data,
                              const std::vector<std::size_t>&) {
        std::vector<double>& d = *dst[i++];
        for (std::size_t j = 0; j < data.size(); ++j) d[j] += data[j];
    });
}

void scale(ModelParams& p, double s) {
    for_each_block(p, [&](const std::string&, std::vector<double>& data,
                          const std::vector<std::size_t>&) {
        for (double& v : data) v *= s;
    });
}

void adam_apply(ModelParams& params, const ModelParams& grads, AdamState& state) {
    adam_begin_step(state);
    std::vector<const std::vector<double>*> g;
    for_each_block(grads, [&](const std::string&, const std::vector<double>& data,
                              const std::vector<std::size_t>&) { g.push_back(&data); });
    std::size_t slot = 0;
    for_each_block(params, [&](const std::string&, std::vector<double>& data,
                               const std::vector<std::size_t>&) {
        adam_update_block(state, slot, data, *g[slot]);
        ++slot;
    });
}

} // namespace

std::pair<ModelParams, TrainHistory> train(const std::vector<FrameGraph>& graphs,
                                           const TrainConfig& config,
                                           const ModelConfig& model_config,
                                           std::ostream* log) {
    if (graphs.empty())
        throw std::invalid_argument("train: empty graph list");
    if (config.epochs < 1 || config.batch_size < 1)
        throw std::invalid_argument("train: epochs and batch_size must be >= 1");
    for (const FrameGraph& g : graphs)
        if (g.node_features.cols != model_config.d_in)
            throw std::invalid_argument("train: graph feature dim does not match model d_in");

    ModelParams params = init_params(model_config);
    AdamState adam;
    adam.config = config.adam;
    SplitMix64 shuffle_rng(config.shuffle_seed);

    TrainHistory history;
    history.epoch_mean_loss.reserve(config.epochs);
    history.epoch_seconds.reserve(config.epochs);

    std::vector<std::size_t> order(graphs.size());
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        const auto t0 = std::chrono::steady_clock::now();
        for (std::size_t i = order.size() - 1; i > 0; --i)
            std::swap(order[i], order[shuffle_rng.next_below(i + 1)]);

        double loss_sum = 0.0;
        for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
            const std::size_t end = std::min(begin + config.batch_size, order.size());
            // Accumulate in ascending graph index so the batch gradient does not
            // depend on the within-batch shuffle order (float addition is not
            // associative).
            std::vector<std::size_t> batch(order.begin() + begin, order.begin() + end);
            std::sort(batch.begin(), batch.end());
            ModelParams grad_sum = zeros_like(params);
            for (std::size_t idx : batch) {
                auto [loss, grads] = model_backward(graphs[idx], params);
                loss_sum += loss;
                accumulate(grad_sum, grads);
            }
            scale(grad_sum, 1.0 / static_cast<double>(end - begin));
            adam_apply(params, grad_sum, adam);
        }

        const double mean_loss = loss_sum / static_cast<double>(graphs.size());
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        history.epoch_mean_loss.push_back(mean_loss);
        history.epoch_seconds.push_back(seconds);
        if (log)
            (*log) << (epoch + 1) << ',' << mean_loss << ',' << seconds << '\n';
    }
    return {std::move(params), std::move(history)};
}

std::vector<double> evaluate_loss(const ModelParams& params,
                                  const std::vector<std::vector<const FrameGraph*>>& scenes) {
    std::vector<double> out;
    out.reserve(scenes.size());
    for (const auto& scene : scenes) {
        if (scene.empty())
            throw std::invalid_argument("evaluate_loss: empty scene group");
        double sum = 0.0;
        for (const FrameGraph* g : scene)
            sum += mse_loss(model_forward(*g, params), g->labels);
        out.push_back(sum / static_cast<double>(scene.size()));
    }
    return out;
}

} // namespace gravnet
