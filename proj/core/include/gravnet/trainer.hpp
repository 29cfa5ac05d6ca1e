#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include "gravnet/model.hpp"

namespace gravnet {

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 8;      // graphs per batch
    AdamConfig adam;
    uint64_t shuffle_seed = 0;
    double train_fraction = 0.9;
};

struct TrainHistory {
    std::vector<double> epoch_mean_loss;
    std::vector<double> epoch_seconds;
    std::vector<double> per_scene_test_loss;   // filled by evaluate_loss callers
};

// Algorithm: per epoch, shuffle the graph order, walk it in batches, sum
// per-graph MSE gradients, divide by batch size, Adam step. Deterministic
// given the seeds. Writes one "epoch,mean_loss,seconds" CSV line per epoch
// to `log` when provided.
std::pair<ModelParams, TrainHistory> train(const std::vector<FrameGraph>& graphs,
                                           const TrainConfig& config,
                                           const ModelConfig& model_config,
                                           std::ostream* log = nullptr);

// Mean per-graph MSE within each scene group; no parameter updates.
std::vector<double> evaluate_loss(const ModelParams& params,
                                  const std::vector<std::vector<const FrameGraph*>>& scenes);

} // namespace gravnet
