#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gravnet/matrix.hpp"
#include "gravnet/physics.hpp"

namespace gravnet {

// One simulation's worth of labelled learning data. Arrays are raw
// trajectories; feature matrices are materialized per frame from
// history_depth so one file serves many feature configurations.
struct SceneDataset {
    std::vector<double> masses;          // N
    std::vector<std::vector<Vec3>> positions;       // T frames of N
    std::vector<std::vector<Vec3>> velocities;      // T frames of N
    std::vector<std::vector<Vec3>> accelerations;   // T frames of N
    std::size_t history_depth = 0;       // h, must stay < T

    std::size_t num_frames() const { return positions.size(); }
    std::size_t num_particles() const { return masses.size(); }
    std::size_t feature_dim() const { return 4 + 3 * history_depth; }
};

// All scenes generated under one physics configuration; G/eps/dt travel in
// the file header so labels stay re-derivable from positions alone.
struct Dataset {
    double G = 4.5e-6;
    double eps = 0.05;
    double dt = 1e-4;
    std::vector<SceneDataset> scenes;
};

// Labels for frame t are the stored accelerations of frame t; features are
// [position(t), mass, position(t-1), ..., position(t-h)] with frames before
// the first padded by replicating the earliest available position.
SceneDataset record_simulation(const Trace& trace, std::size_t history_depth);

// N x (4 + 3h) feature matrix for one frame.
Matrix frame_features(const SceneDataset& scene, std::size_t t);

// N x 3 acceleration labels for one frame.
Matrix frame_labels(const SceneDataset& scene, std::size_t t);

// Binary "NBDS" format, little endian, written atomically (temp + rename).
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path, std::size_t history_depth = 0);

// Scene-level split: |train| = round(train_fraction * |scenes|), order
// shuffled deterministically by seed. Returns (train indices, test indices).
std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_train_test(std::size_t scene_count, double train_fraction, uint64_t seed);

} // namespace gravnet
