#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gravnet {

// Every pipeline tunable as one flat record. Defaults are the shipped
// profile (Table-style dimensionless galaxy units).
struct RunConfig {
    // physics
    double dt = 0.0001;
    double G = 4.5e-6;
    double eps = 0.05;
    std::size_t steps = 1000;

    // scenario
    std::string scenario = "spiral";   // spiral | disc | cloud | multidisc
    std::size_t n = 100;
    uint64_t seed = 0;
    double total_mass = 1.0;
    double radial_scale = 3.0;
    double vertical_scale = 0.3;
    double bh_fraction = 0.01;
    unsigned arms = 2;
    double half_width = 3.0;           // cloud
    std::size_t disc_count = 2;        // multidisc
    std::size_t n_per_disc = 50;
    double separation = 10.0;

    // dataset
    std::vector<std::size_t> counts = {3, 25, 50, 100, 250, 500};
    std::size_t scenes_per_count = 10;
    std::size_t history_depth = 0;

    // graph / model
    std::size_t k = 8;
    std::size_t d = 64;
    std::size_t layers = 2;            // L
    bool with_edge_attrs = false;
    bool project_back = false;

    // training
    std::size_t epochs = 100;
    std::size_t batch_size = 8;
    double lr = 1e-3;
    double train_fraction = 0.9;

    int threads = 1;
};

// Parses `key = value` lines (UTF-8, '#' comments). Unknown keys are
// rejected with std::invalid_argument.
RunConfig parse_config_file(const std::string& path, RunConfig base = {});
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

// One line per key: name, default, and whether the value comes from the
// reference experiment profile or is an implementation choice.
std::string config_help();

} // namespace gravnet
