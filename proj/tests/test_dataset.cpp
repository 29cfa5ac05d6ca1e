#include <doctest.h>

#include <stdexcept>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "gravnet/dataset.hpp"
#include "gravnet/errors.hpp"
#include "gravnet/scenarios.hpp"
#include "helpers.hpp"

using namespace gravnet;

namespace {

Trace small_trace(std::size_t n, std::size_t steps, uint64_t seed) {
    SplitMix64 rng(seed);
    auto s = testutil::random_state(n, rng);
    return simulate(s, PhysicsParams{1e-3, 1.0, 0.05, steps});
}

std::string temp_path(const char* name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("feature dimension follows history depth") {
    Trace trace = small_trace(3, 5, 1);
    CHECK(record_simulation(trace, 0).feature_dim() == 4);
    CHECK(record_simulation(trace, 2).feature_dim() == 10);
    CHECK_THROWS_AS(record_simulation(trace, 5), std::invalid_argument);
}

TEST_CASE("history block is the verbatim past positions") {
    Trace trace = small_trace(4, 6, 2);
    SceneDataset scene = record_simulation(trace, 2);
    for (std::size_t t = 2; t < 6; ++t) {
        Matrix f = frame_features(scene, t);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(f.at(i, 4) == trace.frames[t - 1].positions[i].x);
            CHECK(f.at(i, 5) == trace.frames[t - 1].positions[i].y);
            CHECK(f.at(i, 6) == trace.frames[t - 1].positions[i].z);
            CHECK(f.at(i, 7) == trace.frames[t - 2].positions[i].x);
            CHECK(f.at(i, 8) == trace.frames[t - 2].positions[i].y);
            CHECK(f.at(i, 9) == trace.frames[t - 2].positions[i].z);
        }
    }
    // Early frames pad by replicating the earliest available position.
    Matrix f0 = frame_features(scene, 0);
    CHECK(f0.at(1, 4) == trace.frames[0].positions[1].x);
    CHECK(f0.at(1, 7) == trace.frames[0].positions[1].x);
}

TEST_CASE("labels equal the stored accelerations, re-derivable from positions") {
    Trace trace = small_trace(6, 4, 3);
    SceneDataset scene = record_simulation(trace, 0);
    for (std::size_t t = 0; t < 4; ++t) {
        Matrix labels = frame_labels(scene, t);
        auto rederived =
            testutil::oracle_accelerations(scene.positions[t], scene.masses, 1.0, 0.05);
        for (std::size_t i = 0; i < 6; ++i) {
            const double scale = std::max(1e-30, norm(rederived[i]));
            CHECK(std::abs(labels.at(i, 0) - rederived[i].x) <= 1e-12 * scale);
            CHECK(std::abs(labels.at(i, 1) - rederived[i].y) <= 1e-12 * scale);
            CHECK(std::abs(labels.at(i, 2) - rederived[i].z) <= 1e-12 * scale);
        }
    }
}

TEST_CASE("dataset round-trips bitwise") {
    Dataset dataset{1.0, 0.05, 1e-3, {record_simulation(small_trace(3, 5, 4), 0)}};
    const std::string path = temp_path("gravnet_roundtrip.nbds");
    save_dataset(dataset, path);
    Dataset loaded = load_dataset(path);

    CHECK(loaded.G == dataset.G);
    CHECK(loaded.eps == dataset.eps);
    CHECK(loaded.dt == dataset.dt);
    REQUIRE(loaded.scenes.size() == 1);
    const SceneDataset& a = dataset.scenes[0];
    const SceneDataset& b = loaded.scenes[0];
    REQUIRE(b.num_particles() == 3);
    REQUIRE(b.num_frames() == 5);
    for (std::size_t t = 0; t < 5; ++t)
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(a.positions[t][i] == b.positions[t][i]);
            CHECK(a.velocities[t][i] == b.velocities[t][i]);
            CHECK(a.accelerations[t][i] == b.accelerations[t][i]);
        }

    // Double round-trip equals single round-trip byte for byte.
    const std::string path2 = temp_path("gravnet_roundtrip2.nbds");
    save_dataset(loaded, path2);
    std::ifstream f1(path, std::ios::binary), f2(path2, std::ios::binary);
    std::string bytes1((std::istreambuf_iterator<char>(f1)), {});
    std::string bytes2((std::istreambuf_iterator<char>(f2)), {});
    CHECK(bytes1 == bytes2);
    std::remove(path.c_str());
    std::remove(path2.c_str());
}

TEST_CASE("corrupted files are rejected with a format error") {
    const std::string path = temp_path("gravnet_bad.nbds");
    {
        std::ofstream out(path, std::ios::binary);
        out << "XXXX garbage";
    }
    CHECK_THROWS_AS(load_dataset(path), FormatError);

    Dataset dataset{1.0, 0.05, 1e-3, {record_simulation(small_trace(3, 5, 4), 0)}};
    save_dataset(dataset, path);
    // Truncate mid-scene.
    std::filesystem::resize_file(path, std::filesystem::file_size(path) / 2);
    CHECK_THROWS_AS(load_dataset(path), FormatError);
    std::remove(path.c_str());
}

TEST_CASE("60-scene dataset round-trips with the right scene count") {
    Dataset dataset{1.0, 0.05, 1e-3, {}};
    for (int i = 0; i < 60; ++i)
        dataset.scenes.push_back(record_simulation(small_trace(3, 2, 100 + i), 0));
    const std::string path = temp_path("gravnet_60.nbds");
    save_dataset(dataset, path);
    CHECK(load_dataset(path).scenes.size() == 60);
    std::remove(path.c_str());
}

TEST_CASE("train/test split: 90/10 on 60 scenes, leak-free, deterministic") {
    auto [train, test] = split_train_test(60, 0.9, 17);
    CHECK(train.size() == 54);
    CHECK(test.size() == 6);

    std::vector<bool> seen(60, false);
    for (std::size_t idx : train) {
        CHECK(!seen[idx]);
        seen[idx] = true;
    }
    for (std::size_t idx : test) {
        CHECK(!seen[idx]);
        seen[idx] = true;
    }
    for (bool b : seen) CHECK(b);

    auto [train2, test2] = split_train_test(60, 0.9, 17);
    CHECK(train == train2);
    CHECK(test == test2);

    CHECK_THROWS_AS(split_train_test(1, 0.9, 0), std::invalid_argument);
}
