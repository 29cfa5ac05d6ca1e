#include "gravnet/dataset.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "gravnet/errors.hpp"
#include "gravnet/rng.hpp"

namespace gravnet {

SceneDataset record_simulation(const Trace& trace, std::size_t history_depth) {
    const std::size_t t_count = trace.frames.size();
    if (history_depth >= t_count)
        throw std::invalid_argument("record_simulation: history_depth must be < frame count");

    SceneDataset scene;
    scene.masses = trace.masses;
    scene.history_depth = history_depth;
    scene.positions.reserve(t_count);
    scene.velocities.reserve(t_count);
    scene.accelerations.reserve(t_count);
    for (const Frame& f : trace.frames) {
        scene.positions.push_back(f.positions);
        scene.velocities.push_back(f.velocities);
        scene.accelerations.push_back(f.accelerations);
    }
    return scene;
}

Matrix frame_features(const SceneDataset& scene, std::size_t t) {
    if (t >= scene.num_frames())
        throw std::invalid_argument("frame_features: frame index out of range");
    const std::size_t n = scene.num_particles();
    const std::size_t h = scene.history_depth;
    Matrix features(n, 4 + 3 * h);
    for (std::size_t i = 0; i < n; ++i) {
        double* row = features.row(i);
        const Vec3& p = scene.positions[t][i];
        row[0] = p.x;
        row[1] = p.y;
        row[2] = p.z;
        row[3] = scene.masses[i];
        for (std::size_t back = 1; back <= h; ++back) {
            // Pad before the first frame by replicating the earliest position.
            const std::size_t src = (t >= back) ? t - back : 0;
            const Vec3& q = scene.positions[src][i];
            row[4 + 3 * (back - 1) + 0] = q.x;
            row[4 + 3 * (back - 1) + 1] = q.y;
            row[4 + 3 * (back - 1) + 2] = q.z;
        }
    }
    return features;
}

Matrix frame_labels(const SceneDataset& scene, std::size_t t) {
    if (t >= scene.num_frames())
        throw std::invalid_argument("frame_labels: frame index out of range");
    const std::size_t n = scene.num_particles();
    Matrix labels(n, 3);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec3& a = scene.accelerations[t][i];
        labels.at(i, 0) = a.x;
        labels.at(i, 1) = a.y;
        labels.at(i, 2) = a.z;
    }
    return labels;
}

namespace {

constexpr char kMagic[4] = {'N', 'B', 'D', 'S'};
constexpr uint32_t kVersion = 1;

void write_bytes(std::ofstream& out, const void* p, std::size_t n) {
    out.write(reinterpret_cast<const char*>(p), static_cast<std::streamsize>(n));
}

template <typename T>
void write_pod(std::ofstream& out, T v) {
    write_bytes(out, &v, sizeof(T));
}

void write_frames(std::ofstream& out, const std::vector<std::vector<Vec3>>& frames) {
    for (const auto& frame : frames)
        for (const Vec3& v : frame) {
            write_pod(out, v.x);
            write_pod(out, v.y);
            write_pod(out, v.z);
        }
}

struct Reader {
    std::ifstream in;
    std::size_t offset = 0;

    void read_bytes(void* p, std::size_t n, const char* what) {
        in.read(reinterpret_cast<char*>(p), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n)
            throw FormatError(std::string("truncated file while reading ") + what, offset);
        offset += n;
    }

    template <typename T>
    T read_pod(const char* what) {
        T v;
        read_bytes(&v, sizeof(T), what);
        return v;
    }

    std::vector<std::vector<Vec3>> read_frames(std::size_t t, std::size_t n, const char* what) {
        std::vector<std::vector<Vec3>> frames(t);
        for (auto& frame : frames) {
            frame.resize(n);
            read_bytes(frame.data(), n * sizeof(Vec3), what);
        }
        return frames;
    }
};

} // namespace

void save_dataset(const Dataset& dataset, const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("save_dataset: cannot open " + tmp);
        write_bytes(out, kMagic, 4);
        write_pod(out, kVersion);
        write_pod(out, dataset.G);
        write_pod(out, dataset.eps);
        write_pod(out, dataset.dt);
        write_pod(out, static_cast<uint32_t>(dataset.scenes.size()));
        for (const SceneDataset& scene : dataset.scenes) {
            write_pod(out, static_cast<uint32_t>(scene.num_particles()));
            write_pod(out, static_cast<uint32_t>(scene.num_frames()));
            write_bytes(out, scene.masses.data(), scene.masses.size() * sizeof(double));
            write_frames(out, scene.positions);
            write_frames(out, scene.velocities);
            write_frames(out, scene.accelerations);
        }
        if (!out)
            throw std::runtime_error("save_dataset: write failed for " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

Dataset load_dataset(const std::string& path, std::size_t history_depth) {
    Reader r;
    r.in.open(path, std::ios::binary);
    if (!r.in)
        throw FormatError("cannot open " + path, 0);

    char magic[4];
    r.read_bytes(magic, 4, "magic");
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw FormatError("bad magic, not an NBDS dataset", 0);
    const auto version = r.read_pod<uint32_t>("version");
    if (version != kVersion)
        throw FormatError("unsupported NBDS version " + std::to_string(version), 4);

    Dataset dataset;
    dataset.G = r.read_pod<double>("G");
    dataset.eps = r.read_pod<double>("eps");
    dataset.dt = r.read_pod<double>("dt");
    const auto scene_count = r.read_pod<uint32_t>("scene_count");
    dataset.scenes.resize(scene_count);
    for (SceneDataset& scene : dataset.scenes) {
        const auto n = r.read_pod<uint32_t>("N");
        const auto t = r.read_pod<uint32_t>("T");
        if (n == 0 || t == 0)
            throw FormatError("scene with zero particles or frames", r.offset - 8);
        if (history_depth >= t)
            throw std::invalid_argument("load_dataset: history_depth must be < frame count");
        scene.history_depth = history_depth;
        scene.masses.resize(n);
        r.read_bytes(scene.masses.data(), n * sizeof(double), "masses");
        scene.positions = r.read_frames(t, n, "positions");
        scene.velocities = r.read_frames(t, n, "velocities");
        scene.accelerations = r.read_frames(t, n, "accelerations");
    }
    return dataset;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>>
split_train_test(std::size_t scene_count, double train_fraction, uint64_t seed) {
    if (scene_count < 2)
        throw std::invalid_argument("split_train_test: need at least 2 scenes");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0))
        throw std::invalid_argument("split_train_test: train_fraction must be in (0,1)");

    std::vector<std::size_t> order(scene_count);
    std::iota(order.begin(), order.end(), 0);
    SplitMix64 rng(seed);
    for (std::size_t i = scene_count - 1; i > 0; --i)
        std::swap(order[i], order[rng.next_below(i + 1)]);

    const auto train_count = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(scene_count)));
    std::vector<std::size_t> train(order.begin(), order.begin() + train_count);
    std::vector<std::size_t> test(order.begin() + train_count, order.end());
    return {train, test};
}

} // namespace gravnet
