#include "gravnet/rollout.hpp"

#include <algorithm>
#include <chrono>
#include <memory>
#include <stdexcept>

#include "gravnet/graph.hpp"

namespace gravnet {

AccelProvider physics_provider(const std::vector<double>& masses, double G, double eps) {
    return [masses, G, eps](const std::vector<Vec3>& positions) {
        return pairwise_accelerations(positions, masses, G, eps);
    };
}

AccelProvider surrogate_provider(const Checkpoint& ckpt, const std::vector<double>& masses) {
    const std::size_t expected_d_in = 4 + 3 * ckpt.history_depth;
    if (ckpt.params.config.d_in != expected_d_in)
        throw std::invalid_argument(
            "surrogate_provider: model d_in does not match 4 + 3 * history_depth");

    struct State {
        Checkpoint ckpt;
        std::vector<double> masses;
        std::vector<std::vector<Vec3>> past;   // most recent last, at most h entries
    };
    auto state = std::make_shared<State>(State{ckpt, masses, {}});

    return [state](const std::vector<Vec3>& positions) {
        const std::size_t n = positions.size();
        const std::size_t h = state->ckpt.history_depth;

        Matrix features(n, 4 + 3 * h);
        for (std::size_t i = 0; i < n; ++i) {
            double* row = features.row(i);
            row[0] = positions[i].x;
            row[1] = positions[i].y;
            row[2] = positions[i].z;
            row[3] = state->masses[i];
            for (std::size_t back = 1; back <= h; ++back) {
                // Pad early calls by replicating the oldest known position.
                const Vec3& q =
                    state->past.size() >= back
                        ? state->past[state->past.size() - back][i]
                        : (state->past.empty() ? positions[i] : state->past.front()[i]);
                row[4 + 3 * (back - 1) + 0] = q.x;
                row[4 + 3 * (back - 1) + 1] = q.y;
                row[4 + 3 * (back - 1) + 2] = q.z;
            }
        }

        GraphConfig gc;
        gc.k = state->ckpt.k;
        gc.with_edge_attrs = state->ckpt.params.config.use_edge_encoder;
        FrameGraph graph = build_graph(positions, std::move(features), Matrix(n, 3), gc);
        Matrix pred = model_forward(graph, state->ckpt.params);

        if (h > 0) {
            state->past.push_back(positions);
            if (state->past.size() > h)
                state->past.erase(state->past.begin());
        }

        std::vector<Vec3> acc(n);
        for (std::size_t i = 0; i < n; ++i)
            acc[i] = {pred.at(i, 0), pred.at(i, 1), pred.at(i, 2)};
        return acc;
    };
}

Trace rollout(const AccelProvider& provider, const ParticleSet& initial,
              const PhysicsParams& params) {
    validate(initial);
    if (params.steps == 0)
        throw std::invalid_argument("rollout: steps must be >= 1");

    Trace trace;
    trace.initial = initial;
    trace.masses = initial.masses;
    trace.frames.reserve(params.steps);

    const std::size_t n = initial.size();
    ParticleSet state = initial;
    std::vector<Vec3> accel = provider(state.positions);
    trace.initial_accelerations = accel;
    const double half_dt = 0.5 * params.dt;
    for (std::size_t t = 0; t < params.steps; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            state.velocities[i] += half_dt * accel[i];
            state.positions[i] += params.dt * state.velocities[i];
        }
        accel = provider(state.positions);
        for (std::size_t i = 0; i < n; ++i)
            state.velocities[i] += half_dt * accel[i];
        trace.frames.push_back({state.positions, state.velocities, accel});
    }
    return trace;
}

Trace rollout(const Checkpoint& ckpt, const ParticleSet& initial,
              const PhysicsParams& params) {
    return rollout(surrogate_provider(ckpt, initial.masses), initial, params);
}

namespace {

double mse(const std::vector<Vec3>& a, const std::vector<Vec3>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Vec3 d = a[i] - b[i];
        acc += norm2(d);
    }
    return acc / static_cast<double>(3 * a.size());
}

} // namespace

StepErrors rollout_errors(const Trace& pred, const Trace& truth) {
    if (pred.frames.size() != truth.frames.size() ||
        pred.initial.size() != truth.initial.size())
        throw std::invalid_argument("rollout_errors: traces not aligned in N and T");

    StepErrors errors;
    const std::size_t t_count = pred.frames.size();
    errors.mse_pos.reserve(t_count + 1);
    errors.mse_vel.reserve(t_count + 1);
    errors.mse_acc.reserve(t_count + 1);

    // Step 0 is the shared initial condition plus the pre-loop force call.
    errors.mse_pos.push_back(mse(pred.initial.positions, truth.initial.positions));
    errors.mse_vel.push_back(mse(pred.initial.velocities, truth.initial.velocities));
    errors.mse_acc.push_back(mse(pred.initial_accelerations, truth.initial_accelerations));

    for (std::size_t t = 0; t < t_count; ++t) {
        errors.mse_pos.push_back(mse(pred.frames[t].positions, truth.frames[t].positions));
        errors.mse_vel.push_back(mse(pred.frames[t].velocities, truth.frames[t].velocities));
        errors.mse_acc.push_back(
            mse(pred.frames[t].accelerations, truth.frames[t].accelerations));
    }
    return errors;
}

std::vector<double> cumulative_errors(const std::vector<double>& per_step) {
    if (per_step.empty())
        throw std::invalid_argument("cumulative_errors: empty series");
    std::vector<double> out;
    out.reserve(per_step.size());
    double running = 0.0;
    for (double v : per_step) {
        running += v;
        out.push_back(running);
    }
    return out;
}

namespace {

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <typename Fn>
double timed_median(Fn&& fn, std::size_t repetitions) {
    std::vector<double> samples;
    samples.reserve(repetitions);
    for (std::size_t r = 0; r < repetitions; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        samples.push_back(
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    return median_of(std::move(samples));
}

} // namespace

std::vector<SpeedupRow> benchmark_speedup(const Checkpoint& ckpt,
                                          const std::vector<ParticleSet>& scenes,
                                          const PhysicsParams& params,
                                          std::size_t repetitions) {
    if (repetitions < 3)
        throw std::invalid_argument("benchmark_speedup: need repetitions >= 3");

    std::vector<SpeedupRow> rows;
    rows.reserve(scenes.size());
    for (const ParticleSet& scene : scenes) {
        std::size_t classical_frames = 0, surrogate_frames = 0;
        const double t_classical = timed_median(
            [&] { classical_frames = simulate(scene, params).frames.size(); }, repetitions);
        const double t_surrogate = timed_median(
            [&] { surrogate_frames = rollout(ckpt, scene, params).frames.size(); },
            repetitions);
        if (classical_frames != surrogate_frames)
            throw std::logic_error("benchmark_speedup: timed paths produced unequal lengths");
        rows.push_back({scene.size(), t_classical, t_surrogate, t_classical / t_surrogate});
    }
    return rows;
}

} // namespace gravnet
