#include <doctest.h>

#include <stdexcept>
#include <tuple>

#include <cmath>

#include "gravnet/rollout.hpp"
#include "gravnet/scenarios.hpp"
#include "helpers.hpp"

using namespace gravnet;

TEST_CASE("oracle-stub rollout reproduces simulate bitwise") {
    auto initial = spiral_galaxy(12, GalaxyParams{}, Seed{3});
    PhysicsParams params{1e-4, 4.5e-6, 0.05, 100};

    Trace truth = simulate(initial, params);
    Trace hybrid = rollout(physics_provider(initial.masses, params.G, params.eps),
                           initial, params);

    REQUIRE(hybrid.frames.size() == truth.frames.size());
    for (std::size_t t = 0; t < truth.frames.size(); ++t)
        for (std::size_t i = 0; i < initial.size(); ++i) {
            CHECK(hybrid.frames[t].positions[i] == truth.frames[t].positions[i]);
            CHECK(hybrid.frames[t].velocities[i] == truth.frames[t].velocities[i]);
            CHECK(hybrid.frames[t].accelerations[i] == truth.frames[t].accelerations[i]);
        }

    StepErrors errors = rollout_errors(hybrid, truth);
    for (double v : errors.mse_acc) CHECK(v == 0.0);
}

TEST_CASE("zero model rolls out to uniform drift") {
    SplitMix64 rng(5);
    auto initial = testutil::random_state(6, rng);
    PhysicsParams params{0.01, 1.0, 0.05, 20};

    ModelConfig mc;
    mc.d = 4;
    Checkpoint ckpt{zeros_like(init_params(mc)), 0, 3, params.G, params.eps, params.dt};
    Trace trace = rollout(ckpt, initial, params);

    for (std::size_t t = 0; t < 20; ++t)
        for (std::size_t i = 0; i < 6; ++i) {
            const double steps = static_cast<double>(t + 1);
            const Vec3 want = initial.positions[i] + steps * params.dt * initial.velocities[i];
            CHECK(std::abs(trace.frames[t].positions[i].x - want.x) <= 1e-12);
            CHECK(std::abs(trace.frames[t].positions[i].y - want.y) <= 1e-12);
            CHECK(std::abs(trace.frames[t].positions[i].z - want.z) <= 1e-12);
            CHECK(trace.frames[t].velocities[i] == initial.velocities[i]);
        }
}

TEST_CASE("history features come from the rollout's own past frames") {
    // With history, the surrogate provider must still run and be deterministic.
    SplitMix64 rng(6);
    auto initial = testutil::random_state(5, rng);
    PhysicsParams params{0.01, 1.0, 0.05, 10};

    ModelConfig mc;
    mc.d = 4;
    mc.d_in = 4 + 3 * 2;
    mc.seed = 9;
    Checkpoint ckpt{init_params(mc), 2, 3, params.G, params.eps, params.dt};
    Trace a = rollout(ckpt, initial, params);
    Trace b = rollout(ckpt, initial, params);
    for (std::size_t t = 0; t < 10; ++t)
        for (std::size_t i = 0; i < 5; ++i)
            CHECK(a.frames[t].positions[i] == b.frames[t].positions[i]);

    // d_in inconsistent with history depth is rejected.
    Checkpoint bad = ckpt;
    bad.history_depth = 1;
    CHECK_THROWS_AS(rollout(bad, initial, params), std::invalid_argument);
}

TEST_CASE("rollout_errors on identical and shifted traces") {
    SplitMix64 rng(7);
    auto initial = testutil::random_state(4, rng);
    PhysicsParams params{1e-3, 1.0, 0.05, 15};
    Trace truth = simulate(initial, params);

    StepErrors zero = rollout_errors(truth, truth);
    for (double v : zero.mse_pos) CHECK(v == 0.0);
    for (double v : zero.mse_vel) CHECK(v == 0.0);
    for (double v : zero.mse_acc) CHECK(v == 0.0);

    Trace shifted = truth;
    for (Vec3& p : shifted.initial.positions) p += Vec3{1, 0, 0};
    for (Frame& f : shifted.frames)
        for (Vec3& p : f.positions) p += Vec3{1, 0, 0};
    StepErrors errors = rollout_errors(shifted, truth);
    for (double v : errors.mse_pos) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    for (double v : errors.mse_vel) CHECK(v == 0.0);
    for (double v : errors.mse_acc) CHECK(v == 0.0);
}

TEST_CASE("step-0 position and velocity error is zero for any rollout") {
    auto initial = spiral_galaxy(8, GalaxyParams{}, Seed{11});
    PhysicsParams params{1e-4, 4.5e-6, 0.05, 5};
    Trace truth = simulate(initial, params);

    ModelConfig mc;
    mc.d = 4;
    mc.seed = 12;
    Checkpoint ckpt{init_params(mc), 0, 4, params.G, params.eps, params.dt};
    Trace pred = rollout(ckpt, initial, params);

    StepErrors errors = rollout_errors(pred, truth);
    CHECK(errors.mse_pos[0] == 0.0);
    CHECK(errors.mse_vel[0] == 0.0);
    CHECK(errors.mse_acc[0] > 0.0);   // the model is untrained
}

TEST_CASE("cumulative errors") {
    CHECK(cumulative_errors({0, 0, 0}) == std::vector<double>{0, 0, 0});
    CHECK(cumulative_errors({1, 2, 3}) == std::vector<double>{1, 3, 6});

    SplitMix64 rng(8);
    std::vector<double> series(50);
    for (double& v : series) v = rng.next_double();
    auto cum = cumulative_errors(series);
    for (std::size_t i = 1; i < cum.size(); ++i) CHECK(cum[i] >= cum[i - 1]);
    double plain = 0.0;
    for (double v : series) plain += v;
    CHECK(std::abs(cum.back() - plain) <= 1e-12 * plain);

    CHECK_THROWS_AS(cumulative_errors({}), std::invalid_argument);
}

TEST_CASE("benchmark_speedup sanity") {
    auto initial = spiral_galaxy(6, GalaxyParams{}, Seed{20});
    PhysicsParams params{1e-4, 4.5e-6, 0.05, 5};
    ModelConfig mc;
    mc.d = 4;
    mc.seed = 21;
    Checkpoint ckpt{init_params(mc), 0, 3, params.G, params.eps, params.dt};

    auto rows = benchmark_speedup(ckpt, {initial}, params, 3);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].n == 6);
    CHECK(rows[0].t_classical_s > 0.0);
    CHECK(rows[0].t_surrogate_s > 0.0);
    CHECK(rows[0].speedup > 0.0);

    CHECK_THROWS_AS(benchmark_speedup(ckpt, {initial}, params, 2), std::invalid_argument);
}
