#pragma once

#include <functional>
#include <vector>

#include "gravnet/model.hpp"
#include "gravnet/physics.hpp"

namespace gravnet {

// Acceleration source for the hybrid loop: called with the current positions,
// returns per-particle accelerations. Called once before the loop and once
// per step (after the drift), mirroring the classical integrator exactly, so
// a provider that evaluates the true pairwise force reproduces simulate
// bitwise.
using AccelProvider = std::function<std::vector<Vec3>(const std::vector<Vec3>&)>;

// Exact-physics provider (the oracle stub used to validate the loop wiring).
AccelProvider physics_provider(const std::vector<double>& masses, double G, double eps);

// Surrogate provider: builds a KNN graph from the current positions (history
// features drawn from the provider's own past calls, padded at the start)
// and predicts accelerations with one model forward per call.
AccelProvider surrogate_provider(const Checkpoint& ckpt, const std::vector<double>& masses);

// Kick-drift-kick loop driven by an arbitrary acceleration source.
Trace rollout(const AccelProvider& provider, const ParticleSet& initial,
              const PhysicsParams& params);

Trace rollout(const Checkpoint& ckpt, const ParticleSet& initial,
              const PhysicsParams& params);

struct StepErrors {
    std::vector<double> mse_pos;
    std::vector<double> mse_vel;
    std::vector<double> mse_acc;
};

// Per step t, MSE over all particles and components for each quantity.
StepErrors rollout_errors(const Trace& pred, const Trace& truth);

std::vector<double> cumulative_errors(const std::vector<double>& per_step);

struct SpeedupRow {
    std::size_t n = 0;
    double t_classical_s = 0.0;
    double t_surrogate_s = 0.0;
    double speedup = 0.0;   // t_classical / t_surrogate
};

// Median-of-repetitions wall clock of T full steps for simulate vs rollout
// (graph construction and feature assembly included), per scene.
std::vector<SpeedupRow> benchmark_speedup(const Checkpoint& ckpt,
                                          const std::vector<ParticleSet>& scenes,
                                          const PhysicsParams& params,
                                          std::size_t repetitions);

} // namespace gravnet
