#pragma once

#include <cstddef>
#include <vector>

#include "gravnet/vec3.hpp"

namespace gravnet {

struct ParticleSet {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<double> masses;

    std::size_t size() const { return positions.size(); }
};

// Throws std::invalid_argument if the set violates its invariants
// (mismatched lengths, empty, non-positive mass, non-finite values).
void validate(const ParticleSet& state);

struct PhysicsParams {
    double dt = 1e-4;
    double G = 4.5e-6;
    double eps = 0.05;   // Plummer softening length
    std::size_t steps = 1000;
};

struct Frame {
    std::vector<Vec3> positions;
    std::vector<Vec3> velocities;
    std::vector<Vec3> accelerations;
};

// Frames recorded after each step; the initial condition is kept separately
// so labelled data pairs frame t's positions with frame t's accelerations.
struct Trace {
    ParticleSet initial;
    std::vector<Vec3> initial_accelerations;   // the pre-loop force evaluation
    std::vector<double> masses;
    std::vector<Frame> frames;
};

// Softened pairwise gravity: a_i = G * sum_{j != i} m_j (r_j - r_i) / (|r_j - r_i|^2 + eps^2)^{3/2}.
// Parallelizable over the outer index; the per-particle reduction is
// sequential in j so results are bitwise identical for any thread count.
std::vector<Vec3> pairwise_accelerations(const std::vector<Vec3>& positions,
                                         const std::vector<double>& masses,
                                         double G, double eps, int threads = 1);

// One kick-drift-kick step. `accel` must be consistent with state.positions;
// the caller threads accelerations between steps so each step performs
// exactly one force evaluation. Returns the new state and new accelerations.
std::pair<ParticleSet, std::vector<Vec3>> leapfrog_step(const ParticleSet& state,
                                                        const std::vector<Vec3>& accel,
                                                        const PhysicsParams& params,
                                                        int threads = 1);

// Runs params.steps leapfrog steps, storing (R, V, A) after each one.
// Deterministic: identical inputs give a bitwise identical trace.
Trace simulate(const ParticleSet& initial, const PhysicsParams& params, int threads = 1);

// Kinetic plus Plummer-softened potential energy (the potential whose
// gradient is the pairwise acceleration above).
double total_energy(const ParticleSet& state, double G, double eps);

Vec3 total_momentum(const ParticleSet& state);

} // namespace gravnet
