#pragma once

#include <cmath>
#include <vector>

#include "gravnet/physics.hpp"
#include "gravnet/rng.hpp"

namespace testutil {

using gravnet::ParticleSet;
using gravnet::Vec3;

inline ParticleSet random_state(std::size_t n, gravnet::SplitMix64& rng,
                                double box = 2.0, double vel = 0.5) {
    ParticleSet s;
    s.positions.resize(n);
    s.velocities.resize(n);
    s.masses.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        s.positions[i] = {rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-box, box)};
        s.velocities[i] = {rng.uniform(-vel, vel), rng.uniform(-vel, vel), rng.uniform(-vel, vel)};
        s.masses[i] = rng.uniform(0.1, 2.0);
    }
    return s;
}

// Naive double loop over all ordered pairs, written independently of the
// production kernel (different loop nesting, pow instead of sqrt).
inline std::vector<Vec3> oracle_accelerations(const std::vector<Vec3>& pos,
                                              const std::vector<double>& mass,
                                              double G, double eps) {
    const std::size_t n = pos.size();
    std::vector<Vec3> acc(n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            if (i == j) continue;
            const double dx = pos[j].x - pos[i].x;
            const double dy = pos[j].y - pos[i].y;
            const double dz = pos[j].z - pos[i].z;
            const double denom = std::pow(dx * dx + dy * dy + dz * dz + eps * eps, 1.5);
            acc[i].x += G * mass[j] * dx / denom;
            acc[i].y += G * mass[j] * dy / denom;
            acc[i].z += G * mass[j] * dz / denom;
        }
    return acc;
}

inline double oracle_energy(const ParticleSet& s, double G, double eps) {
    double e = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i)
        e += 0.5 * s.masses[i] *
             (s.velocities[i].x * s.velocities[i].x + s.velocities[i].y * s.velocities[i].y +
              s.velocities[i].z * s.velocities[i].z);
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (j <= i) continue;
            const double dx = s.positions[j].x - s.positions[i].x;
            const double dy = s.positions[j].y - s.positions[i].y;
            const double dz = s.positions[j].z - s.positions[i].z;
            e -= G * s.masses[i] * s.masses[j] /
                 std::pow(dx * dx + dy * dy + dz * dz + eps * eps, 0.5);
        }
    return e;
}

// Circular two-body orbit consistent with the softened force law:
// equal masses m at (+-d/2, 0, 0), tangential speed from v^2/r = a(d).
inline ParticleSet circular_binary(double m, double d, double G, double eps) {
    const double a = G * m * d / std::pow(d * d + eps * eps, 1.5);
    const double v = std::sqrt(a * d / 2.0);
    ParticleSet s;
    s.positions = {{-d / 2, 0, 0}, {d / 2, 0, 0}};
    s.velocities = {{0, -v, 0}, {0, v, 0}};
    s.masses = {m, m};
    return s;
}

} // namespace testutil
