#pragma once

#include <cstdint>

#include "gravnet/physics.hpp"

namespace gravnet {

struct GalaxyParams {
    double total_mass = 1.0;
    double radial_scale = 3.0;
    double vertical_scale = 0.3;
    double bh_mass_fraction = 0.01;
    unsigned arms = 2;
    double G = 4.5e-6;
    double eps = 0.05;   // softening used when assigning circular speeds
};

struct Seed {
    uint64_t value = 0;
};

// Exponential disc with a central black hole and logarithmic spiral arm
// perturbation. Particle 0 is the black hole (at rest at the origin, mass
// bh_mass_fraction * total_mass); the remaining n-1 stars share the rest of
// the mass equally and move on circular orbits set by the enclosed mass.
ParticleSet spiral_galaxy(std::size_t n, const GalaxyParams& params, Seed seed);

// Same disc without the arm perturbation (axisymmetric).
ParticleSet disc_3d(std::size_t n, const GalaxyParams& params, Seed seed);

// Uniform positions in [-half_width, half_width]^3, zero velocities,
// equal masses summing to total_mass.
ParticleSet random_cloud(std::size_t n, double half_width, double total_mass, Seed seed);

// `count` axisymmetric discs, centres on the x axis with spacing
// `separation`, bulk velocities zero.
ParticleSet multi_disc(std::size_t count, std::size_t n_per_disc,
                       const GalaxyParams& params, double separation, Seed seed);

} // namespace gravnet
