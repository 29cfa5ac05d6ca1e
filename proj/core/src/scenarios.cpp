#include "gravnet/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "gravnet/rng.hpp"

namespace gravnet {

namespace {

constexpr double kArmAmplitude = 0.3;   // radians

// Radii for an exponential surface density exp(-r/h): the radial pdf is
// proportional to r*exp(-r/h), i.e. Gamma(2, h), sampled exactly as the sum
// of two exponentials. Mean radius is 2h.
double sample_disc_radius(SplitMix64& rng, double h) {
    double u1 = rng.next_double();
    double u2 = rng.next_double();
    while (u1 == 0.0) u1 = rng.next_double();
    while (u2 == 0.0) u2 = rng.next_double();
    return -h * (std::log(u1) + std::log(u2));
}

ParticleSet make_disc(std::size_t n, const GalaxyParams& params, Seed seed, bool spiral) {
    if (n < 2)
        throw std::invalid_argument("disc generator: need n >= 2 (black hole + stars)");
    if (!(params.bh_mass_fraction > 0.0) || !(params.bh_mass_fraction < 1.0))
        throw std::invalid_argument("disc generator: bh_mass_fraction must be in (0,1)");
    if (params.arms < 1)
        throw std::invalid_argument("disc generator: arms must be >= 1");

    SplitMix64 rng(seed.value);
    const std::size_t stars = n - 1;
    const double bh_mass = params.bh_mass_fraction * params.total_mass;
    const double star_mass = (params.total_mass - bh_mass) / static_cast<double>(stars);
    const double h = params.radial_scale;

    ParticleSet out;
    out.positions.resize(n);
    out.velocities.resize(n);
    out.masses.resize(n);

    out.positions[0] = {0.0, 0.0, 0.0};
    out.velocities[0] = {0.0, 0.0, 0.0};
    out.masses[0] = bh_mass;

    std::vector<double> radius(stars), azimuth(stars), height(stars);
    for (std::size_t s = 0; s < stars; ++s) {
        radius[s] = sample_disc_radius(rng, h);
        azimuth[s] = rng.uniform(0.0, 2.0 * M_PI);
        height[s] = params.vertical_scale * rng.next_gaussian();
        if (spiral)
            azimuth[s] += kArmAmplitude *
                          std::cos(static_cast<double>(params.arms) *
                                   (azimuth[s] - std::log(radius[s] / h)));
    }

    // Enclosed mass per star: black hole plus stars strictly interior.
    std::vector<std::size_t> order(stars);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return radius[a] < radius[b]; });
    std::vector<double> enclosed(stars);
    for (std::size_t rank = 0; rank < stars; ++rank)
        enclosed[order[rank]] = bh_mass + star_mass * static_cast<double>(rank);

    const double eps2 = params.eps * params.eps;
    for (std::size_t s = 0; s < stars; ++s) {
        const double r = radius[s];
        const double c = std::cos(azimuth[s]);
        const double sn = std::sin(azimuth[s]);
        const double v = std::sqrt(params.G * enclosed[s] / std::sqrt(r * r + eps2));
        out.positions[s + 1] = {r * c, r * sn, height[s]};
        out.velocities[s + 1] = {-v * sn, v * c, 0.0};
        out.masses[s + 1] = star_mass;
    }
    return out;
}

} // namespace

ParticleSet spiral_galaxy(std::size_t n, const GalaxyParams& params, Seed seed) {
    return make_disc(n, params, seed, /*spiral=*/true);
}

ParticleSet disc_3d(std::size_t n, const GalaxyParams& params, Seed seed) {
    return make_disc(n, params, seed, /*spiral=*/false);
}

ParticleSet random_cloud(std::size_t n, double half_width, double total_mass, Seed seed) {
    if (n < 1)
        throw std::invalid_argument("random_cloud: need n >= 1");
    SplitMix64 rng(seed.value);
    ParticleSet out;
    out.positions.resize(n);
    out.velocities.assign(n, Vec3{});
    out.masses.assign(n, total_mass / static_cast<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        out.positions[i] = {rng.uniform(-half_width, half_width),
                            rng.uniform(-half_width, half_width),
                            rng.uniform(-half_width, half_width)};
    return out;
}

ParticleSet multi_disc(std::size_t count, std::size_t n_per_disc,
                       const GalaxyParams& params, double separation, Seed seed) {
    if (count < 2)
        throw std::invalid_argument("multi_disc: need count >= 2");

    ParticleSet out;
    const double x0 = -0.5 * separation * static_cast<double>(count - 1);
    SplitMix64 seeder(seed.value);
    for (std::size_t c = 0; c < count; ++c) {
        ParticleSet disc = disc_3d(n_per_disc, params, Seed{seeder.next_u64()});
        const double xc = x0 + separation * static_cast<double>(c);
        for (Vec3& p : disc.positions) p.x += xc;
        out.positions.insert(out.positions.end(), disc.positions.begin(), disc.positions.end());
        out.velocities.insert(out.velocities.end(), disc.velocities.begin(), disc.velocities.end());
        out.masses.insert(out.masses.end(), disc.masses.begin(), disc.masses.end());
    }
    return out;
}

} // namespace gravnet
