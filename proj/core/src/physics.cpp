#include "gravnet/physics.hpp"

#include <cmath>
#include <stdexcept>
#include <thread>

namespace gravnet {

void validate(const ParticleSet& state) {
    const std::size_t n = state.positions.size();
    if (n == 0)
        throw std::invalid_argument("ParticleSet: empty");
    if (state.velocities.size() != n || state.masses.size() != n)
        throw std::invalid_argument("ParticleSet: positions/velocities/masses length mismatch");
    for (std::size_t i = 0; i < n; ++i) {
        if (!(state.masses[i] > 0.0) || !std::isfinite(state.masses[i]))
            throw std::invalid_argument("ParticleSet: masses must be positive and finite");
        if (!is_finite(state.positions[i]) || !is_finite(state.velocities[i]))
            throw std::invalid_argument("ParticleSet: non-finite position or velocity");
    }
}

namespace {

void accel_range(const std::vector<Vec3>& positions, const std::vector<double>& masses,
                 double G, double eps2, std::size_t begin, std::size_t end,
                 std::vector<Vec3>& out) {
    const std::size_t n = positions.size();
    for (std::size_t i = begin; i < end; ++i) {
        Vec3 a{};
        const Vec3 ri = positions[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec3 d = positions[j] - ri;
            const double r2 = norm2(d) + eps2;
            const double inv = 1.0 / (r2 * std::sqrt(r2));
            a += (masses[j] * inv) * d;
        }
        out[i] = G * a;
    }
}

} // namespace

std::vector<Vec3> pairwise_accelerations(const std::vector<Vec3>& positions,
                                         const std::vector<double>& masses,
                                         double G, double eps, int threads) {
    const std::size_t n = positions.size();
    if (n == 0 || masses.size() != n)
        throw std::invalid_argument("pairwise_accelerations: length mismatch or empty input");
    if (eps < 0.0)
        throw std::invalid_argument("pairwise_accelerations: eps must be >= 0");

    const double eps2 = eps * eps;
    std::vector<Vec3> acc(n);

    if (threads <= 1 || n < 256) {
        accel_range(positions, masses, G, eps2, 0, n, acc);
    } else {
        const std::size_t nt = std::min<std::size_t>(threads, n);
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (std::size_t w = 0; w < nt; ++w) {
            const std::size_t b = n * w / nt;
            const std::size_t e = n * (w + 1) / nt;
            pool.emplace_back(accel_range, std::cref(positions), std::cref(masses),
                              G, eps2, b, e, std::ref(acc));
        }
        for (auto& t : pool) t.join();
    }

    for (const Vec3& a : acc)
        if (!is_finite(a))
            throw std::domain_error(
                "pairwise_accelerations: non-finite acceleration (overlapping particles with eps = 0?)");
    return acc;
}

std::pair<ParticleSet, std::vector<Vec3>> leapfrog_step(const ParticleSet& state,
                                                        const std::vector<Vec3>& accel,
                                                        const PhysicsParams& params,
                                                        int threads) {
    const std::size_t n = state.size();
    if (accel.size() != n)
        throw std::invalid_argument("leapfrog_step: accel length mismatch");

    ParticleSet next = state;
    const double half_dt = 0.5 * params.dt;
    for (std::size_t i = 0; i < n; ++i) {
        next.velocities[i] += half_dt * accel[i];
        next.positions[i] += params.dt * next.velocities[i];
    }
    std::vector<Vec3> new_accel =
        pairwise_accelerations(next.positions, next.masses, params.G, params.eps, threads);
    for (std::size_t i = 0; i < n; ++i)
        next.velocities[i] += half_dt * new_accel[i];
    return {std::move(next), std::move(new_accel)};
}

Trace simulate(const ParticleSet& initial, const PhysicsParams& params, int threads) {
    validate(initial);
    if (params.steps == 0)
        throw std::invalid_argument("simulate: steps must be >= 1");
    if (!(params.dt > 0.0) || !(params.G > 0.0) || params.eps < 0.0)
        throw std::invalid_argument("simulate: invalid physics parameters");

    Trace trace;
    trace.initial = initial;
    trace.masses = initial.masses;
    trace.frames.reserve(params.steps);

    ParticleSet state = initial;
    std::vector<Vec3> accel =
        pairwise_accelerations(state.positions, state.masses, params.G, params.eps, threads);
    trace.initial_accelerations = accel;
    for (std::size_t t = 0; t < params.steps; ++t) {
        auto [next, new_accel] = leapfrog_step(state, accel, params, threads);
        state = std::move(next);
        accel = std::move(new_accel);
        trace.frames.push_back({state.positions, state.velocities, accel});
    }
    return trace;
}

double total_energy(const ParticleSet& state, double G, double eps) {
    const std::size_t n = state.size();
    const double eps2 = eps * eps;
    double kinetic = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        kinetic += 0.5 * state.masses[i] * norm2(state.velocities[i]);
    double potential = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double r2 = norm2(state.positions[j] - state.positions[i]) + eps2;
            potential -= G * state.masses[i] * state.masses[j] / std::sqrt(r2);
        }
    return kinetic + potential;
}

Vec3 total_momentum(const ParticleSet& state) {
    Vec3 p{};
    for (std::size_t i = 0; i < state.size(); ++i)
        p += state.masses[i] * state.velocities[i];
    return p;
}

} // namespace gravnet
