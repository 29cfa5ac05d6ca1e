#include <doctest.h>

#include <stdexcept>
#include <tuple>

#include <cmath>

#include "gravnet/scenarios.hpp"

using namespace gravnet;

namespace {
GalaxyParams table_params() { return {}; }   // struct defaults are the reference profile
}

TEST_CASE("spiral galaxy: mass budget and black hole placement") {
    auto s = spiral_galaxy(100, table_params(), Seed{1});
    CHECK(s.masses[0] == doctest::Approx(0.01).epsilon(1e-14));
    double total = 0.0;
    for (double m : s.masses) total += m;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(s.positions[0] == Vec3{0, 0, 0});
    CHECK(s.velocities[0] == Vec3{0, 0, 0});
}

TEST_CASE("spiral galaxy: deterministic in (n, params, seed)") {
    auto a = spiral_galaxy(50, table_params(), Seed{7});
    auto b = spiral_galaxy(50, table_params(), Seed{7});
    for (std::size_t i = 0; i < 50; ++i) {
        CHECK(a.positions[i] == b.positions[i]);
        CHECK(a.velocities[i] == b.velocities[i]);
        CHECK(a.masses[i] == b.masses[i]);
    }
    auto c = spiral_galaxy(50, table_params(), Seed{8});
    CHECK(!(a.positions[1] == c.positions[1]));
}

TEST_CASE("spiral galaxy: mean cylindrical radius matches the exponential profile") {
    auto s = spiral_galaxy(10001, table_params(), Seed{123});
    double mean_r = 0.0;
    for (std::size_t i = 1; i < s.size(); ++i)
        mean_r += std::hypot(s.positions[i].x, s.positions[i].y);
    mean_r /= 10000.0;
    CHECK(mean_r >= 5.7);
    CHECK(mean_r <= 6.3);
}

TEST_CASE("spiral galaxy: star speeds are finite and non-zero") {
    auto s = spiral_galaxy(500, table_params(), Seed{2});
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double v = norm(s.velocities[i]);
        CHECK(std::isfinite(v));
        CHECK(v > 0.0);
    }
}

TEST_CASE("disc_3d: azimuthal quadrants are uniformly filled") {
    auto s = disc_3d(10001, table_params(), Seed{5});
    int quadrant[4] = {0, 0, 0, 0};
    for (std::size_t i = 1; i < s.size(); ++i) {
        const bool px = s.positions[i].x >= 0.0;
        const bool py = s.positions[i].y >= 0.0;
        ++quadrant[(px ? 0 : 1) + (py ? 0 : 2)];
    }
    const double expected = 10000.0 / 4.0;
    const double slack = 5.0 * std::sqrt(10000.0);
    for (int q = 0; q < 4; ++q) {
        CHECK(quadrant[q] >= expected - slack);
        CHECK(quadrant[q] <= expected + slack);
    }
}

TEST_CASE("disc generators reject n < 2") {
    CHECK_THROWS_AS(spiral_galaxy(1, table_params(), Seed{0}), std::invalid_argument);
    CHECK_THROWS_AS(disc_3d(1, table_params(), Seed{0}), std::invalid_argument);
}

TEST_CASE("random_cloud: bounds, mass, determinism") {
    auto s = random_cloud(200, 1.5, 2.0, Seed{9});
    double total = 0.0;
    for (std::size_t i = 0; i < 200; ++i) {
        CHECK(std::abs(s.positions[i].x) <= 1.5);
        CHECK(std::abs(s.positions[i].y) <= 1.5);
        CHECK(std::abs(s.positions[i].z) <= 1.5);
        CHECK(s.velocities[i] == Vec3{0, 0, 0});
        total += s.masses[i];
    }
    CHECK(total == doctest::Approx(2.0).epsilon(1e-12));

    auto t = random_cloud(200, 1.5, 2.0, Seed{9});
    for (std::size_t i = 0; i < 200; ++i)
        CHECK(s.positions[i] == t.positions[i]);
}

TEST_CASE("multi_disc: size, separation, determinism") {
    auto s = multi_disc(2, 1000, table_params(), 20.0, Seed{13});
    CHECK(s.size() == 2000);

    // Centre of mass of each half.
    auto com_x = [&](std::size_t begin, std::size_t end) {
        double mx = 0.0, m = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
            mx += s.masses[i] * s.positions[i].x;
            m += s.masses[i];
        }
        return mx / m;
    };
    const double gap = com_x(1000, 2000) - com_x(0, 1000);
    CHECK(gap >= 18.0);
    CHECK(gap <= 22.0);

    auto t = multi_disc(2, 1000, table_params(), 20.0, Seed{13});
    for (std::size_t i = 0; i < s.size(); ++i)
        CHECK(s.positions[i] == t.positions[i]);

    CHECK_THROWS_AS(multi_disc(1, 10, table_params(), 5.0, Seed{0}), std::invalid_argument);
}
