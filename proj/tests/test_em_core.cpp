#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "riswave/em_model.hpp"
#include "test_helpers.hpp"

using namespace riswave;
using namespace riswave::testing;

TEST_CASE("medium derives the wavenumber exactly") {
    const Medium m(0.1, 377.0);
    CHECK(m.wavenumber() * m.wavelength() == doctest::Approx(2.0 * pi).epsilon(1e-15));
    CHECK_THROWS_AS(Medium(0.0, 377.0), std::invalid_argument);
    CHECK_THROWS_AS(Medium(0.1, -1.0), std::invalid_argument);
}

TEST_CASE("radiating near-field bounds at the reference scale") {
    const Medium medium = desk_medium();
    const auto [d_min, d_max] = radiating_near_field_bounds(desk_aperture(), medium);
    // 93.263 lambda < d < 1600 lambda at a = b = 20 lambda, lambda = 0.1 m
    CHECK(d_min / medium.wavelength() == doctest::Approx(93.263).epsilon(1e-4));
    CHECK(d_max / medium.wavelength() == doctest::Approx(1600.0).epsilon(1e-12));
}

TEST_CASE("radiating near-field bounds at millimeter wavelength") {
    // Direct Eq.-style arithmetic: a = b = 2 m, lambda = 0.01 m
    const Medium medium(0.01, 377.0);
    const auto [d_min, d_max] = radiating_near_field_bounds(RisAperture(2.0, 2.0), medium);
    CHECK(d_min == doctest::Approx(29.492).epsilon(1e-4));
    CHECK(d_max == doctest::Approx(1600.0).epsilon(1e-12));
}

TEST_CASE("near-field bounds for a degenerate aperture tend to zero") {
    const Medium medium = desk_medium();
    const auto [d_min, d_max] = radiating_near_field_bounds(RisAperture(1e-9, 1e-9), medium);
    CHECK(d_min < 1e-12);
    CHECK(d_max < 1e-12);
}

TEST_CASE("d_max scales quadratically with the aperture") {
    const Medium medium = desk_medium();
    const auto base = radiating_near_field_bounds(RisAperture(2.0, 3.0), medium);
    const auto scaled = radiating_near_field_bounds(RisAperture(2.0 * 2.0, 2.0 * 3.0), medium);
    CHECK(scaled.second == doctest::Approx(4.0 * base.second).epsilon(1e-15));
}

TEST_CASE("incident fields at normal incidence") {
    const Medium medium = desk_medium();
    const IncidentWave wave = desk_wave(medium, 0.0);
    const auto [e, h] = incident_fields(wave, medium, {0.0, 0.0, 0.0});
    CHECK(e.x == Complex{wave.e0(), 0.0});
    CHECK(std::abs(e.y) == 0.0);
    CHECK(std::abs(e.z) == 0.0);
    CHECK(h.y.real() == doctest::Approx(-wave.e0() / medium.impedance()).epsilon(1e-15));
    CHECK(std::abs(h.z) < 1e-18);
}

TEST_CASE("plane-wave impedance ratio holds everywhere") {
    const Medium medium = desk_medium();
    const IncidentWave wave = desk_wave(medium);
    for (const Vec3& p : {Vec3{0.3, -0.7, 0.2}, Vec3{-1.0, 2.0, 5.0}, Vec3{0.0, 0.0, -1.0}}) {
        const auto [e, h] = incident_fields(wave, medium, p);
        CHECK(norm(e) / norm(h) == doctest::Approx(medium.impedance()).epsilon(1e-12));
    }
}

TEST_CASE("incident E, H and propagation direction are mutually orthogonal") {
    const Medium medium = desk_medium();
    const IncidentWave wave = desk_wave(medium);
    const double st = std::sin(wave.theta_in());
    const double ct = std::cos(wave.theta_in());
    for (const Vec3& p : {Vec3{0.0, 0.4, 0.0}, Vec3{1.0, -2.0, 3.0}}) {
        const auto [e, h] = incident_fields(wave, medium, p);
        // E is x-polarized; H lies in the yz plane; direction (0, st, -ct).
        const Complex eh = e.x * std::conj(h.x) + e.y * std::conj(h.y) + e.z * std::conj(h.z);
        CHECK(std::abs(eh) / (norm(e) * norm(h)) < 1e-12);
        const Complex hk = h.y * st + h.z * (-ct);
        CHECK(std::abs(hk) / norm(h) < 1e-12);
    }
}

TEST_CASE("incident phase one wavelength off-center") {
    // theta_in = 30 deg, point (0, lambda, 0): phase of E_x is -pi
    const Medium medium = desk_medium();
    const IncidentWave wave = desk_wave(medium);
    const auto [e, h] = incident_fields(wave, medium, {0.0, medium.wavelength(), 0.0});
    CHECK(e.x.real() == doctest::Approx(-wave.e0()).epsilon(1e-12));
    CHECK(std::abs(e.x.imag()) < 1e-12);
}

TEST_CASE("source magnitude identity A^2 = P_t G_t eta / (2 pi)") {
    const Medium medium = desk_medium();
    const IncidentWave wave = desk_wave(medium);
    const double a2 = wave.tx_power() * wave.tx_gain() * medium.impedance() / (2.0 * pi);
    CHECK(wave.source_magnitude() * wave.source_magnitude() ==
          doctest::Approx(a2).epsilon(1e-15));
    // and E0 = A / l
    CHECK(wave.e0() == doctest::Approx(wave.source_magnitude() / wave.source_distance())
                           .epsilon(1e-15));
}

TEST_CASE("inconsistent explicit source magnitude is rejected") {
    const Medium medium = desk_medium();
    const IncidentWave ok = desk_wave(medium);
    CHECK_THROWS_AS(IncidentWave(ok.e0(), ok.theta_in(), ok.source_distance(),
                                 1.01 * ok.source_magnitude(), ok.tx_power(), ok.tx_gain(),
                                 medium),
                    std::invalid_argument);
}

TEST_CASE("antenna positions") {
    SUBCASE("single antenna sits at the center") {
        const UlaReceiver rx(1, 0.0, {1.0, 2.0, 3.0}, 0.0, 1.0);
        const Vec3 p = antenna_position(rx, 1);
        CHECK(p.x == 1.0);
        CHECK(p.y == 2.0);
        CHECK(p.z == 3.0);
    }
    SUBCASE("two antennas at symmetric endpoints") {
        const UlaReceiver rx(2, 1.0, {0.0, 5.0, 5.0}, 0.0, 1.0);
        CHECK(antenna_position(rx, 1).x == doctest::Approx(-0.5));
        CHECK(antenna_position(rx, 2).x == doctest::Approx(0.5));
        CHECK(antenna_position(rx, 1).y == 5.0);
    }
    SUBCASE("vertical attitude") {
        // M = 3, L = 2, phi = 90 deg, center (0, 5, 5) -> z in {4, 5, 6}
        const UlaReceiver rx(3, 2.0, {0.0, 5.0, 5.0}, 0.5 * pi, 1.0);
        CHECK(antenna_position(rx, 1).z == doctest::Approx(4.0).epsilon(1e-15));
        CHECK(antenna_position(rx, 2).z == doctest::Approx(5.0).epsilon(1e-15));
        CHECK(antenna_position(rx, 3).z == doctest::Approx(6.0).epsilon(1e-15));
        CHECK(std::abs(antenna_position(rx, 1).x) < 1e-15);
    }
    SUBCASE("index bounds") {
        const UlaReceiver rx(4, 1.0, {0.0, 0.0, 1.0}, 0.0, 1.0);
        CHECK_THROWS_AS(antenna_position(rx, 0), std::out_of_range);
        CHECK_THROWS_AS(antenna_position(rx, 5), std::out_of_range);
    }
}

TEST_CASE("ULA spacing is uniform") {
    const UlaReceiver rx = desk_receiver();
    const double expected = rx.length() / (rx.num_antennas() - 1);
    for (int m = 1; m < rx.num_antennas(); ++m) {
        const double d = norm(antenna_position(rx, m + 1) - antenna_position(rx, m));
        CHECK(d == doctest::Approx(expected).epsilon(1e-12));
    }
}
