#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "riswave/reflection_design.hpp"
#include "riswave/special_functions.hpp"
#include "test_helpers.hpp"

using namespace riswave;
using namespace riswave::testing;

TEST_CASE("beta_planar") {
    const Medium medium = desk_medium();
    const double th30 = pi / 6.0;
    const double th45 = pi / 4.0;
    CHECK(beta_planar(0.0, th30, th45, medium) == 0.0);
    CHECK(beta_planar(0.37, th30, th30, medium) == doctest::Approx(0.0).epsilon(1e-15));
    // direct arithmetic oracle: k y (sin 30 - sin 45)
    const double expected =
        wrap_angle(medium.wavenumber() * 0.1 * (std::sin(th30) - std::sin(th45)));
    CHECK(expected == doctest::Approx(-1.3012913).epsilon(1e-6));
    CHECK(beta_planar(0.1, th30, th45, medium) == expected);
}

TEST_CASE("tau_planar is identically one") {
    CHECK(tau_planar() == 1.0);
    const Medium medium = desk_medium();
    const ReflectionDesign d = ReflectionDesign::make_planar(0.3, 0.2, medium);
    for (double y : {-0.9, 0.0, 0.4}) CHECK(std::abs(d.gamma(0.1, y)) ==
                                            doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("planar_theta_for_target") {
    CHECK(planar_theta_for_target({0.0, 1.0, 1.0}) == doctest::Approx(0.25 * pi));
    CHECK(planar_theta_for_target({0.0, 0.0, 7.0}) == 0.0);
    CHECK(planar_theta_for_target({0.0, 8.0, 8.0}) == doctest::Approx(0.25 * pi));
    CHECK_THROWS_AS(planar_theta_for_target({0.0, 1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("beta_cylindrical is independent of x") {
    const Medium medium = desk_medium();
    const FocalLine line(8.0, 8.0);
    for (double y : {-0.8, 0.0, 0.95})
        CHECK(beta_cylindrical(-0.7, y, line, pi / 6.0, medium) ==
              beta_cylindrical(0.4, y, line, pi / 6.0, medium));
}

TEST_CASE("beta_cylindrical asymptotic phase oracle at large kR") {
    // -arg(-H0^(2)(kR)) ~ wrap(kR - 5 pi/4) for kR >> 1 (phase of the
    // conjugated outgoing Hankel wave), checked at kR ~ 700
    const Medium medium = desk_medium();
    const double theta_in = pi / 6.0;
    const FocalLine line(8.0, 8.0);
    const double y = 0.25;
    const double r = std::sqrt((y - 8.0) * (y - 8.0) + 64.0);
    const double kr = medium.wavenumber() * r;
    REQUIRE(kr > 600.0);
    const double expected =
        wrap_angle(kr - 1.25 * pi + medium.wavenumber() * std::sin(theta_in) * y);
    const double actual = beta_cylindrical(0.0, y, line, theta_in, medium);
    CHECK(wrap_angle(actual - expected) == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("beta_cylindrical regression fixture at the plate center") {
    const Medium medium = desk_medium();
    const FocalLine line(8.0, 8.0);
    CHECK(beta_cylindrical(0.0, 0.0, line, pi / 6.0, medium) ==
          doctest::Approx(-3.0658362657911744).epsilon(1e-12));
}

TEST_CASE("line current magnitude") {
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();
    const FocalLine line(8.0, 8.0);

    SUBCASE("bisection oracle on the power balance") {
        const IncidentWave wave = desk_wave(medium);
        const double a = plate.length_y();
        const double p_inc = wave.e0() * wave.e0() * plate.area() *
                             std::cos(wave.theta_in()) / (2.0 * medium.impedance());
        const auto p_refl = [&](double i1) {
            const double frac = (std::atan((line.f_y + 0.5 * a) / line.f_z) -
                                 std::atan((line.f_y - 0.5 * a) / line.f_z)) /
                                (2.0 * pi);
            return frac * i1 * i1 * medium.wavenumber() * medium.impedance() *
                   plate.length_x() / (16.0 * pi);
        };
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (p_refl(mid) < p_inc ? lo : hi) = mid;
        }
        const LineCurrent i1 = line_current_magnitude(plate, wave, line, medium);
        CHECK(i1.magnitude == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-10));
        CHECK(i1.magnitude == doctest::Approx(1.563e-2).epsilon(1e-3));
    }

    SUBCASE("doubling E0 doubles the current") {
        const IncidentWave w1 = desk_wave(medium);
        const IncidentWave w2 = IncidentWave::from_field_amplitude(
            2.0, w1.theta_in(), w1.source_distance(), w1.tx_gain(), medium);
        const double i1 = line_current_magnitude(plate, w1, line, medium).magnitude;
        const double i2 = line_current_magnitude(plate, w2, line, medium).magnitude;
        CHECK(i2 == doctest::Approx(2.0 * i1).epsilon(1e-14));
    }

    SUBCASE("grazing incidence intercepts no power") {
        const IncidentWave grazing = IncidentWave::from_field_amplitude(
            1.0, 89.99 * pi / 180.0, 1000.0, 1.0, medium);
        CHECK(line_current_magnitude(plate, grazing, line, medium).magnitude < 2e-3);
    }
}

TEST_CASE("power conservation residual is at rounding level (cylindrical)") {
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();
    const IncidentWave wave = desk_wave(medium);
    for (const FocalLine& line : {FocalLine(8.0, 8.0), FocalLine(-3.0, 12.5), FocalLine(18.0, 18.0)}) {
        const LineCurrent i1 = line_current_magnitude(plate, wave, line, medium);
        const double a = plate.length_y();
        const double p_inc = wave.e0() * wave.e0() * plate.area() *
                             std::cos(wave.theta_in()) / (2.0 * medium.impedance());
        const double frac = (std::atan((line.f_y + 0.5 * a) / line.f_z) -
                             std::atan((line.f_y - 0.5 * a) / line.f_z)) /
                            (2.0 * pi);
        const double p_refl = frac * i1.magnitude * i1.magnitude * medium.wavenumber() *
                              medium.impedance() * plate.length_x() / (16.0 * pi);
        CHECK(std::abs(p_inc - p_refl) / p_inc < 1e-12);
    }
}

TEST_CASE("tau_cylindrical") {
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();
    const IncidentWave wave = desk_wave(medium);
    const FocalLine line(8.0, 8.0);
    const LineCurrent i1 = line_current_magnitude(plate, wave, line, medium);

    SUBCASE("positive everywhere on the plate") {
        for (double y = -1.0; y <= 1.0; y += 0.1)
            CHECK(tau_cylindrical(0.0, y, line, i1, wave, medium) > 0.0);
    }
    SUBCASE("falls off like R^(-1/2) for large kR") {
        // |H0^(2)| ~ sqrt(2/(pi k R)); compare two radii via the ratio
        const FocalLine far_line(0.0, 50.0);
        const double t1 = tau_cylindrical(0.0, 0.0, far_line, i1, wave, medium);
        const FocalLine farther(0.0, 100.0);
        const double t2 = tau_cylindrical(0.0, 0.0, farther, i1, wave, medium);
        CHECK(t1 / t2 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-3));
    }
    SUBCASE("regression fixture at the plate center") {
        CHECK(tau_cylindrical(0.0, 0.0, line, i1, wave, medium) ==
              doctest::Approx(2.7704518154318041).epsilon(1e-12));
    }
    SUBCASE("amplitude redistribution may exceed one; no clipping") {
        CHECK(tau_cylindrical(0.0, 0.0, line, i1, wave, medium) > 1.0);
    }
}

TEST_CASE("beta_spherical") {
    const Medium medium = desk_medium();
    const double k = medium.wavenumber();

    SUBCASE("radially symmetric about the focal axis at normal incidence") {
        const FocalPoint p(0.3, -0.2, 5.0);
        const double b1 = beta_spherical(p.f_x + 0.4, p.f_y + 0.1, p, 0.0, medium);
        const double b2 = beta_spherical(p.f_x - 0.4, p.f_y - 0.1, p, 0.0, medium);
        const double b3 = beta_spherical(p.f_x + 0.1, p.f_y + 0.4, p, 0.0, medium);
        CHECK(b1 == doctest::Approx(b2).epsilon(1e-12));
        CHECK(b1 == doctest::Approx(b3).epsilon(1e-12));
    }
    SUBCASE("value under the focal point") {
        const FocalPoint p(0.2, 0.6, 4.0);
        const double expected = wrap_angle(-k * p.f_z + k * std::sin(pi / 6.0) * p.f_y);
        CHECK(beta_spherical(p.f_x, p.f_y, p, pi / 6.0, medium) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
    SUBCASE("depends on x, unlike the cylindrical phase") {
        const FocalPoint p(0.0, 0.0, 3.0);
        CHECK(beta_spherical(0.0, 0.5, p, 0.0, medium) !=
              beta_spherical(0.9, 0.5, p, 0.0, medium));
    }
}

TEST_CASE("solid angle") {
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();

    SUBCASE("centered closed form") {
        // Omega = 4 atan((a/2)(b/2) / (h sqrt((a/2)^2 + (b/2)^2 + h^2)))
        const SurfaceGrid grid(plate, medium, 8.0);
        const double omega = solid_angle(plate, FocalPoint(0.0, 0.0, 2.0), grid);
        const double closed = 4.0 * std::atan(1.0 / (2.0 * std::sqrt(6.0)));
        CHECK(closed == doctest::Approx(0.80543168316132317).epsilon(1e-15));
        CHECK(omega == doctest::Approx(closed).epsilon(1e-3));
    }
    SUBCASE("far-point small-angle limit a*b/h^2") {
        const SurfaceGrid grid(plate, medium, 8.0);
        const double h = 100.0 * std::max(plate.length_x(), plate.length_y());
        const double omega = solid_angle(plate, FocalPoint(0.0, 0.0, h), grid);
        CHECK(omega == doctest::Approx(plate.area() / (h * h)).epsilon(1e-2));
    }
    SUBCASE("approaches the half-space limit near the plate") {
        const SurfaceGrid grid(plate, medium, 64.0); // resolve the near-singular peak
        const double omega = solid_angle(plate, FocalPoint(0.0, 0.0, 0.05), grid);
        const double closed =
            4.0 * std::atan(1.0 / (0.05 * std::sqrt(2.0 + 0.05 * 0.05)));
        CHECK(omega == doctest::Approx(closed).epsilon(2e-3));
        CHECK(omega / (2.0 * pi) == doctest::Approx(1.0).epsilon(0.05));
    }
}

TEST_CASE("point source magnitude and tau_spherical") {
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();
    const IncidentWave wave = desk_wave(medium);
    const SurfaceGrid grid(plate, medium, 8.0);
    const FocalPoint point(0.0, 0.0, 2.0);

    SUBCASE("fixture from the closed-form solid angle") {
        const PointSourceMagnitude u1 =
            point_source_magnitude(plate, wave, point, medium, grid);
        CHECK(u1.magnitude == doctest::Approx(2.0738672663815103 * wave.e0()).epsilon(1e-3));
    }
    SUBCASE("scales linearly with E0; tau is E0-free") {
        const IncidentWave w2 = IncidentWave::from_field_amplitude(
            2.0, wave.theta_in(), wave.source_distance(), wave.tx_gain(), medium);
        const PointSourceMagnitude u1 = point_source_magnitude(plate, wave, point, medium, grid);
        const PointSourceMagnitude u2 = point_source_magnitude(plate, w2, point, medium, grid);
        CHECK(u2.magnitude == doctest::Approx(2.0 * u1.magnitude).epsilon(1e-14));
        CHECK(tau_spherical(0.3, 0.1, point, u2, w2, medium) ==
              doctest::Approx(tau_spherical(0.3, 0.1, point, u1, wave, medium)).epsilon(1e-14));
    }
    SUBCASE("tau falls off as 1/R_s") {
        const PointSourceMagnitude u1 = point_source_magnitude(plate, wave, point, medium, grid);
        const double t0 = tau_spherical(0.0, 0.0, point, u1, wave, medium);
        CHECK(t0 == doctest::Approx(u1.magnitude / (2.0 * wave.e0())).epsilon(1e-15));
        const double t1 = tau_spherical(0.0, 1.0, point, u1, wave, medium);
        CHECK(t1 / t0 == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
    }
    SUBCASE("spherical power conservation residual") {
        const double omega = solid_angle(plate, point, grid);
        const PointSourceMagnitude u1 = point_source_magnitude(plate, wave, point, medium, grid);
        const double p_inc = wave.e0() * wave.e0() * plate.area() *
                             std::cos(wave.theta_in()) / (2.0 * medium.impedance());
        const double p_refl =
            omega * u1.magnitude * u1.magnitude / (2.0 * medium.impedance());
        CHECK(std::abs(p_inc - p_refl) / p_inc < 1e-12);
    }
}

TEST_CASE("build_design composes the primitive operations bitwise") {
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();
    const IncidentWave wave = desk_wave(medium);
    const SurfaceGrid grid(plate, medium, 8.0);
    const double theta_in = wave.theta_in();

    const FocalLine line(8.0, 8.0);
    const LineCurrent i1 = line_current_magnitude(plate, wave, line, medium);
    const ReflectionDesign cyl = ReflectionDesign::make_cylindrical(line, wave, medium, plate);

    const FocalPoint point(0.4, -0.7, 6.0);
    const PointSourceMagnitude u1 = point_source_magnitude(plate, wave, point, medium, grid);
    const ReflectionDesign sph =
        ReflectionDesign::make_spherical(point, wave, medium, plate, grid);

    const ReflectionDesign pla = ReflectionDesign::make_planar(0.25 * pi, theta_in, medium);

    for (double y : {-0.99, -0.3, 0.0, 0.62}) {
        for (double x : {-0.8, 0.05}) {
            CHECK(cyl.beta(x, y) == beta_cylindrical(x, y, line, theta_in, medium));
            CHECK(cyl.tau(x, y) == tau_cylindrical(x, y, line, i1, wave, medium));
            CHECK(sph.beta(x, y) == beta_spherical(x, y, point, theta_in, medium));
            CHECK(sph.tau(x, y) == tau_spherical(x, y, point, u1, wave, medium));
            CHECK(pla.beta(x, y) == beta_planar(y, theta_in, 0.25 * pi, medium));
            CHECK(pla.tau(x, y) == 1.0);
            CHECK(cyl.gamma(x, y) == std::polar(cyl.tau(x, y), cyl.beta(x, y)));
        }
    }
    CHECK(cyl.normalization_magnitude() == i1.magnitude);
    CHECK(sph.normalization_magnitude() == u1.magnitude);
}

TEST_CASE("all phase outputs stay in (-pi, pi]") {
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();
    const IncidentWave wave = desk_wave(medium);
    const SurfaceGrid grid(plate, medium, 8.0);
    const ReflectionDesign designs[] = {
        ReflectionDesign::make_planar(0.4, wave.theta_in(), medium),
        ReflectionDesign::make_cylindrical(FocalLine(5.0, 9.0), wave, medium, plate),
        ReflectionDesign::make_spherical(FocalPoint(0.3, 2.0, 7.0), wave, medium, plate, grid)};
    for (const auto& d : designs) {
        for (double y = -1.0; y <= 1.0; y += 0.21) {
            const double b = d.beta(0.13, y);
            CHECK(b > -pi);
            CHECK(b <= pi);
        }
    }
}

TEST_CASE("degenerate focal geometry is rejected") {
    CHECK_THROWS_AS(FocalLine(1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(FocalLine(1.0, -2.0), std::invalid_argument);
    CHECK_THROWS_AS(FocalPoint(0.0, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("far-focus cylindrical phase degenerates to the planar ramp") {
    // focal line receding along 45 deg: beta converges to an affine function
    // of y with slope k (sin(theta_in) - sin(theta_F))
    const Medium medium = desk_medium();
    const RisAperture plate = desk_aperture();
    const IncidentWave wave = desk_wave(medium);
    const double c = 1000.0 * plate.length_y();
    const FocalLine line(c, c);

    const int n = 401;
    std::vector<double> ys(n), phases(n);
    for (int i = 0; i < n; ++i) {
        ys[i] = -1.0 + 2.0 * i / (n - 1);
        phases[i] = beta_cylindrical(0.0, ys[i], line, wave.theta_in(), medium);
    }
    unwrap_phase_profile(phases);

    // least-squares affine fit
    double sy = 0, sp = 0, syy = 0, syp = 0;
    for (int i = 0; i < n; ++i) {
        sy += ys[i];
        sp += phases[i];
        syy += ys[i] * ys[i];
        syp += ys[i] * phases[i];
    }
    const double slope = (n * syp - sy * sp) / (n * syy - sy * sy);
    const double intercept = (sp - slope * sy) / n;
    double max_dev = 0.0;
    for (int i = 0; i < n; ++i)
        max_dev = std::max(max_dev, std::abs(phases[i] - (slope + 0.0) * ys[i] - intercept));
    CHECK(max_dev < 0.05);

    const double sin_f = line.f_y / std::sqrt(line.f_y * line.f_y + line.f_z * line.f_z);
    const double expected_slope = medium.wavenumber() * (std::sin(wave.theta_in()) - sin_f);
    CHECK(slope == doctest::Approx(expected_slope).epsilon(1e-3));
}

TEST_CASE("stationary point of the cylindrical phase is the specular point") {
    // choose a close focus so the specular point falls inside the aperture
    const Medium medium = desk_medium();
    const double theta_in = pi / 6.0;
    const FocalLine line(0.5, std::sqrt(3.0) * 0.4);

    const int n = 4001;
    std::vector<double> ys(n), phases(n);
    for (int i = 0; i < n; ++i) {
        ys[i] = -1.0 + 2.0 * i / (n - 1);
        phases[i] = beta_cylindrical(0.0, ys[i], line, theta_in, medium);
    }
    unwrap_phase_profile(phases);

    bool found = false;
    for (int i = 1; i + 1 < n; ++i) {
        const double left = phases[i] - phases[i - 1];
        const double right = phases[i + 1] - phases[i];
        if (left * right <= 0.0 && (left != 0.0 || right != 0.0)) {
            const double y = ys[i];
            const double r = std::sqrt((y - line.f_y) * (y - line.f_y) + line.f_z * line.f_z);
            CHECK(std::abs((line.f_y - y) / r - std::sin(theta_in)) < 1e-3);
            found = true;
            break;
        }
    }
    CHECK(found);
}
