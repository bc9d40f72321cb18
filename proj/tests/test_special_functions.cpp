#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "riswave/bessel_reference.hpp"
#include "riswave/special_functions.hpp"

using namespace riswave;

TEST_CASE("bessel order is restricted to 0 and 1") {
    CHECK_NOTHROW(BesselOrder(0));
    CHECK_NOTHROW(BesselOrder(1));
    CHECK_THROWS_AS(BesselOrder(2), std::domain_error);
    CHECK_THROWS_AS(BesselOrder(-1), std::domain_error);
}

TEST_CASE("bessel_j at the origin") {
    CHECK(bessel_j(BesselOrder::zero(), 0.0) == 1.0);
    CHECK(bessel_j(BesselOrder::one(), 0.0) == 0.0);
}

TEST_CASE("bessel_j(0, 1) against the power-series oracle") {
    // sum_m (-x^2/4)^m / (m!)^2 in long double, >= 30 terms
    long double sum = 0.0L, term = 1.0L;
    for (int m = 0; m < 40; ++m) {
        sum += term;
        term *= -0.25L / ((m + 1.0L) * (m + 1.0L));
    }
    CHECK(bessel_j(BesselOrder::zero(), 1.0) ==
          doctest::Approx(static_cast<double>(sum)).epsilon(1e-14));
    CHECK(bessel_j(BesselOrder::zero(), 1.0) == doctest::Approx(0.76519768).epsilon(1e-8));
}

TEST_CASE("bessel_j rejects bad arguments") {
    CHECK_THROWS_AS(bessel_j(BesselOrder::zero(), -0.5), std::domain_error);
    CHECK_THROWS_AS(bessel_j(BesselOrder::zero(), std::nan("")), std::domain_error);
    CHECK_THROWS_AS(bessel_j(BesselOrder::zero(),
                             std::numeric_limits<double>::infinity()),
                    std::domain_error);
}

TEST_CASE("bessel_y near the singularity and at 1") {
    CHECK_THROWS_AS(bessel_y(BesselOrder::zero(), 0.0), std::domain_error);
    CHECK_THROWS_AS(bessel_y(BesselOrder::zero(), -1.0), std::domain_error);
    CHECK_THROWS_AS(bessel_y(BesselOrder::zero(), 1e-301), std::domain_error);
    // Neumann-series oracle values
    CHECK(bessel_y(BesselOrder::zero(), 1.0) == doctest::Approx(0.08825696).epsilon(1e-7));
    CHECK(bessel_y(BesselOrder::one(), 1.0) == doctest::Approx(-0.78121282).epsilon(1e-8));
    CHECK(bessel_y(BesselOrder::zero(), 1.0) ==
          doctest::Approx(reference::bessel_y_reference(0, 1.0)).epsilon(1e-14));
    CHECK(bessel_y(BesselOrder::one(), 1.0) ==
          doctest::Approx(reference::bessel_y_reference(1, 1.0)).epsilon(1e-14));
}

TEST_CASE("hankel2 composes bessel_j and bessel_y bitwise") {
    for (double x : {0.5, 3.0, 11.9, 12.1, 40.0, 512.0}) {
        for (int order : {0, 1}) {
            const BesselOrder n(order);
            const Complex h = hankel2(n, x);
            CHECK(h.real() == bessel_j(n, x));
            CHECK(h.imag() == -bessel_y(n, x));
        }
    }
}

TEST_CASE("hankel2(0, 1)") {
    const Complex h = hankel2(BesselOrder::zero(), 1.0);
    CHECK(h.real() == doctest::Approx(0.76519769).epsilon(1e-7));
    CHECK(h.imag() == doctest::Approx(-0.08825696).epsilon(1e-6));
}

TEST_CASE("hankel2 large-argument asymptotics") {
    // |H0(2)(x)| ~ sqrt(2/(pi x)), arg ~ -(x - pi/4), checked at x = 500
    const double x = 500.0;
    const Complex h = hankel2(BesselOrder::zero(), x);
    CHECK(std::abs(h) == doctest::Approx(std::sqrt(2.0 / (pi * x))).epsilon(1e-4));
    const double expected_phase = wrap_angle(-(x - 0.25 * pi));
    CHECK(wrap_angle(std::arg(h) - expected_phase) == doctest::Approx(0.0).epsilon(1e-3));
}

TEST_CASE("hankel2 order 1 pole at the origin") {
    CHECK_THROWS_AS(hankel2(BesselOrder::one(), 0.0), std::domain_error);
    CHECK_THROWS_AS(hankel2(BesselOrder::one(), 1e-305), std::domain_error);
}

TEST_CASE("wronskian identity J1 Y0 - J0 Y1 = 2/(pi x)") {
    for (double x = 0.1; x <= 1000.0; x *= 1.05) {
        const double w = bessel_j(BesselOrder::one(), x) * bessel_y(BesselOrder::zero(), x) -
                         bessel_j(BesselOrder::zero(), x) * bessel_y(BesselOrder::one(), x);
        CHECK(std::abs(w - 2.0 / (pi * x)) < 1e-9);
    }
}

TEST_CASE("derivative recurrence J0' = -J1 by central differences") {
    // x kept small enough that the finite-difference truncation error
    // (h^2/6) |J0'''| stays below the 1e-7 bound at step h = 1e-4 max(1, x)
    for (double x : {0.3, 1.7, 5.0, 11.0, 12.5, 14.0}) {
        const double h = 1e-4 * std::max(1.0, x);
        const double d = (bessel_j(BesselOrder::zero(), x + h) -
                          bessel_j(BesselOrder::zero(), x - h)) /
                         (2.0 * h);
        CHECK(std::abs(d + bessel_j(BesselOrder::one(), x)) < 1e-7);
    }
}

TEST_CASE("series and asymptotic branches agree at the switch point") {
    const double lo = detail::bessel_series_cutoff;
    const double hi = std::nextafter(lo, lo + 1.0);
    for (int order : {0, 1}) {
        const BesselOrder n(order);
        CHECK(std::abs(bessel_j(n, lo) - bessel_j(n, hi)) < 1e-8);
        CHECK(std::abs(bessel_y(n, lo) - bessel_y(n, hi)) < 1e-8);
    }
}

TEST_CASE("accuracy against the independent long-double reference") {
    // 200 log-spaced points over [1e-3, 1e4]
    double max_err = 0.0;
    for (int i = 0; i < 200; ++i) {
        const double x = std::pow(10.0, -3.0 + 7.0 * i / 199.0);
        for (int order : {0, 1}) {
            const BesselOrder n(order);
            max_err = std::max(
                max_err, std::abs(bessel_j(n, x) - reference::bessel_j_reference(order, x)));
            max_err = std::max(
                max_err, std::abs(bessel_y(n, x) - reference::bessel_y_reference(order, x)));
        }
    }
    CHECK(max_err < 1e-8);
}
