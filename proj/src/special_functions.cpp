#include "riswave/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace riswave {

namespace {

// Euler-Mascheroni constant, 20 digits.
constexpr double euler_gamma = 0.57721566490153286061;

constexpr int max_series_terms = 300;
constexpr int asymptotic_terms = 17;

// J0 by the ascending power series sum_m (-x^2/4)^m / (m!)^2.
double j0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < max_series_terms; ++m) {
        term *= -q / (static_cast<double>(m) * m);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return sum;
}

// J1 by (x/2) * sum_m (-x^2/4)^m / (m! (m+1)!).
double j1_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0;
    double sum = 1.0;
    for (int m = 1; m < max_series_terms; ++m) {
        term *= -q / (static_cast<double>(m) * (m + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum) + 1e-300) break;
    }
    return 0.5 * x * sum;
}

// Y0 by the Neumann series:
//   Y0 = (2/pi) [ (ln(x/2) + gamma) J0 + sum_{m>=1} (-1)^{m+1} H_m (x^2/4)^m / (m!)^2 ]
// with harmonic numbers H_m.
double y0_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0; // q^m / (m!)^2 running value, m = 0
    double harmonic = 0.0;
    double sum = 0.0;
    double sign = 1.0; // (-1)^{m+1} for m = 1
    for (int m = 1; m < max_series_terms; ++m) {
        term *= q / (static_cast<double>(m) * m);
        harmonic += 1.0 / m;
        const double contrib = sign * harmonic * term;
        sum += contrib;
        sign = -sign;
        if (std::abs(contrib) < 1e-18 * (std::abs(sum) + 1.0) + 1e-300) break;
    }
    return (2.0 / pi) * ((std::log(0.5 * x) + euler_gamma) * j0_series(x) + sum);
}

// Y1 by the Neumann series:
//   Y1 = (2/pi) ln(x/2) J1 - 2/(pi x)
//        - (1/pi) sum_{m>=0} (-1)^m (H_m + H_{m+1} - 2 gamma) (x/2)^{2m+1} / (m! (m+1)!)
double y1_series(double x) {
    const double q = 0.25 * x * x;
    const double half_x = 0.5 * x;
    double term = half_x; // (x/2)^{2m+1} / (m! (m+1)!) running value, m = 0
    double h_m = 0.0;
    double h_m1 = 1.0;
    double sum = term * (h_m + h_m1 - 2.0 * euler_gamma);
    double sign = -1.0;
    for (int m = 1; m < max_series_terms; ++m) {
        term *= q / (static_cast<double>(m) * (m + 1));
        h_m += 1.0 / m;
        h_m1 += 1.0 / (m + 1);
        const double contrib = sign * term * (h_m + h_m1 - 2.0 * euler_gamma);
        sum += contrib;
        sign = -sign;
        if (std::abs(contrib) < 1e-18 * (std::abs(sum) + 1.0) + 1e-300) break;
    }
    return (2.0 / pi) * std::log(half_x) * j1_series(x) - 2.0 / (pi * x) - sum / pi;
}

// Large-argument Hankel asymptotic expansion (A&S 9.2.6 conjugated):
//   H_n^(2)(x) ~ sqrt(2/(pi x)) e^{-j(x - n pi/2 - pi/4)} sum_k (-j)^k a_k(n) / x^k,
//   a_k(n) = prod_{i=1..k} (4n^2 - (2i-1)^2) / (k! 8^k).
Complex hankel2_asymptotic(int n, double x) {
    const double four_n2 = 4.0 * n * n;
    Complex sum{1.0, 0.0};
    Complex term{1.0, 0.0};
    for (int k = 0; k + 1 < asymptotic_terms; ++k) {
        const double odd = 2.0 * k + 1.0;
        term *= (four_n2 - odd * odd) / (8.0 * (k + 1) * x);
        term *= Complex{0.0, -1.0};
        sum += term;
    }
    const double chi = x - 0.5 * n * pi - 0.25 * pi;
    const Complex phase{std::cos(chi), -std::sin(chi)};
    return std::sqrt(2.0 / (pi * x)) * phase * sum;
}

void require_finite(double x) {
    if (!std::isfinite(x)) throw std::domain_error("bessel: argument must be finite");
}

} // namespace

BesselOrder::BesselOrder(int order) : order_(order) {
    if (order != 0 && order != 1)
        throw std::domain_error("BesselOrder: only orders 0 and 1 are supported");
}

double bessel_j(BesselOrder order, double x) {
    require_finite(x);
    if (x < 0.0) throw std::domain_error("bessel_j: argument must be >= 0");
    if (x <= detail::bessel_series_cutoff)
        return order.value() == 0 ? j0_series(x) : j1_series(x);
    return hankel2_asymptotic(order.value(), x).real();
}

double bessel_y(BesselOrder order, double x) {
    require_finite(x);
    if (x <= 0.0) throw std::domain_error("bessel_y: argument must be > 0");
    if (x < 1e-300)
        throw std::domain_error("bessel_y: argument too close to the singularity at 0");
    if (x <= detail::bessel_series_cutoff)
        return order.value() == 0 ? y0_series(x) : y1_series(x);
    return -hankel2_asymptotic(order.value(), x).imag();
}

Complex hankel2(BesselOrder order, double x) {
    return Complex{bessel_j(order, x), -bessel_y(order, x)};
}

} // namespace riswave
