#ifndef RISWAVE_BESSEL_REFERENCE_HPP
#define RISWAVE_BESSEL_REFERENCE_HPP

// Long-double reference evaluations of J0, J1, Y0, Y1, kept independent of
// the production implementation: the series are run in extended precision
// with their own termination rules, the asymptotic branch uses more terms,
// and the branch switch sits at x = 20 instead of 12. Used by tests and the
// `selftest` command only.

#include <cmath>
#include <complex>

namespace riswave::reference {

inline constexpr long double ref_pi = 3.14159265358979323846264338328L;
inline constexpr long double ref_gamma = 0.57721566490153286060651209008L;
inline constexpr long double series_switch = 20.0L;

inline long double j0_series(long double x) {
    const long double q = 0.25L * x * x;
    long double term = 1.0L, sum = 1.0L;
    for (int m = 1; m < 400; ++m) {
        term *= -q / (static_cast<long double>(m) * m);
        sum += term;
        if (std::abs(term) < 1e-24L * (std::abs(sum) + 1.0L)) break;
    }
    return sum;
}

inline long double j1_series(long double x) {
    const long double q = 0.25L * x * x;
    long double term = 1.0L, sum = 1.0L;
    for (int m = 1; m < 400; ++m) {
        term *= -q / (static_cast<long double>(m) * (m + 1));
        sum += term;
        if (std::abs(term) < 1e-24L * (std::abs(sum) + 1.0L)) break;
    }
    return 0.5L * x * sum;
}

inline long double y0_series(long double x) {
    const long double q = 0.25L * x * x;
    long double term = 1.0L, harmonic = 0.0L, sum = 0.0L, sign = 1.0L;
    for (int m = 1; m < 400; ++m) {
        term *= q / (static_cast<long double>(m) * m);
        harmonic += 1.0L / m;
        sum += sign * harmonic * term;
        sign = -sign;
        if (term < 1e-24L * (std::abs(sum) + 1.0L)) break;
    }
    return (2.0L / ref_pi) * ((std::log(0.5L * x) + ref_gamma) * j0_series(x) + sum);
}

inline long double y1_series(long double x) {
    const long double q = 0.25L * x * x;
    long double term = 0.5L * x, h_m = 0.0L, h_m1 = 1.0L;
    long double sum = term * (h_m + h_m1 - 2.0L * ref_gamma);
    long double sign = -1.0L;
    for (int m = 1; m < 400; ++m) {
        term *= q / (static_cast<long double>(m) * (m + 1));
        h_m += 1.0L / m;
        h_m1 += 1.0L / (m + 1);
        sum += sign * term * (h_m + h_m1 - 2.0L * ref_gamma);
        sign = -sign;
        if (term < 1e-24L * (std::abs(sum) + 1.0L)) break;
    }
    return (2.0L / ref_pi) * std::log(0.5L * x) * j1_series(x) - 2.0L / (ref_pi * x) -
           sum / ref_pi;
}

inline std::complex<long double> hankel2_asymptotic(int n, long double x, int terms = 24) {
    const long double four_n2 = 4.0L * n * n;
    std::complex<long double> sum{1.0L, 0.0L};
    std::complex<long double> term{1.0L, 0.0L};
    for (int k = 0; k + 1 < terms; ++k) {
        const long double odd = 2.0L * k + 1.0L;
        term *= (four_n2 - odd * odd) / (8.0L * (k + 1) * x);
        term *= std::complex<long double>{0.0L, -1.0L};
        sum += term;
    }
    const long double chi = x - 0.5L * n * ref_pi - 0.25L * ref_pi;
    return std::sqrt(2.0L / (ref_pi * x)) *
           std::complex<long double>{std::cos(chi), -std::sin(chi)} * sum;
}

inline double bessel_j_reference(int order, double x) {
    const long double lx = x;
    if (lx <= series_switch)
        return static_cast<double>(order == 0 ? j0_series(lx) : j1_series(lx));
    return static_cast<double>(hankel2_asymptotic(order, lx).real());
}

inline double bessel_y_reference(int order, double x) {
    const long double lx = x;
    if (lx <= series_switch)
        return static_cast<double>(order == 0 ? y0_series(lx) : y1_series(lx));
    return static_cast<double>(-hankel2_asymptotic(order, lx).imag());
}

} // namespace riswave::reference

#endif
