#ifndef RISWAVE_SPECIAL_FUNCTIONS_HPP
#define RISWAVE_SPECIAL_FUNCTIONS_HPP

#include <complex>

#include "riswave/geometry.hpp"

namespace riswave {

/// Bessel/Hankel order restricted to {0, 1}; anything else is rejected at
/// construction. The cylindrical-wave design only ever needs these two.
class BesselOrder {
  public:
    explicit BesselOrder(int order);
    int value() const { return order_; }

    static BesselOrder zero() { return BesselOrder(0); }
    static BesselOrder one() { return BesselOrder(1); }

  private:
    int order_;
};

/// Bessel function of the first kind J_n(x), n in {0,1}, x >= 0.
/// Absolute error <= 1e-8 over [0, 1e4]; larger x is supported with slowly
/// degrading phase accuracy from argument reduction in sin/cos.
double bessel_j(BesselOrder order, double x);

/// Bessel function of the second kind Y_n(x), n in {0,1}, x > 0.
/// Throws std::domain_error for x <= 0 and for x < 1e-300, where the
/// logarithmic (n=0) or 1/x (n=1) singularity overflows.
double bessel_y(BesselOrder order, double x);

/// Hankel function of the second kind H_n^(2)(x) = J_n(x) - j*Y_n(x).
/// Composed bitwise from bessel_j and bessel_y.
Complex hankel2(BesselOrder order, double x);

namespace detail {
/// Switch point between the ascending power series (x <= switch) and the
/// large-argument Hankel asymptotic expansion (x > switch). Exposed so tests
/// can probe continuity across the branch change.
inline constexpr double bessel_series_cutoff = 12.0;
} // namespace detail

} // namespace riswave

#endif
