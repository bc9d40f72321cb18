#ifndef RISWAVE_GEOMETRY_HPP
#define RISWAVE_GEOMETRY_HPP

#include <cmath>
#include <complex>
#include <numbers>

namespace riswave {

using Complex = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr Complex imag_unit{0.0, 1.0};

/// Cartesian 3-vector in meters (plate lies in z = 0, receivers at z > 0).
struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }

inline double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

/// Complex-valued field vector, components in V/m.
struct CVec3 {
    Complex x{0.0, 0.0};
    Complex y{0.0, 0.0};
    Complex z{0.0, 0.0};

    CVec3& operator+=(const CVec3& o) {
        x += o.x;
        y += o.y;
        z += o.z;
        return *this;
    }
};

inline double norm(const CVec3& v) {
    return std::sqrt(std::norm(v.x) + std::norm(v.y) + std::norm(v.z));
}

/// Wraps an angle to the half-open interval (-pi, pi].
inline double wrap_angle(double phi) {
    double w = std::remainder(phi, 2.0 * pi);
    if (w <= -pi) w += 2.0 * pi;
    return w;
}

} // namespace riswave

#endif
