#include "riswave/reflection_design.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "riswave/special_functions.hpp"

namespace riswave {

FocalLine::FocalLine(double f_y_m, double f_z_m) : f_y(f_y_m), f_z(f_z_m) {
    if (!(f_z_m > 0.0)) throw std::invalid_argument("FocalLine: f_z must be > 0");
}

FocalPoint::FocalPoint(double f_x_m, double f_y_m, double f_z_m)
    : f_x(f_x_m), f_y(f_y_m), f_z(f_z_m) {
    if (!(f_z_m > 0.0)) throw std::invalid_argument("FocalPoint: f_z must be > 0");
}

LineCurrent::LineCurrent(double magnitude_a) : magnitude(magnitude_a) {
    if (!(magnitude_a >= 0.0)) throw std::invalid_argument("LineCurrent: magnitude must be >= 0");
}

PointSourceMagnitude::PointSourceMagnitude(double magnitude_vm) : magnitude(magnitude_vm) {
    if (!(magnitude_vm >= 0.0))
        throw std::invalid_argument("PointSourceMagnitude: magnitude must be >= 0");
}

double beta_planar(double y, double theta_in, double theta_out, const Medium& medium) {
    return wrap_angle(medium.wavenumber() * y * (std::sin(theta_in) - std::sin(theta_out)));
}

double tau_planar() { return 1.0; }

double planar_theta_for_target(const Vec3& target) {
    if (!(target.z > 0.0))
        throw std::invalid_argument("planar_theta_for_target: target must be above the plate");
    return std::atan(target.y / target.z);
}

namespace {

double cylindrical_radius(double y, const FocalLine& line) {
    const double dy = y - line.f_y;
    return std::sqrt(dy * dy + line.f_z * line.f_z);
}

double spherical_radius(double x, double y, const FocalPoint& point) {
    const double dx = x - point.f_x;
    const double dy = y - point.f_y;
    return std::sqrt(dx * dx + dy * dy + point.f_z * point.f_z);
}

} // namespace

double beta_cylindrical(double x, double y, const FocalLine& line, double theta_in,
                        const Medium& medium) {
    (void)x; // phase depends on y only; the focal line is parallel to e_x
    const double k = medium.wavenumber();
    const Complex h = hankel2(BesselOrder::zero(), k * cylindrical_radius(y, line));
    return wrap_angle(-std::arg(-h) + k * std::sin(theta_in) * y);
}

LineCurrent line_current_magnitude(const RisAperture& aperture, const IncidentWave& wave,
                                   const FocalLine& line, const Medium& medium) {
    const double a = aperture.length_y();
    const double b = aperture.length_x();
    const double eta = medium.impedance();
    const double e0 = wave.e0();

    const double p_incident =
        e0 * e0 * a * b * std::cos(wave.theta_in()) / (2.0 * eta);
    const double angular_fraction =
        (std::atan((line.f_y + 0.5 * a) / line.f_z) - std::atan((line.f_y - 0.5 * a) / line.f_z)) /
        (2.0 * pi);
    if (!(angular_fraction > 0.0))
        throw std::domain_error("line_current_magnitude: plate subtends zero angle at the focal line");

    // P_refl = angular_fraction * |I1|^2 k eta b / (16 pi) = P_inc
    const double i1_sq =
        p_incident * 16.0 * pi / (angular_fraction * medium.wavenumber() * eta * b);
    return LineCurrent(std::sqrt(i1_sq));
}

double tau_cylindrical(double x, double y, const FocalLine& line, const LineCurrent& current,
                       const IncidentWave& wave, const Medium& medium) {
    (void)x;
    const double k = medium.wavenumber();
    const Complex h = hankel2(BesselOrder::zero(), k * cylindrical_radius(y, line));
    // The conjugation and the unit-modulus incident phase factor drop out of
    // the magnitude.
    return current.magnitude * k * medium.impedance() * 0.25 * std::abs(h) / wave.e0();
}

double beta_spherical(double x, double y, const FocalPoint& point, double theta_in,
                      const Medium& medium) {
    const double k = medium.wavenumber();
    return wrap_angle(-k * spherical_radius(x, y, point) + k * std::sin(theta_in) * y);
}

double solid_angle([[maybe_unused]] const RisAperture& aperture, const FocalPoint& point,
                   const SurfaceGrid& grid) {
    const double result =
        grid.cell_area() *
        pairwise_reduce<double>(grid.count(), 0.0, [&](std::size_t node) {
            const double r = spherical_radius(grid.node_x_of(node), grid.node_y_of(node), point);
            return point.f_z / (r * r * r);
        });
    return result;
}

PointSourceMagnitude point_source_magnitude(const RisAperture& aperture,
                                            const IncidentWave& wave, const FocalPoint& point,
                                            [[maybe_unused]] const Medium& medium,
                                            const SurfaceGrid& grid) {
    // eta cancels between P_incident and P_reflected.
    const double omega = solid_angle(aperture, point, grid);
    if (!(omega > 0.0))
        throw std::domain_error("point_source_magnitude: solid angle must be > 0");
    return PointSourceMagnitude(
        wave.e0() *
        std::sqrt(aperture.area() * std::cos(wave.theta_in()) / omega));
}

double tau_spherical(double x, double y, const FocalPoint& point,
                     const PointSourceMagnitude& u1, const IncidentWave& wave,
                     [[maybe_unused]] const Medium& medium) {
    return u1.magnitude / (spherical_radius(x, y, point) * wave.e0());
}

// --- ReflectionDesign -----------------------------------------------------

ReflectionDesign ReflectionDesign::make_planar(double theta_out, double theta_in,
                                               const Medium& medium) {
    ReflectionDesign d;
    d.kind_ = DesignKind::planar;
    d.theta_in_ = theta_in;
    d.theta_out_ = theta_out;
    d.wavenumber_ = medium.wavenumber();
    d.impedance_ = medium.impedance();
    d.normalization_ = 1.0;
    return d;
}

ReflectionDesign ReflectionDesign::make_cylindrical(const FocalLine& line,
                                                    const IncidentWave& wave,
                                                    const Medium& medium,
                                                    const RisAperture& aperture) {
    ReflectionDesign d;
    d.kind_ = DesignKind::cylindrical;
    d.theta_in_ = wave.theta_in();
    d.e0_ = wave.e0();
    d.wavenumber_ = medium.wavenumber();
    d.impedance_ = medium.impedance();
    d.line_ = line;
    d.normalization_ = line_current_magnitude(aperture, wave, line, medium).magnitude;
    return d;
}

ReflectionDesign ReflectionDesign::make_spherical(const FocalPoint& point,
                                                  const IncidentWave& wave,
                                                  const Medium& medium,
                                                  const RisAperture& aperture,
                                                  const SurfaceGrid& grid) {
    ReflectionDesign d;
    d.kind_ = DesignKind::spherical;
    d.theta_in_ = wave.theta_in();
    d.e0_ = wave.e0();
    d.wavenumber_ = medium.wavenumber();
    d.impedance_ = medium.impedance();
    d.point_ = point;
    d.normalization_ = point_source_magnitude(aperture, wave, point, medium, grid).magnitude;
    return d;
}

double ReflectionDesign::tau(double x, double y) const {
    switch (kind_) {
        case DesignKind::planar:
            return tau_planar();
        case DesignKind::cylindrical: {
            const Complex h = hankel2(BesselOrder::zero(), wavenumber_ * cylindrical_radius(y, line_));
            return normalization_ * wavenumber_ * impedance_ * 0.25 * std::abs(h) / e0_;
        }
        case DesignKind::spherical:
            return normalization_ / (spherical_radius(x, y, point_) * e0_);
    }
    return 0.0;
}

double ReflectionDesign::beta(double x, double y) const {
    switch (kind_) {
        case DesignKind::planar:
            return wrap_angle(wavenumber_ * y * (std::sin(theta_in_) - std::sin(theta_out_)));
        case DesignKind::cylindrical: {
            const Complex h = hankel2(BesselOrder::zero(), wavenumber_ * cylindrical_radius(y, line_));
            return wrap_angle(-std::arg(-h) + wavenumber_ * std::sin(theta_in_) * y);
        }
        case DesignKind::spherical:
            return wrap_angle(-wavenumber_ * spherical_radius(x, y, point_) +
                              wavenumber_ * std::sin(theta_in_) * y);
    }
    return 0.0;
}

Complex ReflectionDesign::gamma(double x, double y) const {
    return std::polar(tau(x, y), beta(x, y));
}

std::string ReflectionDesign::description() const {
    char buf[160];
    switch (kind_) {
        case DesignKind::planar:
            std::snprintf(buf, sizeof buf, "planar theta_out_rad=%.17g", theta_out_);
            break;
        case DesignKind::cylindrical:
            std::snprintf(buf, sizeof buf, "cylindrical f_y_m=%.17g f_z_m=%.17g i1_a=%.17g",
                          line_.f_y, line_.f_z, normalization_);
            break;
        case DesignKind::spherical:
            std::snprintf(buf, sizeof buf,
                          "spherical f_x_m=%.17g f_y_m=%.17g f_z_m=%.17g u1_vm=%.17g",
                          point_.f_x, point_.f_y, point_.f_z, normalization_);
            break;
    }
    return buf;
}

double ReflectionDesign::theta_out() const {
    if (kind_ != DesignKind::planar)
        throw std::logic_error("ReflectionDesign: theta_out is planar-only");
    return theta_out_;
}

const FocalLine& ReflectionDesign::focal_line() const {
    if (kind_ != DesignKind::cylindrical)
        throw std::logic_error("ReflectionDesign: focal_line is cylindrical-only");
    return line_;
}

const FocalPoint& ReflectionDesign::focal_point() const {
    if (kind_ != DesignKind::spherical)
        throw std::logic_error("ReflectionDesign: focal_point is spherical-only");
    return point_;
}

double ReflectionDesign::normalization_magnitude() const { return normalization_; }

void unwrap_phase_profile(std::vector<double>& phases) {
    for (std::size_t i = 1; i < phases.size(); ++i) {
        const double jump = phases[i] - phases[i - 1];
        phases[i] -= 2.0 * pi * std::round(jump / (2.0 * pi));
    }
}

} // namespace riswave
