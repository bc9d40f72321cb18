#ifndef RISWAVE_REFLECTION_DESIGN_HPP
#define RISWAVE_REFLECTION_DESIGN_HPP

#include <string>
#include <vector>

#include "riswave/em_model.hpp"
#include "riswave/geometry.hpp"
#include "riswave/surface_grid.hpp"

namespace riswave {

/// Focal line parallel to e_x through (0, f_y, f_z), f_z > 0.
struct FocalLine {
    FocalLine(double f_y_m, double f_z_m);
    double f_y;
    double f_z;
};

/// Focal point (f_x, f_y, f_z), f_z > 0.
struct FocalPoint {
    FocalPoint(double f_x_m, double f_y_m, double f_z_m);
    double f_x;
    double f_y;
    double f_z;
};

/// Line-source current intensity |I1| with phase pinned to 0.
struct LineCurrent {
    explicit LineCurrent(double magnitude_a);
    double magnitude; // A
    static constexpr double phase = 0.0;
};

/// Point-source radiation magnitude |U1| with phase pinned to 0.
struct PointSourceMagnitude {
    explicit PointSourceMagnitude(double magnitude_vm);
    double magnitude; // V*m
    static constexpr double phase = 0.0;
};

// --- phase profiles -------------------------------------------------------

/// Planar reflection phase k*y*(sin(theta_in) - sin(theta_out)), wrapped.
double beta_planar(double y, double theta_in, double theta_out, const Medium& medium);

/// Planar reflection amplitude, identically 1.
double tau_planar();

/// Outgoing angle that points the planar reflection at a target:
/// arctan(target_y / target_z); requires target_z > 0.
double planar_theta_for_target(const Vec3& target);

/// Cylindrical reflection phase -angle(-H0^(2)(k R)) + k sin(theta_in) y,
/// wrapped; R = sqrt((y - f_y)^2 + f_z^2). Independent of x.
double beta_cylindrical(double x, double y, const FocalLine& line, double theta_in,
                        const Medium& medium);

/// Line-source intensity |I1| fixed by power conservation between the plate
/// and the angular slice of the cylindrical wave it feeds:
///   P_inc = E0^2 a b cos(theta_in) / (2 eta)
///   P_refl = [(atan((f_y+a/2)/f_z) - atan((f_y-a/2)/f_z)) / (2 pi)]
///            * |I1|^2 k eta b / (16 pi)
LineCurrent line_current_magnitude(const RisAperture& aperture, const IncidentWave& wave,
                                   const FocalLine& line, const Medium& medium);

/// Cylindrical reflection amplitude (|I1| k eta / 4) |H0^(2)(k R)| / E0.
double tau_cylindrical(double x, double y, const FocalLine& line, const LineCurrent& current,
                       const IncidentWave& wave, const Medium& medium);

/// Spherical reflection phase -k R_s + k sin(theta_in) y, wrapped;
/// R_s = sqrt((x - f_x)^2 + (y - f_y)^2 + f_z^2).
double beta_spherical(double x, double y, const FocalPoint& point, double theta_in,
                      const Medium& medium);

/// Solid angle subtended by the plate at the focal point, by quadrature of
/// f_z / R_s^3 over the plate.
double solid_angle(const RisAperture& aperture, const FocalPoint& point,
                   const SurfaceGrid& grid);

/// Point-source magnitude |U1| = E0 sqrt(a b cos(theta_in) / Omega).
PointSourceMagnitude point_source_magnitude(const RisAperture& aperture,
                                            const IncidentWave& wave, const FocalPoint& point,
                                            const Medium& medium, const SurfaceGrid& grid);

/// Spherical reflection amplitude |U1| / (R_s E0).
double tau_spherical(double x, double y, const FocalPoint& point,
                     const PointSourceMagnitude& u1, const IncidentWave& wave,
                     const Medium& medium);

// --- bundled design -------------------------------------------------------

enum class DesignKind { planar, cylindrical, spherical };

/// A reflection-coefficient field Gamma(x, y) = tau(x, y) e^{j beta(x, y)}
/// with its power-conservation normalization baked in. Evaluation composes
/// the beta_*/tau_* operations above bitwise. Immutable and pure.
class ReflectionDesign {
  public:
    static ReflectionDesign make_planar(double theta_out, double theta_in,
                                        const Medium& medium);
    static ReflectionDesign make_cylindrical(const FocalLine& line, const IncidentWave& wave,
                                             const Medium& medium, const RisAperture& aperture);
    static ReflectionDesign make_spherical(const FocalPoint& point, const IncidentWave& wave,
                                           const Medium& medium, const RisAperture& aperture,
                                           const SurfaceGrid& grid);

    DesignKind kind() const { return kind_; }
    bool x_invariant() const { return kind_ != DesignKind::spherical; }

    double tau(double x, double y) const;
    double beta(double x, double y) const;
    Complex gamma(double x, double y) const;

    /// One-line description of kind and parameters, used by exporters.
    std::string description() const;

    double theta_out() const;                 // planar only
    const FocalLine& focal_line() const;      // cylindrical only
    const FocalPoint& focal_point() const;    // spherical only
    double normalization_magnitude() const;   // |I1| or |U1|; 1 for planar

  private:
    ReflectionDesign() = default;

    DesignKind kind_ = DesignKind::planar;
    double theta_in_ = 0.0;
    double theta_out_ = 0.0;
    double e0_ = 1.0;
    double wavenumber_ = 0.0;
    double impedance_ = 0.0;
    FocalLine line_{0.0, 1.0};
    FocalPoint point_{0.0, 0.0, 1.0};
    double normalization_ = 1.0;
};

/// Removes 2*pi jumps from a phase profile sampled along one axis, in place.
/// First sample is kept; later samples are shifted by multiples of 2*pi so
/// consecutive differences stay within (-pi, pi].
void unwrap_phase_profile(std::vector<double>& phases);

} // namespace riswave

#endif
