#ifndef RISWAVE_PROPAGATION_HPP
#define RISWAVE_PROPAGATION_HPP

#include <span>
#include <vector>

#include "riswave/em_model.hpp"
#include "riswave/geometry.hpp"
#include "riswave/reflection_design.hpp"
#include "riswave/surface_grid.hpp"

namespace riswave {

/// Per-antenna complex channel gains h, length M.
class ChannelVector {
  public:
    explicit ChannelVector(std::vector<Complex> entries);

    std::size_t size() const { return entries_.size(); }
    const Complex& operator[](std::size_t m) const { return entries_[m]; }
    const std::vector<Complex>& entries() const { return entries_; }

    double squared_norm() const;

  private:
    std::vector<Complex> entries_;
};

/// Complex E-field sample at an observation point above the plate (z > 0).
class FieldSample {
  public:
    FieldSample(Vec3 position, CVec3 e_field);

    const Vec3& position() const { return position_; }
    const CVec3& e_field() const { return e_field_; }

  private:
    Vec3 position_;
    CVec3 e_field_;
};

/// Euclidean distance from plate point (x, y, 0) to an antenna at z > 0.
double path_distance(double x, double y, const Vec3& antenna);

/// Angle between e_z and the plate-to-antenna vector.
double obliquity_angle(double x, double y, const Vec3& antenna);

/// Design-free Fresnel-Kirchhoff contribution of a unit plate area to the
/// field at one antenna:
///   (A / (j lambda)) e^{-jk(l + y sin(theta_in))}/l e^{-jkd}/d
///   * (cos(theta_in) + cos(theta_out)) / 2
/// The e^{-jk...} sign follows the plane-wave model of incident_fields; see
/// the steering-vector convention below.
Complex kirchhoff_contribution(double x, double y, const Vec3& antenna,
                               const IncidentWave& wave, const Medium& medium);

/// Steering vector entry m: (1/sqrt(M)) e^{-jk(l + y sin(theta_in) + d(x,y,m))},
/// with the e^{-jk} sign uniform across antennas.
std::vector<Complex> steering_vector(double x, double y, const UlaReceiver& rx,
                                     const IncidentWave& wave, const Medium& medium);

/// Path-gain entry m: (sqrt(M)/(2 j l lambda)) (cos(theta_in)+cos(theta_out,m))/d_m.
std::vector<Complex> path_gain_vector(double x, double y, const UlaReceiver& rx,
                                      const IncidentWave& wave, const Medium& medium);

/// Channel gain per unit area g = (lambda/(4 pi)) q sqrt(G_t G_r); combined
/// with the steering vector this reproduces the EM-route field power exactly.
std::vector<Complex> channel_gain_vector(double x, double y, const UlaReceiver& rx,
                                         const IncidentWave& wave, const Medium& medium);

/// Channel vector h = sum_nodes tau e^{j beta} (g o b) dA, each antenna
/// accumulated in the fixed pairwise tree order of the grid's node indices.
ChannelVector channel_vector(const ReflectionDesign& design, const SurfaceGrid& grid,
                             const UlaReceiver& rx, const IncidentWave& wave,
                             const Medium& medium);

/// Same integral with the plate-x sum factored out per row; valid only for
/// x-invariant designs (planar, cylindrical). Agrees with channel_vector to
/// reassociation-level rounding and is much faster when many designs are
/// evaluated against fixed antennas (focal scanning).
class RowFactoredChannel {
  public:
    RowFactoredChannel(const SurfaceGrid& grid, const UlaReceiver& rx,
                       const IncidentWave& wave, const Medium& medium);

    /// h for one x-invariant design against the precomputed antenna rows.
    ChannelVector evaluate(const ReflectionDesign& design) const;

    /// h against row factors precomputed by design_row_factors.
    ChannelVector evaluate(std::span<const Complex> row_factors) const;

    std::size_t num_antennas() const { return num_antennas_; }

  private:
    std::size_t num_antennas_;
    std::size_t rows_;
    std::vector<Complex> row_sums_;      // [m * rows + j]: x-summed kernel
    std::vector<double> row_y_;          // node y per row
    Complex prefactor_;
    double k_sin_theta_;
    double cell_area_;
};

/// Per-row design factors Gamma(y_j) e^{-jk y_j sin(theta_in)} dA for an
/// x-invariant design. They depend only on the design and grid, so scans
/// sharing designs across many receivers compute them once.
std::vector<Complex> design_row_factors(const ReflectionDesign& design, const SurfaceGrid& grid,
                                        const IncidentWave& wave, const Medium& medium);

/// Scattered E-field at an observation point by scalar Kirchhoff quadrature:
///   E = e_x sum_nodes Gamma E_in,x (1/(j lambda)) e^{-jkR}/R
///       (cos(theta_in)+cos(theta_obs))/2 dA
FieldSample field_at(const ReflectionDesign& design, const SurfaceGrid& grid,
                     const Vec3& point, const IncidentWave& wave, const Medium& medium);

/// Scattered E-field via the induction-theorem route: equivalent current
/// J_f = -2 (E0/eta) tau e^{j beta} cos(theta_in) e^{-jk sin(theta_in) y} e_x,
/// vector potential with kernel e^{-jkR}/R, and the double curl applied
/// analytically to the kernel under the integral. Validation path; refuses
/// observation points within lambda/10 of the plate.
FieldSample dyadic_field_at(const ReflectionDesign& design, const SurfaceGrid& grid,
                            const Vec3& point, const IncidentWave& wave,
                            const Medium& medium);

/// Normalized power P_n = ||E_obs||^2 / (2 eta d^2) at the arc point
/// (0, d cos(theta), d sin(theta)).
double normalized_arc_power(const ReflectionDesign& design, const SurfaceGrid& grid, double d,
                            double theta, const IncidentWave& wave, const Medium& medium);

/// Received signal power ||h s||^2 for transmit signal power s_power.
double received_power(const ChannelVector& h, double s_power);

/// Received power from per-antenna fields: sum_m ||E_m||^2/(2 eta) lambda^2 G_r/(4 pi).
double received_power_em(std::span<const FieldSample> fields_at_antennas, double rx_gain,
                         const Medium& medium);

/// Channel capacity log2(1 + received_power / noise_power) in bits/s/Hz.
double capacity(double received_power_w, double noise_power_w);

} // namespace riswave

#endif
