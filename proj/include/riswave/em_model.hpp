#ifndef RISWAVE_EM_MODEL_HPP
#define RISWAVE_EM_MODEL_HPP

#include <utility>

#include "riswave/geometry.hpp"

namespace riswave {

/// Homogeneous propagation medium: wavelength lambda [m], wavenumber
/// k = 2*pi/lambda [rad/m] (derived), characteristic impedance eta [Ohm].
class Medium {
  public:
    Medium(double wavelength_m, double impedance_ohm);

    double wavelength() const { return wavelength_; }
    double wavenumber() const { return wavenumber_; }
    double impedance() const { return impedance_; }

  private:
    double wavelength_;
    double wavenumber_;
    double impedance_;
};

/// Rectangular reflecting plate of length a along e_y and b along e_x,
/// occupying x in [-b/2, b/2], y in [-a/2, a/2], z = 0.
class RisAperture {
  public:
    RisAperture(double length_y_m, double length_x_m);

    double length_y() const { return length_y_; } // a
    double length_x() const { return length_x_; } // b
    double area() const { return length_y_ * length_x_; }

  private:
    double length_y_;
    double length_x_;
};

/// Incident TM-x plane wave from a far-field point source.
///
/// The source magnitude A, field amplitude E0 at the plate, transmit power
/// P_t and transmit gain G_t are tied together by A^2 = P_t*G_t*eta/(2*pi)
/// and E0 = A/l; the factories derive the dependent fields so both identities
/// hold exactly as stored. The raw constructor checks them and rejects
/// inconsistent values.
class IncidentWave {
  public:
    IncidentWave(double e0_v_per_m, double theta_in_rad, double source_distance_m,
                 double source_magnitude_v, double tx_power_w, double tx_gain,
                 const Medium& medium);

    /// Builds from the plate-side field amplitude E0; derives A, P_t.
    static IncidentWave from_field_amplitude(double e0_v_per_m, double theta_in_rad,
                                             double source_distance_m, double tx_gain,
                                             const Medium& medium);

    /// Builds from transmit power and gain; derives A, E0.
    static IncidentWave from_transmit_power(double tx_power_w, double tx_gain,
                                            double theta_in_rad, double source_distance_m,
                                            const Medium& medium);

    double e0() const { return e0_; }
    double theta_in() const { return theta_in_; }
    double source_distance() const { return source_distance_; }
    double source_magnitude() const { return source_magnitude_; }
    double tx_power() const { return tx_power_; }
    double tx_gain() const { return tx_gain_; }

  private:
    double e0_;
    double theta_in_;
    double source_distance_;
    double source_magnitude_;
    double tx_power_;
    double tx_gain_;
};

/// Uniform linear array receiver: M antennas spanning length L, centered at
/// `center`, tilted by the attitude angle phi away from e_x within the plane
/// perpendicular to e_y.
class UlaReceiver {
  public:
    UlaReceiver(int num_antennas, double length_m, Vec3 center, double attitude_phi_rad,
                double rx_gain);

    int num_antennas() const { return num_antennas_; }
    double length() const { return length_; }
    const Vec3& center() const { return center_; }
    double attitude_phi() const { return attitude_phi_; }
    double rx_gain() const { return rx_gain_; }

    UlaReceiver with_center(Vec3 center) const;
    UlaReceiver with_attitude(double attitude_phi_rad) const;

  private:
    int num_antennas_;
    double length_;
    Vec3 center_;
    double attitude_phi_;
    double rx_gain_;
};

/// Position of the m-th antenna (1-based):
/// center + L*((m-1)/(M-1) - 1/2)*(cos phi, 0, sin phi); center itself for M = 1.
Vec3 antenna_position(const UlaReceiver& rx, int m);

/// Radiating near field (Fresnel) bounds of the plate:
///   d_min = 0.62*sqrt((a^2+b^2)^{3/2}/lambda),  d_max = 2*(a^2+b^2)/lambda.
/// Returns the pair even when d_min >= d_max; the caller decides whether the
/// region exists.
std::pair<double, double> radiating_near_field_bounds(const RisAperture& aperture,
                                                      const Medium& medium);

/// Incident plane-wave E and H fields at a point, TM-x configuration:
///   E = E0 e^{-jk(sin(theta_in) y - cos(theta_in) z)} e_x
///   H = -(E0/eta)(cos(theta_in) e_y + sin(theta_in) e_z) e^{-jk(...)}
std::pair<CVec3, CVec3> incident_fields(const IncidentWave& wave, const Medium& medium,
                                        const Vec3& point);

} // namespace riswave

#endif
