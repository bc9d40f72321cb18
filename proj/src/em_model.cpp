#include "riswave/em_model.hpp"

#include <cmath>
#include <stdexcept>

namespace riswave {

Medium::Medium(double wavelength_m, double impedance_ohm)
    : wavelength_(wavelength_m), wavenumber_(2.0 * pi / wavelength_m),
      impedance_(impedance_ohm) {
    if (!(wavelength_m > 0.0) || !std::isfinite(wavelength_m))
        throw std::invalid_argument("Medium: wavelength must be > 0");
    if (!(impedance_ohm > 0.0) || !std::isfinite(impedance_ohm))
        throw std::invalid_argument("Medium: impedance must be > 0");
}

RisAperture::RisAperture(double length_y_m, double length_x_m)
    : length_y_(length_y_m), length_x_(length_x_m) {
    if (!(length_y_m > 0.0) || !(length_x_m > 0.0))
        throw std::invalid_argument("RisAperture: plate lengths must be > 0");
}

IncidentWave::IncidentWave(double e0_v_per_m, double theta_in_rad, double source_distance_m,
                           double source_magnitude_v, double tx_power_w, double tx_gain,
                           const Medium& medium)
    : e0_(e0_v_per_m), theta_in_(theta_in_rad), source_distance_(source_distance_m),
      source_magnitude_(source_magnitude_v), tx_power_(tx_power_w), tx_gain_(tx_gain) {
    if (!(e0_v_per_m > 0.0)) throw std::invalid_argument("IncidentWave: E0 must be > 0");
    if (!(theta_in_rad >= 0.0 && theta_in_rad < 0.5 * pi))
        throw std::invalid_argument("IncidentWave: theta_in must be in [0, pi/2)");
    if (!(source_distance_m > 0.0))
        throw std::invalid_argument("IncidentWave: source distance must be > 0");
    if (!(tx_power_w > 0.0) || !(tx_gain > 0.0))
        throw std::invalid_argument("IncidentWave: transmit power and gain must be > 0");
    // A^2 = P_t G_t eta / (2 pi) must hold as stored.
    const double a2 = tx_power_w * tx_gain * medium.impedance() / (2.0 * pi);
    const double stored = source_magnitude_v * source_magnitude_v;
    if (std::abs(stored - a2) > 8.0 * std::abs(a2) * 1e-16)
        throw std::invalid_argument(
            "IncidentWave: source magnitude inconsistent with P_t*G_t*eta/(2*pi)");
}

IncidentWave IncidentWave::from_field_amplitude(double e0_v_per_m, double theta_in_rad,
                                                double source_distance_m, double tx_gain,
                                                const Medium& medium) {
    const double a = e0_v_per_m * source_distance_m;
    const double tx_power = 2.0 * pi * a * a / (medium.impedance() * tx_gain);
    return IncidentWave(e0_v_per_m, theta_in_rad, source_distance_m, a, tx_power, tx_gain,
                        medium);
}

IncidentWave IncidentWave::from_transmit_power(double tx_power_w, double tx_gain,
                                               double theta_in_rad, double source_distance_m,
                                               const Medium& medium) {
    const double a = std::sqrt(tx_power_w * tx_gain * medium.impedance() / (2.0 * pi));
    return IncidentWave(a / source_distance_m, theta_in_rad, source_distance_m, a, tx_power_w,
                        tx_gain, medium);
}

UlaReceiver::UlaReceiver(int num_antennas, double length_m, Vec3 center,
                         double attitude_phi_rad, double rx_gain)
    : num_antennas_(num_antennas), length_(length_m), center_(center),
      attitude_phi_(attitude_phi_rad), rx_gain_(rx_gain) {
    if (num_antennas < 1) throw std::invalid_argument("UlaReceiver: need at least 1 antenna");
    if (!(length_m >= 0.0)) throw std::invalid_argument("UlaReceiver: length must be >= 0");
    if (!(rx_gain > 0.0)) throw std::invalid_argument("UlaReceiver: rx gain must be > 0");
}

UlaReceiver UlaReceiver::with_center(Vec3 center) const {
    return UlaReceiver(num_antennas_, length_, center, attitude_phi_, rx_gain_);
}

UlaReceiver UlaReceiver::with_attitude(double attitude_phi_rad) const {
    return UlaReceiver(num_antennas_, length_, center_, attitude_phi_rad, rx_gain_);
}

Vec3 antenna_position(const UlaReceiver& rx, int m) {
    const int count = rx.num_antennas();
    if (m < 1 || m > count) throw std::out_of_range("antenna_position: index out of range");
    if (count == 1) return rx.center();
    const double offset =
        rx.length() * ((m - 1) / static_cast<double>(count - 1) - 0.5);
    const Vec3 axis{std::cos(rx.attitude_phi()), 0.0, std::sin(rx.attitude_phi())};
    return rx.center() + offset * axis;
}

std::pair<double, double> radiating_near_field_bounds(const RisAperture& aperture,
                                                      const Medium& medium) {
    const double a = aperture.length_y();
    const double b = aperture.length_x();
    const double s = a * a + b * b;
    const double d_min = 0.62 * std::sqrt(s * std::sqrt(s) / medium.wavelength());
    const double d_max = 2.0 * s / medium.wavelength();
    return {d_min, d_max};
}

std::pair<CVec3, CVec3> incident_fields(const IncidentWave& wave, const Medium& medium,
                                        const Vec3& point) {
    const double k = medium.wavenumber();
    const double sin_t = std::sin(wave.theta_in());
    const double cos_t = std::cos(wave.theta_in());
    const double phase = -k * (sin_t * point.y - cos_t * point.z);
    const Complex phasor{std::cos(phase), std::sin(phase)};

    CVec3 e;
    e.x = wave.e0() * phasor;

    const double h0 = -wave.e0() / medium.impedance();
    CVec3 h;
    h.y = h0 * cos_t * phasor;
    h.z = h0 * sin_t * phasor;
    return {e, h};
}

} // namespace riswave
