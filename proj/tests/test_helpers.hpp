#ifndef RISWAVE_TEST_HELPERS_HPP
#define RISWAVE_TEST_HELPERS_HPP

// Reference desk-scale scenario shared across test suites: lambda = 0.1 m,
// a = b = 20 lambda, theta_in = 30 deg, E0 = 1 V/m, M = 128, L = 20 lambda,
// G_t = G_r = 5 dB, l = 1000 m.

#include <cmath>
#include <memory>

#include "riswave/em_model.hpp"
#include "riswave/sensing.hpp"

namespace riswave::testing {

inline Medium desk_medium() { return Medium(0.1, 377.0); }
inline RisAperture desk_aperture() { return RisAperture(2.0, 2.0); }

inline IncidentWave desk_wave(const Medium& medium, double theta_in_deg = 30.0) {
    return IncidentWave::from_field_amplitude(1.0, theta_in_deg * pi / 180.0, 1000.0,
                                              std::pow(10.0, 0.5), medium);
}

inline UlaReceiver desk_receiver(Vec3 center = {0.0, 8.0, 8.0}, int antennas = 128) {
    return UlaReceiver(antennas, 2.0, center, 0.0, std::pow(10.0, 0.5));
}

inline std::shared_ptr<ScanContext> desk_context(int antennas = 128,
                                                 double samples_per_wavelength = 8.0) {
    const Medium medium = desk_medium();
    return std::make_shared<ScanContext>(desk_aperture(), medium, desk_wave(medium), antennas,
                                         2.0, std::pow(10.0, 0.5), samples_per_wavelength);
}

} // namespace riswave::testing

#endif
