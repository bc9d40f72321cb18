#ifndef RISWAVE_CONFIG_HPP
#define RISWAVE_CONFIG_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "riswave/em_model.hpp"
#include "riswave/sensing.hpp"

namespace riswave {

/// Experiment configuration, a faithful mirror of the flat sectioned
/// key-value config text. Angle fields are stored in degrees and gains in dB
/// exactly as parsed; conversion to radians/linear happens once when the
/// scenario objects are built. Defaults reproduce the reference desk-scale
/// setup: lambda = 0.1 m, a = b = 20 lambda, theta_in = 30 deg, E0 = 1 V/m,
/// M = 128, L = 20 lambda, G_t = G_r = 5 dB, eta = 377 Ohm.
struct ExperimentConfig {
    struct MediumSection {
        double wavelength_m = 0.1;
        double impedance_ohm = 377.0;
        bool operator==(const MediumSection&) const = default;
    } medium;

    struct ApertureSection {
        double a_m = 2.0;
        double b_m = 2.0;
        bool operator==(const ApertureSection&) const = default;
    } aperture;

    struct IncidentSection {
        double theta_in_deg = 30.0;
        double e0_v_per_m = 1.0;
        double tx_gain_db = 5.0;
        double source_distance_m = 1000.0;
        double tx_power_w = 0.0; // 0 = derive from e0 via A = E0 l
        bool operator==(const IncidentSection&) const = default;
    } incident;

    struct ReceiverSection {
        int num_antennas = 128;
        double length_m = 2.0;
        double center_x_m = 0.0;
        double center_y_m = 8.0;
        double center_z_m = 8.0;
        double attitude_phi_deg = 0.0;
        double rx_gain_db = 5.0;
        bool operator==(const ReceiverSection&) const = default;
    } receiver;

    struct NumericsSection {
        double samples_per_wavelength = 8.0;
        int n_l = 32;
        bool operator==(const NumericsSection&) const = default;
    } numerics;

    struct ExportSection {
        std::string design = "cylindrical";
        bool operator==(const ExportSection&) const = default;
    } design_export;

    struct ArcSection {
        double theta_min_deg = 0.05;
        double theta_max_deg = 89.95;
        double theta_step_deg = 0.05;
        double d_m = 0.0; // 0 = distance of the receiver center
        std::string design = "cylindrical";
        bool operator==(const ArcSection&) const = default;
    } arc;

    struct FieldMapSection {
        double y_min_m = 0.5;
        double y_max_m = 16.0;
        double z_min_m = 0.5;
        double z_max_m = 16.0;
        int count_y = 64;
        int count_z = 64;
        std::string design = "cylindrical";
        bool operator==(const FieldMapSection&) const = default;
    } field_map;

    struct CapacitySection {
        double snr_min_db = 0.0;
        double snr_max_db = 30.0;
        double snr_step_db = 2.0;
        std::string design = "cylindrical";
        bool operator==(const CapacitySection&) const = default;
    } capacity;

    struct ScanSection {
        // Arc scan (sense-location): d multiples of d_step inside [d_min, d_max],
        // psi multiples of psi_step inside (0, 90) deg. d_min/d_max of 0 mean
        // the radiating-near-field bound / 300 lambda.
        double d_min_m = 0.0;
        double d_max_m = 0.0;
        double d_step_m = 0.2;     // 2 lambda at the default wavelength
        double psi_step_deg = 1.0;
        std::string design = "cylindrical";
        double sigma = 0.0;
        bool operator==(const ScanSection&) const = default;
    } scan;

    struct MlSection {
        // Cartesian in-plane grid for ML and the Monte Carlo harness,
        // centered on the receiver center. The default step is twice the
        // reference sensing resolution 1e-4 * d0 at d0 = 180 lambda.
        double step_m = 0.0036;
        int count_per_axis = 21;
        std::string design = "cylindrical";
        double sigma = 0.0;
        bool operator==(const MlSection&) const = default;
    } ml;

    struct AttitudeSection {
        // default range stays inside the strictly decreasing part of the
        // profile so the monotone inversion works out of the box
        double phi_min_deg = 0.0;
        double phi_max_deg = 44.0;
        double phi_step_deg = 2.0;
        std::string design = "cylindrical";
        double measured_power_w = -1.0; // < 0: profile only
        bool operator==(const AttitudeSection&) const = default;
    } attitude;

    struct PebSection {
        double snr_db = 20.0;
        std::string design = "cylindrical";
        bool operator==(const PebSection&) const = default;
    } peb;

    struct RmseSection {
        std::vector<double> snr_db_list{0.0, 10.0, 20.0};
        int trials = 200;
        bool off_grid = false;
        std::string design = "cylindrical";
        bool operator==(const RmseSection&) const = default;
    } rmse;

    std::uint64_t seed = 1;

    bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the sectioned key-value text. Unknown sections or keys, malformed
/// values and out-of-range values are rejected with the offending key path
/// in the message.
ExperimentConfig parse_config(const std::string& text);

/// Canonical serialization; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ExperimentConfig& config);

/// FNV-1a hash of the canonical serialization, hex string.
std::string config_hash(const ExperimentConfig& config);

/// Physical scenario objects built from a config (converted once).
struct Scenario {
    Scenario(const ExperimentConfig& config);

    Medium medium;
    RisAperture aperture;
    IncidentWave wave;
    UlaReceiver receiver;
    SurfaceGrid surface;
    std::shared_ptr<const ScanContext> scan_context;
    ExperimentConfig config;
};

DesignKind parse_design_kind(const std::string& name);
const char* design_kind_name(DesignKind kind);

} // namespace riswave

#endif
