#include "riswave/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace riswave {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config: " + path + ": " + what);
}

double parse_double(const std::string& path, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) fail(path, "malformed number '" + value + "'");
        return v;
    } catch (const std::invalid_argument&) {
        fail(path, "malformed number '" + value + "'");
    } catch (const std::out_of_range&) {
        fail(path, "number out of range '" + value + "'");
    }
}

int parse_int(const std::string& path, const std::string& value) {
    const double v = parse_double(path, value);
    if (v != std::floor(v)) fail(path, "expected an integer");
    return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& path, const std::string& value) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(value, &pos);
        if (pos != value.size()) fail(path, "malformed integer '" + value + "'");
        return v;
    } catch (const std::exception&) {
        fail(path, "malformed integer '" + value + "'");
    }
}

bool parse_bool(const std::string& path, const std::string& value) {
    if (value == "true") return true;
    if (value == "false") return false;
    fail(path, "expected true or false");
}

std::vector<double> parse_double_list(const std::string& path, const std::string& value) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(path, "empty list element");
        out.push_back(parse_double(path, item));
    }
    if (out.empty()) fail(path, "empty list");
    return out;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_design_name(const std::string& path, const std::string& name) {
    if (name != "planar" && name != "cylindrical" && name != "spherical")
        fail(path, "design must be planar, cylindrical or spherical");
}

} // namespace

DesignKind parse_design_kind(const std::string& name) {
    if (name == "planar") return DesignKind::planar;
    if (name == "cylindrical") return DesignKind::cylindrical;
    if (name == "spherical") return DesignKind::spherical;
    throw std::invalid_argument("unknown design kind '" + name + "'");
}

const char* design_kind_name(DesignKind kind) {
    switch (kind) {
        case DesignKind::planar: return "planar";
        case DesignKind::cylindrical: return "cylindrical";
        case DesignKind::spherical: return "spherical";
    }
    return "?";
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::string section;
    std::stringstream stream(text);
    std::string line;
    int line_no = 0;

    const auto apply = [&cfg](const std::string& section, const std::string& key,
                              const std::string& value) {
        const std::string path = section.empty() ? key : section + "." + key;
        if (section.empty()) {
            if (key == "seed") cfg.seed = parse_u64(path, value);
            else fail(path, "unknown key");
        } else if (section == "medium") {
            if (key == "wavelength_m") cfg.medium.wavelength_m = parse_double(path, value);
            else if (key == "impedance_ohm") cfg.medium.impedance_ohm = parse_double(path, value);
            else fail(path, "unknown key");
        } else if (section == "aperture") {
            if (key == "a_m") cfg.aperture.a_m = parse_double(path, value);
            else if (key == "b_m") cfg.aperture.b_m = parse_double(path, value);
            else fail(path, "unknown key");
        } else if (section == "incident") {
            if (key == "theta_in_deg") cfg.incident.theta_in_deg = parse_double(path, value);
            else if (key == "e0_v_per_m") cfg.incident.e0_v_per_m = parse_double(path, value);
            else if (key == "tx_gain_db") cfg.incident.tx_gain_db = parse_double(path, value);
            else if (key == "source_distance_m")
                cfg.incident.source_distance_m = parse_double(path, value);
            else if (key == "tx_power_w") cfg.incident.tx_power_w = parse_double(path, value);
            else fail(path, "unknown key");
        } else if (section == "receiver") {
            if (key == "num_antennas") cfg.receiver.num_antennas = parse_int(path, value);
            else if (key == "length_m") cfg.receiver.length_m = parse_double(path, value);
            else if (key == "center_x_m") cfg.receiver.center_x_m = parse_double(path, value);
            else if (key == "center_y_m") cfg.receiver.center_y_m = parse_double(path, value);
            else if (key == "center_z_m") cfg.receiver.center_z_m = parse_double(path, value);
            else if (key == "attitude_phi_deg")
                cfg.receiver.attitude_phi_deg = parse_double(path, value);
            else if (key == "rx_gain_db") cfg.receiver.rx_gain_db = parse_double(path, value);
            else fail(path, "unknown key");
        } else if (section == "numerics") {
            if (key == "samples_per_wavelength")
                cfg.numerics.samples_per_wavelength = parse_double(path, value);
            else if (key == "n_l") cfg.numerics.n_l = parse_int(path, value);
            else fail(path, "unknown key");
        } else if (section == "export") {
            if (key == "design") {
                check_design_name(path, value);
                cfg.design_export.design = value;
            } else fail(path, "unknown key");
        } else if (section == "arc") {
            if (key == "theta_min_deg") cfg.arc.theta_min_deg = parse_double(path, value);
            else if (key == "theta_max_deg") cfg.arc.theta_max_deg = parse_double(path, value);
            else if (key == "theta_step_deg") cfg.arc.theta_step_deg = parse_double(path, value);
            else if (key == "d_m") cfg.arc.d_m = parse_double(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.arc.design = value;
            } else fail(path, "unknown key");
        } else if (section == "field_map") {
            if (key == "y_min_m") cfg.field_map.y_min_m = parse_double(path, value);
            else if (key == "y_max_m") cfg.field_map.y_max_m = parse_double(path, value);
            else if (key == "z_min_m") cfg.field_map.z_min_m = parse_double(path, value);
            else if (key == "z_max_m") cfg.field_map.z_max_m = parse_double(path, value);
            else if (key == "count_y") cfg.field_map.count_y = parse_int(path, value);
            else if (key == "count_z") cfg.field_map.count_z = parse_int(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.field_map.design = value;
            } else fail(path, "unknown key");
        } else if (section == "capacity") {
            if (key == "snr_min_db") cfg.capacity.snr_min_db = parse_double(path, value);
            else if (key == "snr_max_db") cfg.capacity.snr_max_db = parse_double(path, value);
            else if (key == "snr_step_db") cfg.capacity.snr_step_db = parse_double(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.capacity.design = value;
            } else fail(path, "unknown key");
        } else if (section == "scan") {
            if (key == "d_min_m") cfg.scan.d_min_m = parse_double(path, value);
            else if (key == "d_max_m") cfg.scan.d_max_m = parse_double(path, value);
            else if (key == "d_step_m") cfg.scan.d_step_m = parse_double(path, value);
            else if (key == "psi_step_deg") cfg.scan.psi_step_deg = parse_double(path, value);
            else if (key == "sigma") cfg.scan.sigma = parse_double(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.scan.design = value;
            } else fail(path, "unknown key");
        } else if (section == "ml") {
            if (key == "step_m") cfg.ml.step_m = parse_double(path, value);
            else if (key == "count_per_axis") cfg.ml.count_per_axis = parse_int(path, value);
            else if (key == "sigma") cfg.ml.sigma = parse_double(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.ml.design = value;
            } else fail(path, "unknown key");
        } else if (section == "attitude") {
            if (key == "phi_min_deg") cfg.attitude.phi_min_deg = parse_double(path, value);
            else if (key == "phi_max_deg") cfg.attitude.phi_max_deg = parse_double(path, value);
            else if (key == "phi_step_deg") cfg.attitude.phi_step_deg = parse_double(path, value);
            else if (key == "measured_power_w")
                cfg.attitude.measured_power_w = parse_double(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.attitude.design = value;
            } else fail(path, "unknown key");
        } else if (section == "peb") {
            if (key == "snr_db") cfg.peb.snr_db = parse_double(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.peb.design = value;
            } else fail(path, "unknown key");
        } else if (section == "rmse") {
            if (key == "snr_db_list") cfg.rmse.snr_db_list = parse_double_list(path, value);
            else if (key == "trials") cfg.rmse.trials = parse_int(path, value);
            else if (key == "off_grid") cfg.rmse.off_grid = parse_bool(path, value);
            else if (key == "design") {
                check_design_name(path, value);
                cfg.rmse.design = value;
            } else fail(path, "unknown key");
        } else {
            fail(section, "unknown section");
        }
    };

    while (std::getline(stream, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                            ": malformed section header");
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(line_no) +
                                        ": expected key = value");
        apply(section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }

    // Range validation with key paths.
    if (!(cfg.medium.wavelength_m > 0.0)) fail("medium.wavelength_m", "must be > 0");
    if (!(cfg.medium.impedance_ohm > 0.0)) fail("medium.impedance_ohm", "must be > 0");
    if (!(cfg.aperture.a_m > 0.0)) fail("aperture.a_m", "must be > 0");
    if (!(cfg.aperture.b_m > 0.0)) fail("aperture.b_m", "must be > 0");
    if (!(cfg.incident.theta_in_deg >= 0.0 && cfg.incident.theta_in_deg < 90.0))
        fail("incident.theta_in_deg", "must be in [0, 90)");
    if (!(cfg.incident.e0_v_per_m > 0.0)) fail("incident.e0_v_per_m", "must be > 0");
    if (!(cfg.incident.source_distance_m > 0.0))
        fail("incident.source_distance_m", "must be > 0");
    if (!(cfg.incident.tx_power_w >= 0.0)) fail("incident.tx_power_w", "must be >= 0");
    if (cfg.receiver.num_antennas < 1) fail("receiver.num_antennas", "must be >= 1");
    if (!(cfg.receiver.length_m >= 0.0)) fail("receiver.length_m", "must be >= 0");
    if (!(cfg.numerics.samples_per_wavelength > 0.0))
        fail("numerics.samples_per_wavelength", "must be > 0");
    if (cfg.numerics.n_l < 1) fail("numerics.n_l", "must be >= 1");
    if (!(cfg.arc.theta_step_deg > 0.0)) fail("arc.theta_step_deg", "must be > 0");
    if (!(cfg.scan.d_step_m > 0.0)) fail("scan.d_step_m", "must be > 0");
    if (!(cfg.scan.psi_step_deg > 0.0)) fail("scan.psi_step_deg", "must be > 0");
    if (!(cfg.scan.sigma >= 0.0)) fail("scan.sigma", "must be >= 0");
    if (!(cfg.ml.step_m > 0.0)) fail("ml.step_m", "must be > 0");
    if (cfg.ml.count_per_axis < 1) fail("ml.count_per_axis", "must be >= 1");
    if (!(cfg.ml.sigma >= 0.0)) fail("ml.sigma", "must be >= 0");
    if (!(cfg.attitude.phi_step_deg > 0.0)) fail("attitude.phi_step_deg", "must be > 0");
    if (cfg.rmse.trials < 1) fail("rmse.trials", "must be >= 1");
    if (!(cfg.capacity.snr_step_db > 0.0)) fail("capacity.snr_step_db", "must be > 0");
    if (cfg.field_map.count_y < 1) fail("field_map.count_y", "must be >= 1");
    if (cfg.field_map.count_z < 1) fail("field_map.count_z", "must be >= 1");
    return cfg;
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "seed = " << c.seed << "\n\n";
    out << "[medium]\n";
    out << "wavelength_m = " << format_double(c.medium.wavelength_m) << "\n";
    out << "impedance_ohm = " << format_double(c.medium.impedance_ohm) << "\n\n";
    out << "[aperture]\n";
    out << "a_m = " << format_double(c.aperture.a_m) << "\n";
    out << "b_m = " << format_double(c.aperture.b_m) << "\n\n";
    out << "[incident]\n";
    out << "theta_in_deg = " << format_double(c.incident.theta_in_deg) << "\n";
    out << "e0_v_per_m = " << format_double(c.incident.e0_v_per_m) << "\n";
    out << "tx_gain_db = " << format_double(c.incident.tx_gain_db) << "\n";
    out << "source_distance_m = " << format_double(c.incident.source_distance_m) << "\n";
    out << "tx_power_w = " << format_double(c.incident.tx_power_w) << "\n\n";
    out << "[receiver]\n";
    out << "num_antennas = " << c.receiver.num_antennas << "\n";
    out << "length_m = " << format_double(c.receiver.length_m) << "\n";
    out << "center_x_m = " << format_double(c.receiver.center_x_m) << "\n";
    out << "center_y_m = " << format_double(c.receiver.center_y_m) << "\n";
    out << "center_z_m = " << format_double(c.receiver.center_z_m) << "\n";
    out << "attitude_phi_deg = " << format_double(c.receiver.attitude_phi_deg) << "\n";
    out << "rx_gain_db = " << format_double(c.receiver.rx_gain_db) << "\n\n";
    out << "[numerics]\n";
    out << "samples_per_wavelength = " << format_double(c.numerics.samples_per_wavelength)
        << "\n";
    out << "n_l = " << c.numerics.n_l << "\n\n";
    out << "[export]\n";
    out << "design = " << c.design_export.design << "\n\n";
    out << "[arc]\n";
    out << "theta_min_deg = " << format_double(c.arc.theta_min_deg) << "\n";
    out << "theta_max_deg = " << format_double(c.arc.theta_max_deg) << "\n";
    out << "theta_step_deg = " << format_double(c.arc.theta_step_deg) << "\n";
    out << "d_m = " << format_double(c.arc.d_m) << "\n";
    out << "design = " << c.arc.design << "\n\n";
    out << "[field_map]\n";
    out << "y_min_m = " << format_double(c.field_map.y_min_m) << "\n";
    out << "y_max_m = " << format_double(c.field_map.y_max_m) << "\n";
    out << "z_min_m = " << format_double(c.field_map.z_min_m) << "\n";
    out << "z_max_m = " << format_double(c.field_map.z_max_m) << "\n";
    out << "count_y = " << c.field_map.count_y << "\n";
    out << "count_z = " << c.field_map.count_z << "\n";
    out << "design = " << c.field_map.design << "\n\n";
    out << "[capacity]\n";
    out << "snr_min_db = " << format_double(c.capacity.snr_min_db) << "\n";
    out << "snr_max_db = " << format_double(c.capacity.snr_max_db) << "\n";
    out << "snr_step_db = " << format_double(c.capacity.snr_step_db) << "\n";
    out << "design = " << c.capacity.design << "\n\n";
    out << "[scan]\n";
    out << "d_min_m = " << format_double(c.scan.d_min_m) << "\n";
    out << "d_max_m = " << format_double(c.scan.d_max_m) << "\n";
    out << "d_step_m = " << format_double(c.scan.d_step_m) << "\n";
    out << "psi_step_deg = " << format_double(c.scan.psi_step_deg) << "\n";
    out << "sigma = " << format_double(c.scan.sigma) << "\n";
    out << "design = " << c.scan.design << "\n\n";
    out << "[ml]\n";
    out << "step_m = " << format_double(c.ml.step_m) << "\n";
    out << "count_per_axis = " << c.ml.count_per_axis << "\n";
    out << "sigma = " << format_double(c.ml.sigma) << "\n";
    out << "design = " << c.ml.design << "\n\n";
    out << "[attitude]\n";
    out << "phi_min_deg = " << format_double(c.attitude.phi_min_deg) << "\n";
    out << "phi_max_deg = " << format_double(c.attitude.phi_max_deg) << "\n";
    out << "phi_step_deg = " << format_double(c.attitude.phi_step_deg) << "\n";
    out << "measured_power_w = " << format_double(c.attitude.measured_power_w) << "\n";
    out << "design = " << c.attitude.design << "\n\n";
    out << "[peb]\n";
    out << "snr_db = " << format_double(c.peb.snr_db) << "\n";
    out << "design = " << c.peb.design << "\n\n";
    out << "[rmse]\n";
    out << "snr_db_list = ";
    for (std::size_t i = 0; i < c.rmse.snr_db_list.size(); ++i) {
        if (i) out << ", ";
        out << format_double(c.rmse.snr_db_list[i]);
    }
    out << "\n";
    out << "trials = " << c.rmse.trials << "\n";
    out << "off_grid = " << (c.rmse.off_grid ? "true" : "false") << "\n";
    out << "design = " << c.rmse.design << "\n";
    return out.str();
}

std::string config_hash(const ExperimentConfig& config) {
    const std::string text = serialize_config(config);
    std::uint64_t hash = 0xCBF29CE484222325ULL;
    for (const char ch : text) {
        hash ^= static_cast<unsigned char>(ch);
        hash *= 0x100000001B3ULL;
    }
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double deg_to_rad(double deg) { return deg * pi / 180.0; }

IncidentWave build_wave(const ExperimentConfig& c, const Medium& medium) {
    const double theta = deg_to_rad(c.incident.theta_in_deg);
    const double gain = db_to_linear(c.incident.tx_gain_db);
    if (c.incident.tx_power_w == 0.0)
        return IncidentWave::from_field_amplitude(c.incident.e0_v_per_m, theta,
                                                  c.incident.source_distance_m, gain, medium);
    // Explicit transmit power must match the field amplitude through
    // E0 = A/l with A^2 = P_t G_t eta/(2 pi).
    const double a = std::sqrt(c.incident.tx_power_w * gain * medium.impedance() / (2.0 * pi));
    const double expected_e0 = a / c.incident.source_distance_m;
    if (std::abs(expected_e0 - c.incident.e0_v_per_m) > 1e-9 * expected_e0)
        throw std::invalid_argument(
            "config: incident.tx_power_w: inconsistent with e0_v_per_m (expected E0 = " +
            std::to_string(expected_e0) + " V/m)");
    return IncidentWave::from_transmit_power(c.incident.tx_power_w, gain, theta,
                                             c.incident.source_distance_m, medium);
}

} // namespace

Scenario::Scenario(const ExperimentConfig& cfg)
    : medium(cfg.medium.wavelength_m, cfg.medium.impedance_ohm),
      aperture(cfg.aperture.a_m, cfg.aperture.b_m),
      wave(build_wave(cfg, medium)),
      receiver(cfg.receiver.num_antennas, cfg.receiver.length_m,
               Vec3{cfg.receiver.center_x_m, cfg.receiver.center_y_m, cfg.receiver.center_z_m},
               deg_to_rad(cfg.receiver.attitude_phi_deg), db_to_linear(cfg.receiver.rx_gain_db)),
      surface(aperture, medium, cfg.numerics.samples_per_wavelength),
      scan_context(std::make_shared<ScanContext>(aperture, medium, wave,
                                                 cfg.receiver.num_antennas, cfg.receiver.length_m,
                                                 db_to_linear(cfg.receiver.rx_gain_db),
                                                 cfg.numerics.samples_per_wavelength)),
      config(cfg) {}

} // namespace riswave
