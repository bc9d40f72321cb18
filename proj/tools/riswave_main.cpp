// riswave - batch experiment driver for the continuous-aperture RIS
// near-field simulator. Subcommands read one config file and write CSV
// tables plus a JSON summary on stdout.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "riswave/bessel_reference.hpp"
#include "riswave/config.hpp"
#include "riswave/propagation.hpp"
#include "riswave/reflection_design.hpp"
#include "riswave/sensing.hpp"
#include "riswave/special_functions.hpp"

using json = nlohmann::json;
using namespace riswave;

namespace {

constexpr const char* tool_version = "0.1.0";

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& hash, const std::string& extra,
              const std::string& header)
        : path_(path), out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file " + path);
        out_ << "# riswave " << tool_version << " config_hash=" << hash << "\n";
        if (!extra.empty()) out_ << "# " << extra << "\n";
        out_ << header << "\n";
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) out_ << ",";
            out_ << fmt(v);
            first = false;
        }
        out_ << "\n";
    }

    const std::string& path() const { return path_; }

  private:
    std::string path_;
    std::ofstream out_;
};

ReflectionDesign design_at_receiver(const Scenario& sc, const std::string& kind_name) {
    const DesignKind kind = parse_design_kind(kind_name);
    return design_for_candidate(kind, sc.receiver.center(), *sc.scan_context);
}

double planar_reference_power(const Scenario& sc) {
    const ReflectionDesign planar =
        design_for_candidate(DesignKind::planar, sc.receiver.center(), *sc.scan_context);
    const ChannelVector h =
        channel_vector(planar, sc.surface, sc.receiver, sc.wave, sc.medium);
    return received_power(h, 1.0);
}

// Noise sigma for a target SNR: array signal power over array noise power,
// sigma^2 = P_ref / (M * snr).
double sigma_for_snr(const Scenario& sc, double snr_db) {
    const double p_ref = planar_reference_power(sc);
    const double snr = std::pow(10.0, snr_db / 10.0);
    return std::sqrt(p_ref / (sc.receiver.num_antennas() * snr));
}

json run_design_export(const Scenario& sc, const std::string& out_dir, const std::string& hash) {
    const ReflectionDesign design = design_at_receiver(sc, sc.config.design_export.design);
    const SurfaceGrid& grid = sc.surface;
    double max_tau = 0.0;
    for (std::size_t i = 0; i < grid.count(); ++i)
        max_tau = std::max(max_tau, design.tau(grid.node_x_of(i), grid.node_y_of(i)));

    std::ostringstream extra;
    extra << "design " << design.description() << " max_tau=" << fmt(max_tau);
    CsvWriter csv(out_dir + "/design-export.csv", hash, extra.str(), "x_m,y_m,tau,beta_rad");
    for (std::size_t i = 0; i < grid.count(); ++i) {
        const double x = grid.node_x_of(i);
        const double y = grid.node_y_of(i);
        csv.row({x, y, design.tau(x, y), design.beta(x, y)});
    }
    return {{"design", design.description()},
            {"max_tau", max_tau},
            {"samples", grid.count()},
            {"outputs", {csv.path()}}};
}

json run_arc_power(const Scenario& sc, const std::string& out_dir, const std::string& hash) {
    const auto& arc = sc.config.arc;
    const ReflectionDesign design = design_at_receiver(sc, arc.design);
    const Vec3 center = sc.receiver.center();
    const double d = arc.d_m > 0.0 ? arc.d_m : std::sqrt(dot(center, center));

    std::vector<double> thetas;
    for (double t = arc.theta_min_deg; t <= arc.theta_max_deg + 1e-12; t += arc.theta_step_deg)
        thetas.push_back(t);
    std::vector<double> power(thetas.size());
    parallel_for(thetas.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            power[i] = normalized_arc_power(design, sc.surface, d, thetas[i] * pi / 180.0,
                                            sc.wave, sc.medium);
    });
    double peak = 0.0;
    double peak_theta = thetas.front();
    for (std::size_t i = 0; i < thetas.size(); ++i)
        if (power[i] > peak) {
            peak = power[i];
            peak_theta = thetas[i];
        }

    CsvWriter csv(out_dir + "/arc-power.csv", hash,
                  "arc d_m=" + fmt(d) + " design " + design.description(),
                  "theta_deg,p_n,p_n_db_rel_max");
    for (std::size_t i = 0; i < thetas.size(); ++i)
        csv.row({thetas[i], power[i], 10.0 * std::log10(power[i] / peak)});
    return {{"design", design.description()},
            {"arc_d_m", d},
            {"peak_theta_deg", peak_theta},
            {"peak_p_n", peak},
            {"outputs", {csv.path()}}};
}

json run_field_map(const Scenario& sc, const std::string& out_dir, const std::string& hash) {
    const auto& fm = sc.config.field_map;
    if (!(fm.z_min_m > 0.0))
        throw std::invalid_argument("config: field_map.z_min_m: must be > 0");
    const ReflectionDesign design = design_at_receiver(sc, fm.design);

    CsvWriter csv(out_dir + "/field-map.csv", hash, "design " + design.description(),
                  "y_m,z_m,re_Ex,im_Ex");
    const double dy = fm.count_y > 1 ? (fm.y_max_m - fm.y_min_m) / (fm.count_y - 1) : 0.0;
    const double dz = fm.count_z > 1 ? (fm.z_max_m - fm.z_min_m) / (fm.count_z - 1) : 0.0;
    std::vector<Complex> values(static_cast<std::size_t>(fm.count_y) * fm.count_z);
    parallel_for(values.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const int iy = static_cast<int>(i) / fm.count_z;
            const int iz = static_cast<int>(i) % fm.count_z;
            const Vec3 p{0.0, fm.y_min_m + iy * dy, fm.z_min_m + iz * dz};
            values[i] = field_at(design, sc.surface, p, sc.wave, sc.medium).e_field().x;
        }
    });
    for (std::size_t i = 0; i < values.size(); ++i) {
        const int iy = static_cast<int>(i) / fm.count_z;
        const int iz = static_cast<int>(i) % fm.count_z;
        csv.row({fm.y_min_m + iy * dy, fm.z_min_m + iz * dz, values[i].real(),
                 values[i].imag()});
    }
    return {{"design", design.description()},
            {"points", values.size()},
            {"outputs", {csv.path()}}};
}

json run_capacity(const Scenario& sc, const std::string& out_dir, const std::string& hash) {
    const auto& cap = sc.config.capacity;
    const ReflectionDesign design = design_at_receiver(sc, cap.design);
    const ChannelVector h = channel_vector(design, sc.surface, sc.receiver, sc.wave, sc.medium);
    const double p_design = received_power(h, 1.0);
    const double p_ref = planar_reference_power(sc);

    CsvWriter csv(out_dir + "/capacity.csv", hash, "design " + design.description(),
                  "snr_db,capacity_bits");
    json rows = json::array();
    for (double snr = cap.snr_min_db; snr <= cap.snr_max_db + 1e-12; snr += cap.snr_step_db) {
        const double noise = p_ref / std::pow(10.0, snr / 10.0);
        const double c = capacity(p_design, noise);
        csv.row({snr, c});
        rows.push_back({{"snr_db", snr}, {"capacity_bits", c}});
    }
    return {{"design", design.description()},
            {"rows", rows.size()},
            {"outputs", {csv.path()}}};
}

ScanGrid scan_grid_from_config(const Scenario& sc) {
    const auto& scan = sc.config.scan;
    const auto bounds = radiating_near_field_bounds(sc.aperture, sc.medium);
    const double d_min = scan.d_min_m > 0.0 ? scan.d_min_m : bounds.first;
    const double d_max = scan.d_max_m > 0.0 ? scan.d_max_m : 300.0 * sc.medium.wavelength();
    return ScanGrid::arc(d_min, d_max, scan.d_step_m, scan.psi_step_deg * pi / 180.0);
}

ScanGrid ml_grid_from_config(const Scenario& sc) {
    const auto& ml = sc.config.ml;
    const Vec3 c = sc.receiver.center();
    return ScanGrid::cartesian_yz(c.y, c.z, ml.step_m,
                                  static_cast<std::size_t>(ml.count_per_axis));
}

json estimate_to_json(const LocationEstimate& est) {
    return {{"x_m", est.position.x},
            {"y_m", est.position.y},
            {"z_m", est.position.z},
            {"candidate_index", est.candidate_index},
            {"score", est.score},
            {"ambiguous", est.ambiguous}};
}

json run_sense_location(const Scenario& sc, const std::string& out_dir,
                        const std::string& hash, std::uint64_t seed) {
    const ScanGrid grid = scan_grid_from_config(sc);
    const DesignKind kind = parse_design_kind(sc.config.scan.design);
    const ScanMeasurement meas = simulate_scan(sc.receiver, grid, kind, sc.config.scan.sigma,
                                               seed, sc.scan_context);
    const LocationEstimate est = fs_estimate(meas, grid);

    CsvWriter csv(out_dir + "/sense-location.csv", hash, grid.description(),
                  "t,y_m,z_m,power");
    for (std::size_t t = 0; t < grid.count(); ++t) {
        double p = 0.0;
        for (std::size_t m = 0; m < meas.num_antennas(); ++m) p += std::norm(meas.at(t, m));
        csv.row({static_cast<double>(t), grid.candidate(t).y, grid.candidate(t).z, p});
    }
    json est_json = estimate_to_json(est);
    est_json["d_m"] = std::sqrt(dot(est.position, est.position));
    est_json["psi_deg"] = std::atan2(est.position.z, est.position.y) * 180.0 / pi;
    return {{"method", "fs"},
            {"grid", grid.description()},
            {"sigma", sc.config.scan.sigma},
            {"estimate", est_json},
            {"outputs", {csv.path()}}};
}

json run_sense_ml(const Scenario& sc, const std::string& out_dir, const std::string& hash,
                  std::uint64_t seed) {
    const ScanGrid grid = ml_grid_from_config(sc);
    const DesignKind kind = parse_design_kind(sc.config.ml.design);
    const ScanMeasurement meas =
        simulate_scan(sc.receiver, grid, kind, sc.config.ml.sigma, seed, sc.scan_context);
    const ScanModel model(sc.scan_context, grid, kind);
    std::vector<double> scores;
    const LocationEstimate est =
        ml_estimate_with_model(meas, model, sc.config.numerics.n_l, &scores);

    CsvWriter csv(out_dir + "/sense-ml.csv", hash, grid.description(),
                  "t,y_m,z_m,objective");
    for (std::size_t t = 0; t < grid.count(); ++t)
        csv.row({static_cast<double>(t), grid.candidate(t).y, grid.candidate(t).z, scores[t]});
    return {{"method", "ml"},
            {"grid", grid.description()},
            {"sigma", sc.config.ml.sigma},
            {"n_l", sc.config.numerics.n_l},
            {"estimate", estimate_to_json(est)},
            {"outputs", {csv.path()}}};
}

json run_sense_attitude(const Scenario& sc, const std::string& out_dir,
                        const std::string& hash) {
    const auto& att = sc.config.attitude;
    const DesignKind kind = parse_design_kind(att.design);
    std::vector<double> phis;
    for (double p = att.phi_min_deg; p <= att.phi_max_deg + 1e-12; p += att.phi_step_deg)
        phis.push_back(p * pi / 180.0);
    const auto profile =
        attitude_power_profile(*sc.scan_context, kind, sc.receiver.center(), phis);

    CsvWriter csv(out_dir + "/sense-attitude.csv", hash, std::string("design ") + att.design,
                  "phi_deg,p_r_w");
    for (const auto& point : profile) csv.row({point.phi * 180.0 / pi, point.power});

    json summary = {{"design", att.design},
                    {"points", profile.size()},
                    {"outputs", {csv.path()}}};
    if (att.measured_power_w >= 0.0) {
        // the inversion needs a strictly decreasing profile; report the
        // reason instead of discarding the profile table
        try {
            const double phi = attitude_estimate(att.measured_power_w, profile);
            summary["estimate_phi_deg"] = phi * 180.0 / pi;
        } catch (const std::exception& e) {
            summary["estimate_error"] = e.what();
        }
    }
    return summary;
}

json run_peb(const Scenario& sc, const std::string& out_dir, const std::string& hash) {
    const ScanGrid grid = ml_grid_from_config(sc);
    const DesignKind kind = parse_design_kind(sc.config.peb.design);
    const double sigma = sigma_for_snr(sc, sc.config.peb.snr_db);
    const SignalJacobian jac =
        scan_jacobian(*sc.scan_context, grid, kind, sc.receiver.center());
    const bool mask[3] = {false, true, true};
    const FisherMatrix fisher = fisher_matrix(jac, sigma, mask);
    const double bound = peb(fisher);

    CsvWriter csv(out_dir + "/peb.csv", hash, grid.description(), "axis_i,axis_j,j_value");
    for (int r = 0; r < fisher.dim; ++r)
        for (int c = 0; c < fisher.dim; ++c)
            csv.row({static_cast<double>(fisher.axes[r]), static_cast<double>(fisher.axes[c]),
                     fisher.j[r][c]});
    return {{"design", sc.config.peb.design},
            {"snr_db", sc.config.peb.snr_db},
            {"sigma", sigma},
            {"peb_m", bound},
            {"outputs", {csv.path()}}};
}

json run_rmse(const Scenario& sc, const std::string& out_dir, const std::string& hash,
              std::uint64_t seed) {
    const ScanGrid grid = ml_grid_from_config(sc);
    const DesignKind kind = parse_design_kind(sc.config.rmse.design);
    RmseOptions options;
    options.trials = sc.config.rmse.trials;
    options.n_l = sc.config.numerics.n_l;
    options.off_grid = sc.config.rmse.off_grid;
    const auto rows = rmse_harness(sc.scan_context, grid, kind, sc.config.rmse.snr_db_list,
                                   seed, options);

    CsvWriter csv(out_dir + "/rmse.csv", hash, grid.description(),
                  "snr_db,rmse_fs_m,rmse_ml_m,peb_rms_m");
    json jrows = json::array();
    for (const auto& row : rows) {
        csv.row({row.snr_db, row.rmse_fs, row.rmse_ml, row.peb_rms});
        jrows.push_back({{"snr_db", row.snr_db},
                         {"rmse_fs_m", row.rmse_fs},
                         {"rmse_ml_m", row.rmse_ml},
                         {"peb_rms_m", row.peb_rms}});
    }
    return {{"design", sc.config.rmse.design},
            {"trials", options.trials},
            {"rows", jrows},
            {"outputs", {csv.path()}}};
}

json run_selftest(const Scenario& sc, const std::string& out_dir, const std::string& hash) {
    CsvWriter csv(out_dir + "/selftest.csv", hash, "bessel oracle comparison",
                  "function,order,x,value,reference,abs_error");
    double max_err = 0.0;
    double max_wronskian = 0.0;
    const int points = 200;
    for (int i = 0; i < points; ++i) {
        const double x =
            std::pow(10.0, -3.0 + 7.0 * static_cast<double>(i) / (points - 1));
        for (int order = 0; order <= 1; ++order) {
            const BesselOrder n(order);
            const double j = bessel_j(n, x);
            const double jr = reference::bessel_j_reference(order, x);
            const double y = bessel_y(n, x);
            const double yr = reference::bessel_y_reference(order, x);
            csv.row({0.0, static_cast<double>(order), x, j, jr, std::abs(j - jr)});
            csv.row({1.0, static_cast<double>(order), x, y, yr, std::abs(y - yr)});
            max_err = std::max({max_err, std::abs(j - jr), std::abs(y - yr)});
        }
        const double w = bessel_j(BesselOrder::one(), x) * bessel_y(BesselOrder::zero(), x) -
                         bessel_j(BesselOrder::zero(), x) * bessel_y(BesselOrder::one(), x) -
                         2.0 / (pi * x);
        max_wronskian = std::max(max_wronskian, std::abs(w));
    }

    // Power-conservation identities at the configured geometry.
    const FocalLine line(sc.receiver.center().y, sc.receiver.center().z);
    const LineCurrent i1 = line_current_magnitude(sc.aperture, sc.wave, line, sc.medium);
    const double a = sc.aperture.length_y();
    const double p_inc = sc.wave.e0() * sc.wave.e0() * sc.aperture.area() *
                         std::cos(sc.wave.theta_in()) / (2.0 * sc.medium.impedance());
    const double frac = (std::atan((line.f_y + 0.5 * a) / line.f_z) -
                         std::atan((line.f_y - 0.5 * a) / line.f_z)) /
                        (2.0 * pi);
    const double p_refl = frac * i1.magnitude * i1.magnitude * sc.medium.wavenumber() *
                          sc.medium.impedance() * sc.aperture.length_x() / (16.0 * pi);
    const double cyl_residual = std::abs(p_inc - p_refl) / p_inc;

    const FocalPoint point(sc.receiver.center().x, sc.receiver.center().y,
                           sc.receiver.center().z);
    const double omega = solid_angle(sc.aperture, point, sc.surface);
    const PointSourceMagnitude u1 =
        point_source_magnitude(sc.aperture, sc.wave, point, sc.medium, sc.surface);
    const double p_refl_sphere =
        omega * u1.magnitude * u1.magnitude / (2.0 * sc.medium.impedance());
    const double sphere_residual = std::abs(p_inc - p_refl_sphere) / p_inc;

    const bool pass = max_err < 1e-8 && max_wronskian < 1e-9 && cyl_residual < 1e-12 &&
                      sphere_residual < 1e-12;
    return {{"max_bessel_error", max_err},
            {"max_wronskian_residual", max_wronskian},
            {"cylindrical_power_residual", cyl_residual},
            {"spherical_power_residual", sphere_residual},
            {"pass", pass},
            {"outputs", {csv.path()}}};
}

} // namespace

int main(int argc, char** argv) {
    const std::set<std::string> commands = {
        "design-export", "arc-power",     "field-map", "capacity", "sense-location",
        "sense-attitude", "sense-ml",     "peb",       "rmse",     "selftest"};

    if (argc < 2) {
        std::cout << json{{"error", {{"code", 2}, {"message", "usage: riswave <subcommand> "
                                                             "[--config FILE] [--seed N] "
                                                             "[--output-dir DIR] [--threads N]"}}}}
                         .dump()
                  << "\n";
        return 2;
    }
    const std::string command = argv[1];
    if (command == "--help" || command == "-h") {
        std::cout << "riswave " << tool_version << " subcommands:\n";
        for (const auto& c : commands) std::cout << "  " << c << "\n";
        return 0;
    }
    if (!commands.count(command)) {
        std::cout << json{{"error",
                           {{"code", 2}, {"message", "unknown subcommand '" + command + "'"}}}}
                         .dump()
                  << "\n";
        return 2;
    }

    CLI::App app{"continuous-aperture RIS near-field simulator"};
    std::string config_path;
    std::string output_dir = ".";
    std::uint64_t seed_override = 0;
    bool seed_given = false;
    int threads = 0;
    app.add_option("--config", config_path, "config file (defaults when omitted)");
    app.add_option("--output-dir", output_dir, "directory for CSV outputs");
    auto* seed_opt = app.add_option("--seed", seed_override, "override the config seed");
    app.add_option("--threads", threads, "worker thread count override");
    try {
        app.parse(argc - 1, argv + 1);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return 0; // --help
        std::cout << json{{"error", {{"code", 2}, {"message", e.what()}}}}.dump() << "\n";
        return 2;
    }
    seed_given = seed_opt->count() > 0;

    const auto start = std::chrono::steady_clock::now();
    try {
        if (threads > 0) set_max_threads(threads);
        ExperimentConfig cfg;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) throw std::runtime_error("cannot read config file " + config_path);
            std::stringstream buffer;
            buffer << in.rdbuf();
            cfg = parse_config(buffer.str());
        }
        if (seed_given) cfg.seed = seed_override;
        const Scenario scenario(cfg);
        const std::string hash = config_hash(cfg);

        json summary;
        if (command == "design-export") summary = run_design_export(scenario, output_dir, hash);
        else if (command == "arc-power") summary = run_arc_power(scenario, output_dir, hash);
        else if (command == "field-map") summary = run_field_map(scenario, output_dir, hash);
        else if (command == "capacity") summary = run_capacity(scenario, output_dir, hash);
        else if (command == "sense-location")
            summary = run_sense_location(scenario, output_dir, hash, cfg.seed);
        else if (command == "sense-ml")
            summary = run_sense_ml(scenario, output_dir, hash, cfg.seed);
        else if (command == "sense-attitude")
            summary = run_sense_attitude(scenario, output_dir, hash);
        else if (command == "peb") summary = run_peb(scenario, output_dir, hash);
        else if (command == "rmse") summary = run_rmse(scenario, output_dir, hash, cfg.seed);
        else if (command == "selftest") summary = run_selftest(scenario, output_dir, hash);

        const auto elapsed = std::chrono::duration<double>(
            std::chrono::steady_clock::now() - start);
        summary["command"] = command;
        summary["config_hash"] = hash;
        summary["seed"] = cfg.seed;
        summary["runtime_s"] = elapsed.count();
        std::cout << summary.dump(2) << "\n";
        if (command == "selftest" && !summary["pass"].get<bool>()) return 1;
        return 0;
    } catch (const std::exception& e) {
        std::cout << json{{"error", {{"code", 1}, {"message", e.what()}}}}.dump() << "\n";
        return 1;
    }
}
