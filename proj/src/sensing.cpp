#include "riswave/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <unordered_map>

namespace riswave {

namespace {

constexpr std::size_t max_model_entries = (std::size_t{1} << 27); // ~2 GB of complex doubles

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::string format_vec(const Vec3& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "(%.6g, %.6g, %.6g)", v.x, v.y, v.z);
    return buf;
}

} // namespace

ScanGrid ScanGrid::arc(double d_min, double d_max, double d_step, double psi_step_rad) {
    if (!(d_min > 0.0) || !(d_max >= d_min))
        throw std::invalid_argument("ScanGrid::arc: need 0 < d_min <= d_max");
    if (!(d_step > 0.0) || !(psi_step_rad > 0.0))
        throw std::invalid_argument("ScanGrid::arc: steps must be > 0");

    const auto j_min = static_cast<long>(std::ceil(d_min / d_step - 1e-9));
    const auto j_max = static_cast<long>(std::floor(d_max / d_step + 1e-9));
    const auto i_max = static_cast<long>(std::ceil(0.5 * pi / psi_step_rad - 1e-9)) - 1;
    if (j_max < j_min || i_max < 1)
        throw std::invalid_argument("ScanGrid::arc: empty grid");

    ScanGrid grid;
    grid.in_plane_ = true;
    grid.step_ = d_step;
    for (long j = j_min; j <= j_max; ++j) {
        const double d = static_cast<double>(j) * d_step;
        for (long i = 1; i <= i_max; ++i) {
            const double psi = static_cast<double>(i) * psi_step_rad;
            grid.candidates_.push_back({0.0, d * std::cos(psi), d * std::sin(psi)});
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "arc d=[%.6g,%.6g] step %.6g m, psi step %.6g rad, T=%zu",
                  static_cast<double>(j_min) * d_step, static_cast<double>(j_max) * d_step,
                  d_step, psi_step_rad, grid.candidates_.size());
    grid.description_ = buf;
    return grid;
}

ScanGrid ScanGrid::cartesian_yz(double y_center, double z_center, double step,
                                std::size_t count_per_axis) {
    if (!(step > 0.0) || count_per_axis == 0)
        throw std::invalid_argument("ScanGrid::cartesian_yz: bad step or count");
    ScanGrid grid;
    grid.in_plane_ = true;
    grid.step_ = step;
    const double half = 0.5 * static_cast<double>(count_per_axis - 1) * step;
    for (std::size_t iy = 0; iy < count_per_axis; ++iy) {
        for (std::size_t iz = 0; iz < count_per_axis; ++iz) {
            const Vec3 p{0.0, y_center - half + static_cast<double>(iy) * step,
                         z_center - half + static_cast<double>(iz) * step};
            if (!(p.z > 0.0))
                throw std::invalid_argument("ScanGrid: candidate at or below the plate");
            grid.candidates_.push_back(p);
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "cartesian-yz center (%.6g, %.6g) step %.6g m, %zux%zu",
                  y_center, z_center, step, count_per_axis, count_per_axis);
    grid.description_ = buf;
    return grid;
}

ScanGrid ScanGrid::cartesian_xyz(const Vec3& center, double step, std::size_t count_per_axis) {
    if (!(step > 0.0) || count_per_axis == 0)
        throw std::invalid_argument("ScanGrid::cartesian_xyz: bad step or count");
    ScanGrid grid;
    grid.in_plane_ = false;
    grid.step_ = step;
    const double half = 0.5 * static_cast<double>(count_per_axis - 1) * step;
    for (std::size_t ix = 0; ix < count_per_axis; ++ix) {
        for (std::size_t iy = 0; iy < count_per_axis; ++iy) {
            for (std::size_t iz = 0; iz < count_per_axis; ++iz) {
                const Vec3 p{center.x - half + static_cast<double>(ix) * step,
                             center.y - half + static_cast<double>(iy) * step,
                             center.z - half + static_cast<double>(iz) * step};
                if (!(p.z > 0.0))
                    throw std::invalid_argument("ScanGrid: candidate at or below the plate");
                grid.candidates_.push_back(p);
            }
        }
    }
    char buf[160];
    std::snprintf(buf, sizeof buf, "cartesian-xyz center %s step %.6g m, %zu^3",
                  format_vec(center).c_str(), step, count_per_axis);
    grid.description_ = buf;
    return grid;
}

ScanContext::ScanContext(const RisAperture& aperture_in, const Medium& medium_in,
                         const IncidentWave& wave_in, int num_antennas_in,
                         double ula_length_in, double rx_gain_in,
                         double samples_per_wavelength)
    : aperture(aperture_in), medium(medium_in), wave(wave_in), num_antennas(num_antennas_in),
      ula_length(ula_length_in), rx_gain(rx_gain_in),
      surface(aperture_in, medium_in, samples_per_wavelength) {}

UlaReceiver ScanContext::receiver_at(const Vec3& center, double attitude_phi) const {
    return UlaReceiver(num_antennas, ula_length, center, attitude_phi, rx_gain);
}

ReflectionDesign design_for_candidate(DesignKind kind, const Vec3& candidate,
                                      const ScanContext& ctx) {
    switch (kind) {
        case DesignKind::planar:
            return ReflectionDesign::make_planar(planar_theta_for_target(candidate),
                                                 ctx.wave.theta_in(), ctx.medium);
        case DesignKind::cylindrical:
            return ReflectionDesign::make_cylindrical(FocalLine(candidate.y, candidate.z),
                                                      ctx.wave, ctx.medium, ctx.aperture);
        case DesignKind::spherical:
            return ReflectionDesign::make_spherical(
                FocalPoint(candidate.x, candidate.y, candidate.z), ctx.wave, ctx.medium,
                ctx.aperture, ctx.surface);
    }
    throw std::logic_error("design_for_candidate: unknown kind");
}

std::vector<Complex> scan_signals(const ScanContext& ctx, const ScanGrid& grid,
                                  DesignKind kind, const Vec3& center) {
    const std::size_t num_slots = grid.count();
    const std::size_t num_ant = static_cast<std::size_t>(ctx.num_antennas);
    std::vector<Complex> signals(num_slots * num_ant);
    const UlaReceiver rx = ctx.receiver_at(center);

    if (kind != DesignKind::spherical) {
        const RowFactoredChannel rfc(ctx.surface, rx, ctx.wave, ctx.medium);
        parallel_for(num_slots, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
                const ReflectionDesign design = design_for_candidate(kind, grid.candidate(t), ctx);
                const ChannelVector h = rfc.evaluate(design);
                for (std::size_t m = 0; m < num_ant; ++m) signals[t * num_ant + m] = h[m];
            }
        });
    } else {
        parallel_for(num_slots, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
                const ReflectionDesign design = design_for_candidate(kind, grid.candidate(t), ctx);
                const ChannelVector h =
                    channel_vector(design, ctx.surface, rx, ctx.wave, ctx.medium);
                for (std::size_t m = 0; m < num_ant; ++m) signals[t * num_ant + m] = h[m];
            }
        });
    }
    return signals;
}

ScanMeasurement::ScanMeasurement(std::vector<Complex> samples, std::size_t num_slots,
                                 std::size_t num_antennas, double sigma, std::uint64_t seed,
                                 DesignKind kind, std::shared_ptr<const ScanContext> context)
    : samples_(std::move(samples)), num_slots_(num_slots), num_antennas_(num_antennas),
      sigma_(sigma), seed_(seed), kind_(kind), context_(std::move(context)) {
    if (samples_.size() != num_slots_ * num_antennas_)
        throw std::invalid_argument("ScanMeasurement: sample count must equal T*M");
    if (!(sigma >= 0.0)) throw std::invalid_argument("ScanMeasurement: sigma must be >= 0");
    if (!context_) throw std::invalid_argument("ScanMeasurement: missing context");
}

Complex counter_complex_gaussian(std::uint64_t seed, std::uint64_t slot,
                                 std::uint64_t antenna) {
    std::uint64_t h = mix64(seed);
    h = mix64(h ^ (slot + 0x632BE59BD9B4E019ULL));
    h = mix64(h ^ (antenna + 0x9E6C63D0876A91ULL));
    const std::uint64_t b1 = mix64(h);
    const std::uint64_t b2 = mix64(h ^ 0x5851F42D4C957F2DULL);
    const double u1 = (static_cast<double>(b1 >> 11) + 1.0) * 0x1p-53; // (0, 1]
    const double u2 = static_cast<double>(b2 >> 11) * 0x1p-53;         // [0, 1)
    return std::polar(std::sqrt(-std::log(u1)), 2.0 * pi * u2);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) {
    return mix64(mix64(seed) ^ (trial + 0xD1B54A32D192ED03ULL));
}

ScanMeasurement simulate_scan(const UlaReceiver& true_receiver, const ScanGrid& grid,
                              DesignKind kind, double sigma, std::uint64_t seed,
                              std::shared_ptr<const ScanContext> ctx) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("simulate_scan: sigma must be >= 0");
    if (!ctx) throw std::invalid_argument("simulate_scan: missing context");
    std::vector<Complex> samples = scan_signals(*ctx, grid, kind, true_receiver.center());
    const std::size_t num_ant = static_cast<std::size_t>(ctx->num_antennas);
    if (sigma > 0.0) {
        for (std::size_t t = 0; t < grid.count(); ++t)
            for (std::size_t m = 0; m < num_ant; ++m)
                samples[t * num_ant + m] += sigma * counter_complex_gaussian(seed, t, m);
    }
    return ScanMeasurement(std::move(samples), grid.count(), num_ant, sigma, seed, kind,
                           std::move(ctx));
}

LocationEstimate fs_estimate(const ScanMeasurement& meas, const ScanGrid& grid) {
    if (meas.num_slots() != grid.count())
        throw std::invalid_argument("fs_estimate: grid/measurement slot mismatch");
    std::size_t best_t = 0;
    double best_power = -1.0;
    for (std::size_t t = 0; t < meas.num_slots(); ++t) {
        double power = 0.0;
        for (std::size_t m = 0; m < meas.num_antennas(); ++m) power += std::norm(meas.at(t, m));
        if (power > best_power) {
            best_power = power;
            best_t = t;
        }
    }
    LocationEstimate est;
    est.position = grid.candidate(best_t);
    est.candidate_index = best_t;
    est.score = best_power;
    est.method = EstimationMethod::fs;
    return est;
}

double ml_objective(const ScanMeasurement& meas, std::span<const double> psi_model, double kl) {
    if (psi_model.size() != meas.samples().size())
        throw std::invalid_argument("ml_objective: model phase count must equal T*M");
    const double inv_sigma2 = meas.sigma() > 0.0 ? 1.0 / (meas.sigma() * meas.sigma()) : 1.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < psi_model.size(); ++i) {
        const Complex& y = meas.samples()[i];
        const double s = std::sin(std::arg(y) - psi_model[i] + kl);
        sum += std::norm(y) * s * s;
    }
    return -inv_sigma2 * sum;
}

ScanModel::ScanModel(std::shared_ptr<const ScanContext> ctx, const ScanGrid& grid,
                     DesignKind kind)
    : ctx_(std::move(ctx)), grid_(grid), kind_(kind) {
    if (!ctx_) throw std::invalid_argument("ScanModel: missing context");
    num_candidates_ = grid.count();
    num_slots_ = grid.count();
    num_antennas_ = static_cast<std::size_t>(ctx_->num_antennas);
    const std::size_t entries = num_candidates_ * num_slots_ * num_antennas_;
    if (entries > max_model_entries)
        throw std::invalid_argument(
            "ScanModel: candidate tensor too large; coarsen the scan grid");
    tensor_.resize(entries);

    if (kind != DesignKind::spherical) {
        // Row factors per design are shared across candidates.
        std::vector<std::vector<Complex>> factors(num_slots_);
        parallel_for(num_slots_, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
                const ReflectionDesign design =
                    design_for_candidate(kind, grid.candidate(t), *ctx_);
                factors[t] =
                    design_row_factors(design, ctx_->surface, ctx_->wave, ctx_->medium);
            }
        });
        parallel_for(num_candidates_, [&](std::size_t begin, std::size_t end) {
            for (std::size_t c = begin; c < end; ++c) {
                const UlaReceiver rx = ctx_->receiver_at(grid.candidate(c));
                const RowFactoredChannel rfc(ctx_->surface, rx, ctx_->wave, ctx_->medium);
                Complex* row = tensor_.data() + c * num_slots_ * num_antennas_;
                for (std::size_t t = 0; t < num_slots_; ++t) {
                    const ChannelVector h = rfc.evaluate(factors[t]);
                    for (std::size_t m = 0; m < num_antennas_; ++m)
                        row[t * num_antennas_ + m] = h[m];
                }
            }
        });
    } else {
        parallel_for(num_candidates_, [&](std::size_t begin, std::size_t end) {
            for (std::size_t c = begin; c < end; ++c) {
                const std::vector<Complex> signals =
                    scan_signals(*ctx_, grid, kind, grid.candidate(c));
                std::copy(signals.begin(), signals.end(),
                          tensor_.begin() +
                              static_cast<std::ptrdiff_t>(c * num_slots_ * num_antennas_));
            }
        });
    }
}

std::span<const Complex> ScanModel::row(std::size_t candidate) const {
    const std::size_t stride = num_slots_ * num_antennas_;
    return {tensor_.data() + candidate * stride, stride};
}

namespace {

// Reduced-objective accumulator: f(c, l) = (inv_sigma2 / 2) (Re(e^{j2kl} z) - S)
// with z = sum y^2 conj(H/|H|)^2 and S = sum |y|^2.
struct MlReduction {
    double total_power = 0.0;      // S
    std::vector<Complex> w;        // y^2 per (t, m)
};

MlReduction ml_prepare(const ScanMeasurement& meas) {
    MlReduction r;
    r.w.resize(meas.samples().size());
    for (std::size_t i = 0; i < r.w.size(); ++i) {
        const Complex& y = meas.samples()[i];
        r.w[i] = y * y;
        r.total_power += std::norm(y);
    }
    return r;
}

Complex candidate_alignment(const MlReduction& r, std::span<const Complex> model_row) {
    Complex z{0.0, 0.0};
    for (std::size_t i = 0; i < r.w.size(); ++i) {
        const Complex& h = model_row[i];
        const double mag2 = std::norm(h);
        if (mag2 > 0.0) z += r.w[i] * (std::conj(h) * std::conj(h) / mag2);
    }
    return z;
}

} // namespace

LocationEstimate ml_estimate_with_model(const ScanMeasurement& meas, const ScanModel& model,
                                        int n_l, std::vector<double>* candidate_scores) {
    if (n_l < 1) throw std::invalid_argument("ml_estimate: n_l must be >= 1");
    if (meas.num_slots() != model.num_slots() || meas.num_antennas() != model.num_antennas())
        throw std::invalid_argument("ml_estimate: measurement/model shape mismatch");
    if (model.num_candidates() == 0) throw std::invalid_argument("ml_estimate: empty grid");

    const double k = model.context().medium.wavenumber();
    const double inv_sigma2 =
        meas.sigma() > 0.0 ? 1.0 / (meas.sigma() * meas.sigma()) : 1.0;
    const MlReduction reduction = ml_prepare(meas);

    std::vector<Complex> rot(static_cast<std::size_t>(n_l));
    std::vector<double> l_values(static_cast<std::size_t>(n_l));
    for (int i = 0; i < n_l; ++i) {
        const double l = static_cast<double>(i) * pi / (k * n_l); // [0, pi/k)
        l_values[static_cast<std::size_t>(i)] = l;
        rot[static_cast<std::size_t>(i)] = std::polar(1.0, 2.0 * k * l);
    }

    const std::size_t candidates = model.num_candidates();
    std::vector<double> best_per_candidate(candidates);
    std::vector<int> best_l_per_candidate(candidates);
    parallel_for(candidates, [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
            const Complex z = candidate_alignment(reduction, model.row(c));
            double best = -std::numeric_limits<double>::infinity();
            int best_l = 0;
            for (int i = 0; i < n_l; ++i) {
                const double f = 0.5 * inv_sigma2 *
                                 ((rot[static_cast<std::size_t>(i)] * z).real() -
                                  reduction.total_power);
                if (f > best) {
                    best = f;
                    best_l = i;
                }
            }
            best_per_candidate[c] = best;
            best_l_per_candidate[c] = best_l;
        }
    });

    std::size_t best_c = 0;
    for (std::size_t c = 1; c < candidates; ++c)
        if (best_per_candidate[c] > best_per_candidate[best_c]) best_c = c;

    if (candidate_scores) *candidate_scores = best_per_candidate;

    // Tie detection at 1e-9 of the objective's natural scale (the reduced
    // objective of a fully misaligned candidate is about -S/(2 sigma^2)).
    const double tie_tolerance = 1e-9 * reduction.total_power * inv_sigma2;
    std::size_t near_best = 0;
    for (std::size_t c = 0; c < candidates; ++c)
        if (best_per_candidate[c] >= best_per_candidate[best_c] - tie_tolerance) ++near_best;

    LocationEstimate est;
    est.position = model.grid().candidate(best_c);
    est.candidate_index = best_c;
    est.score = best_per_candidate[best_c];
    est.method = EstimationMethod::ml;
    est.phase_offset = l_values[static_cast<std::size_t>(best_l_per_candidate[best_c])] * k;
    est.ambiguous = near_best > 1;
    return est;
}

LocationEstimate ml_estimate(const ScanMeasurement& meas, const ScanGrid& grid, int n_l) {
    const ScanModel model(meas.context_ptr(), grid, meas.kind());
    return ml_estimate_with_model(meas, model, n_l);
}

std::vector<AttitudeProfilePoint> attitude_power_profile(const ScanContext& ctx,
                                                         DesignKind kind, const Vec3& center,
                                                         std::span<const double> phi_values) {
    const ReflectionDesign design = design_for_candidate(kind, center, ctx);
    std::vector<AttitudeProfilePoint> profile(phi_values.size());
    parallel_for(phi_values.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const UlaReceiver rx = ctx.receiver_at(center, phi_values[i]);
            const ChannelVector h = channel_vector(design, ctx.surface, rx, ctx.wave, ctx.medium);
            profile[i] = {phi_values[i], received_power(h, 1.0)};
        }
    });
    return profile;
}

double attitude_estimate(double measured_power, std::span<const AttitudeProfilePoint> profile) {
    if (profile.size() < 2)
        throw std::invalid_argument("attitude_estimate: profile needs at least two points");
    for (std::size_t i = 1; i < profile.size(); ++i)
        if (!(profile[i].power < profile[i - 1].power))
            throw std::invalid_argument("attitude_estimate: profile must be strictly decreasing");
    if (measured_power >= profile.front().power) return profile.front().phi;
    if (measured_power <= profile.back().power) return profile.back().phi;
    for (std::size_t i = 1; i < profile.size(); ++i) {
        if (measured_power >= profile[i].power) {
            const double p0 = profile[i - 1].power;
            const double p1 = profile[i].power;
            const double w = (measured_power - p0) / (p1 - p0);
            return profile[i - 1].phi + w * (profile[i].phi - profile[i - 1].phi);
        }
    }
    return profile.back().phi;
}

namespace {

// Fully differentiated per-node kernel of the channel integrand for one
// antenna: value F = (cos_in + cos_out)/d e^{-jkd} and dF/dXi_i =
// e^{-jkd}/d [dcos_i + (cos_in + cos_out)(-1/d - jk) dd_i].
struct KernelGradient {
    Complex gx, gy, gz;
};

KernelGradient kernel_gradient(double node_x, double node_y, const Vec3& ant, double cos_in,
                               double k) {
    const double dxv = ant.x - node_x;
    const double dyv = ant.y - node_y;
    const double d = std::sqrt(dxv * dxv + dyv * dyv + ant.z * ant.z);
    const double inv_d = 1.0 / d;
    const double cos_out = ant.z * inv_d;

    const double dd_x = dxv * inv_d;
    const double dd_y = dyv * inv_d;
    const double dd_z = ant.z * inv_d;

    // d(cos_out)/dXi = delta_z/d - (z/d^2) dd_i
    const double dcos_x = -cos_out * inv_d * dd_x;
    const double dcos_y = -cos_out * inv_d * dd_y;
    const double dcos_z = inv_d - cos_out * inv_d * dd_z;

    const Complex phase{std::cos(k * d), -std::sin(k * d)};
    const Complex radial = (cos_in + cos_out) * Complex{-inv_d, -k};
    const Complex common = phase * inv_d;

    KernelGradient g;
    g.gx = common * (dcos_x + radial * dd_x);
    g.gy = common * (dcos_y + radial * dd_y);
    g.gz = common * (dcos_z + radial * dd_z);
    return g;
}

} // namespace

SignalJacobian signal_jacobian(const ScanContext& ctx, std::span<const ReflectionDesign> designs,
                               const Vec3& receiver_center) {
    const UlaReceiver rx = ctx.receiver_at(receiver_center);
    const std::size_t num_ant = static_cast<std::size_t>(ctx.num_antennas);
    const std::size_t num_slots = designs.size();
    SignalJacobian jac;
    jac.num_slots = num_slots;
    jac.num_antennas = num_ant;
    jac.d_dx.resize(num_slots * num_ant);
    jac.d_dy.resize(num_slots * num_ant);
    jac.d_dz.resize(num_slots * num_ant);

    const double k = ctx.medium.wavenumber();
    const double cos_in = std::cos(ctx.wave.theta_in());
    const double sin_in = std::sin(ctx.wave.theta_in());
    const SurfaceGrid& grid = ctx.surface;
    const double l = ctx.wave.source_distance();
    const Complex prefactor = std::sqrt(ctx.wave.tx_gain() * ctx.rx_gain) / (8.0 * pi * l) *
                              std::polar(1.0, -k * l) * Complex{0.0, -1.0};

    std::vector<Vec3> ants(num_ant);
    for (std::size_t m = 0; m < num_ant; ++m)
        ants[m] = antenna_position(rx, static_cast<int>(m) + 1);

    parallel_for(num_slots, [&](std::size_t t_begin, std::size_t t_end) {
        for (std::size_t t = t_begin; t < t_end; ++t) {
            const ReflectionDesign& design = designs[t];
            for (std::size_t m = 0; m < num_ant; ++m) {
                const Vec3 ant = ants[m];
                const CVec3 sum =
                    pairwise_reduce<CVec3>(grid.count(), CVec3{}, [&](std::size_t i) {
                        const double x = grid.node_x_of(i);
                        const double y = grid.node_y_of(i);
                        const Complex gamma =
                            design.gamma(x, y) * std::polar(1.0, -k * y * sin_in);
                        const KernelGradient g = kernel_gradient(x, y, ant, cos_in, k);
                        CVec3 v;
                        v.x = gamma * g.gx;
                        v.y = gamma * g.gy;
                        v.z = gamma * g.gz;
                        return v;
                    });
                const Complex scale = prefactor * grid.cell_area();
                jac.d_dx[t * num_ant + m] = scale * sum.x;
                jac.d_dy[t * num_ant + m] = scale * sum.y;
                jac.d_dz[t * num_ant + m] = scale * sum.z;
            }
        }
    });
    return jac;
}

SignalJacobian scan_jacobian(const ScanContext& ctx, const ScanGrid& grid, DesignKind kind,
                             const Vec3& receiver_center) {
    if (kind == DesignKind::spherical) {
        std::vector<ReflectionDesign> designs;
        designs.reserve(grid.count());
        for (std::size_t t = 0; t < grid.count(); ++t)
            designs.push_back(design_for_candidate(kind, grid.candidate(t), ctx));
        return signal_jacobian(ctx, designs, receiver_center);
    }

    // Factored path: per antenna and axis, x-sums of the differentiated
    // kernel per plate row, then one row-weighted sum per design.
    const UlaReceiver rx = ctx.receiver_at(receiver_center);
    const SurfaceGrid& sgrid = ctx.surface;
    const std::size_t num_ant = static_cast<std::size_t>(ctx.num_antennas);
    const std::size_t rows = sgrid.count_y();
    const std::size_t cols = sgrid.count_x();
    const double k = ctx.medium.wavenumber();
    const double cos_in = std::cos(ctx.wave.theta_in());
    const double l = ctx.wave.source_distance();
    const Complex prefactor = std::sqrt(ctx.wave.tx_gain() * ctx.rx_gain) / (8.0 * pi * l) *
                              std::polar(1.0, -k * l) * Complex{0.0, -1.0};

    std::vector<Complex> sx(num_ant * rows), sy(num_ant * rows), sz(num_ant * rows);
    parallel_for(num_ant, [&](std::size_t m_begin, std::size_t m_end) {
        for (std::size_t m = m_begin; m < m_end; ++m) {
            const Vec3 ant = antenna_position(rx, static_cast<int>(m) + 1);
            for (std::size_t j = 0; j < rows; ++j) {
                const double y = sgrid.node_y(j);
                const CVec3 rowsum =
                    pairwise_reduce<CVec3>(cols, CVec3{}, [&](std::size_t i) {
                        const KernelGradient g =
                            kernel_gradient(sgrid.node_x(i), y, ant, cos_in, k);
                        CVec3 v;
                        v.x = g.gx;
                        v.y = g.gy;
                        v.z = g.gz;
                        return v;
                    });
                sx[m * rows + j] = rowsum.x;
                sy[m * rows + j] = rowsum.y;
                sz[m * rows + j] = rowsum.z;
            }
        }
    });

    const std::size_t num_slots = grid.count();
    SignalJacobian jac;
    jac.num_slots = num_slots;
    jac.num_antennas = num_ant;
    jac.d_dx.resize(num_slots * num_ant);
    jac.d_dy.resize(num_slots * num_ant);
    jac.d_dz.resize(num_slots * num_ant);

    parallel_for(num_slots, [&](std::size_t t_begin, std::size_t t_end) {
        for (std::size_t t = t_begin; t < t_end; ++t) {
            const ReflectionDesign design = design_for_candidate(kind, grid.candidate(t), ctx);
            const std::vector<Complex> factors =
                design_row_factors(design, sgrid, ctx.wave, ctx.medium);
            for (std::size_t m = 0; m < num_ant; ++m) {
                Complex ax{0.0, 0.0}, ay{0.0, 0.0}, az{0.0, 0.0};
                const Complex* px = sx.data() + m * rows;
                const Complex* py = sy.data() + m * rows;
                const Complex* pz = sz.data() + m * rows;
                ax = pairwise_reduce<Complex>(rows, Complex{0.0, 0.0},
                                              [&](std::size_t j) { return factors[j] * px[j]; });
                ay = pairwise_reduce<Complex>(rows, Complex{0.0, 0.0},
                                              [&](std::size_t j) { return factors[j] * py[j]; });
                az = pairwise_reduce<Complex>(rows, Complex{0.0, 0.0},
                                              [&](std::size_t j) { return factors[j] * pz[j]; });
                jac.d_dx[t * num_ant + m] = prefactor * ax;
                jac.d_dy[t * num_ant + m] = prefactor * ay;
                jac.d_dz[t * num_ant + m] = prefactor * az;
            }
        }
    });
    return jac;
}

namespace {

// Cyclic Jacobi eigensolver for symmetric 2x2/3x3 matrices; returns
// eigenvalues and (column) eigenvectors.
void symmetric_eigen(const double a_in[3][3], int dim, double eigenvalues[3],
                     double eigenvectors[3][3]) {
    double a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            a[i][j] = i < dim && j < dim ? a_in[i][j] : (i == j ? 1.0 : 0.0);
            eigenvectors[i][j] = i == j ? 1.0 : 0.0;
        }
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < dim; ++p)
            for (int q = p + 1; q < dim; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-300) break;
        for (int p = 0; p < dim; ++p) {
            for (int q = p + 1; q < dim; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < 3; ++i) {
                    const double aip = a[i][p];
                    const double aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (int i = 0; i < 3; ++i) {
                    const double api = a[p][i];
                    const double aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (int i = 0; i < 3; ++i) {
                    const double vip = eigenvectors[i][p];
                    const double viq = eigenvectors[i][q];
                    eigenvectors[i][p] = c * vip - s * viq;
                    eigenvectors[i][q] = s * vip + c * viq;
                }
            }
        }
    }
    for (int i = 0; i < 3; ++i) eigenvalues[i] = a[i][i];
}

} // namespace

double FisherMatrix::min_eigenvalue() const {
    double ev[3];
    double vec[3][3];
    symmetric_eigen(j, dim, ev, vec);
    double best = ev[0];
    for (int i = 1; i < dim; ++i) best = std::min(best, ev[i]);
    return best;
}

FisherMatrix fisher_matrix(const SignalJacobian& jac, double sigma, const bool axes_mask[3]) {
    if (!(sigma > 0.0)) throw std::invalid_argument("fisher_matrix: sigma must be > 0");
    FisherMatrix f;
    f.dim = 0;
    for (int i = 0; i < 3; ++i)
        if (axes_mask[i]) f.axes[f.dim++] = i;
    if (f.dim == 0) throw std::invalid_argument("fisher_matrix: no axes selected");

    const double scale = 2.0 / (sigma * sigma);
    const std::size_t n = jac.num_slots * jac.num_antennas;
    for (int r = 0; r < f.dim; ++r) {
        for (int c = r; c < f.dim; ++c) {
            const std::vector<Complex>& gr =
                f.axes[r] == 0 ? jac.d_dx : (f.axes[r] == 1 ? jac.d_dy : jac.d_dz);
            const std::vector<Complex>& gc =
                f.axes[c] == 0 ? jac.d_dx : (f.axes[c] == 1 ? jac.d_dy : jac.d_dz);
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                sum += gr[i].real() * gc[i].real() + gr[i].imag() * gc[i].imag();
            f.j[r][c] = scale * sum;
            f.j[c][r] = f.j[r][c];
        }
    }

    const double min_eig = f.min_eigenvalue();
    double max_abs = 0.0;
    for (int r = 0; r < f.dim; ++r)
        for (int c = 0; c < f.dim; ++c) max_abs = std::max(max_abs, std::abs(f.j[r][c]));
    if (min_eig < -1e-10 * std::max(1.0, max_abs))
        throw std::runtime_error("fisher_matrix: matrix is not positive semidefinite");
    return f;
}

double peb(const FisherMatrix& fisher) {
    double ev[3];
    double vec[3][3];
    symmetric_eigen(fisher.j, fisher.dim, ev, vec);
    double max_eig = 0.0;
    for (int i = 0; i < fisher.dim; ++i) max_eig = std::max(max_eig, std::abs(ev[i]));
    for (int i = 0; i < fisher.dim; ++i) {
        if (ev[i] <= 1e-12 * max_eig) {
            const char axis_names[] = {'x', 'y', 'z'};
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "peb: fisher matrix rank-deficient; null direction ~ "
                          "(%.3g, %.3g, %.3g) over axes (%c, %c, %c)",
                          vec[0][i], vec[1][i], fisher.dim > 2 ? vec[2][i] : 0.0,
                          axis_names[fisher.axes[0]], axis_names[fisher.axes[1]],
                          axis_names[fisher.dim > 2 ? fisher.axes[2] : fisher.axes[0]]);
            throw std::runtime_error(buf);
        }
    }
    double trace_inv = 0.0;
    for (int i = 0; i < fisher.dim; ++i) trace_inv += 1.0 / ev[i];
    return std::sqrt(trace_inv);
}

std::vector<RmseRow> rmse_harness(std::shared_ptr<const ScanContext> ctx, const ScanGrid& grid,
                                  DesignKind kind, std::span<const double> snr_db_list,
                                  std::uint64_t seed, const RmseOptions& options) {
    if (!ctx) throw std::invalid_argument("rmse_harness: missing context");
    if (options.trials < 1) throw std::invalid_argument("rmse_harness: trials must be >= 1");

    const ScanModel model(ctx, grid, kind);
    const std::size_t num_slots = model.num_slots();
    const std::size_t num_ant = model.num_antennas();
    const std::size_t trials = static_cast<std::size_t>(options.trials);

    // Truth candidates per trial, shared across SNR points (paired trials).
    std::vector<std::size_t> truth_index(trials);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const std::uint64_t draw = mix64(mix64(seed ^ 0xC2B2AE3D27D4EB4FULL) ^ trial);
        truth_index[trial] = static_cast<std::size_t>(draw % grid.count());
    }

    std::vector<Vec3> truth_pos(trials);
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Vec3 p = grid.candidate(truth_index[trial]);
        if (options.off_grid) {
            const std::uint64_t s = trial_seed(seed ^ 0x94D049BB133111EBULL, trial);
            const auto jitter = [&](std::uint64_t axis) {
                const std::uint64_t bits = mix64(s ^ (axis + 17));
                const double u = static_cast<double>(bits >> 11) * 0x1p-53;
                return (u - 0.5) * grid.step();
            };
            if (!grid.in_plane()) p.x += jitter(0);
            p.y += jitter(1);
            p.z = std::max(p.z + jitter(2), 0.25 * grid.step());
        }
        truth_pos[trial] = p;
    }

    // Per-distinct-truth reference power (planar design aimed at the truth)
    // and unit-sigma PEB; both are deterministic and cacheable.
    std::vector<std::size_t> distinct;
    for (std::size_t trial = 0; trial < trials; ++trial)
        if (!options.off_grid &&
            std::find(distinct.begin(), distinct.end(), truth_index[trial]) == distinct.end())
            distinct.push_back(truth_index[trial]);

    const bool in_plane_mask[3] = {false, true, true};
    const bool full_mask[3] = {true, true, true};
    const bool* mask = grid.in_plane() ? in_plane_mask : full_mask;

    std::unordered_map<std::size_t, double> ref_power;
    std::unordered_map<std::size_t, double> unit_peb;
    {
        std::vector<double> powers(distinct.size());
        std::vector<double> pebs(distinct.size());
        parallel_for(distinct.size(), [&](std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; ++i) {
                const Vec3 p = grid.candidate(distinct[i]);
                const UlaReceiver rx = ctx->receiver_at(p);
                const ReflectionDesign planar =
                    design_for_candidate(DesignKind::planar, p, *ctx);
                const ChannelVector h =
                    channel_vector(planar, ctx->surface, rx, ctx->wave, ctx->medium);
                powers[i] = received_power(h, 1.0);
                const SignalJacobian jac = scan_jacobian(*ctx, grid, kind, p);
                pebs[i] = peb(fisher_matrix(jac, 1.0, mask));
            }
        });
        for (std::size_t i = 0; i < distinct.size(); ++i) {
            ref_power[distinct[i]] = powers[i];
            unit_peb[distinct[i]] = pebs[i];
        }
    }

    // Off-grid truths need per-trial signals and references.
    std::vector<std::vector<Complex>> off_grid_signals;
    std::vector<double> off_grid_power(trials, 0.0);
    std::vector<double> off_grid_peb(trials, 0.0);
    if (options.off_grid) {
        off_grid_signals.resize(trials);
        parallel_for(trials, [&](std::size_t begin, std::size_t end) {
            for (std::size_t trial = begin; trial < end; ++trial) {
                const Vec3 p = truth_pos[trial];
                off_grid_signals[trial] = scan_signals(*ctx, grid, kind, p);
                const UlaReceiver rx = ctx->receiver_at(p);
                const ReflectionDesign planar =
                    design_for_candidate(DesignKind::planar, p, *ctx);
                const ChannelVector h =
                    channel_vector(planar, ctx->surface, rx, ctx->wave, ctx->medium);
                off_grid_power[trial] = received_power(h, 1.0);
                off_grid_peb[trial] = peb(fisher_matrix(scan_jacobian(*ctx, grid, kind, p), 1.0, mask));
            }
        });
    }

    std::vector<RmseRow> rows;
    for (const double snr_db : snr_db_list) {
        const bool noiseless = std::isinf(snr_db) && snr_db > 0.0;
        const double snr_lin = noiseless ? 0.0 : std::pow(10.0, snr_db / 10.0);

        std::vector<double> err_fs(trials), err_ml(trials), peb_val(trials);
        parallel_for(trials, [&](std::size_t begin, std::size_t end) {
            std::vector<Complex> samples(num_slots * num_ant);
            for (std::size_t trial = begin; trial < end; ++trial) {
                const std::size_t c_true = truth_index[trial];
                const double p_ref =
                    options.off_grid ? off_grid_power[trial] : ref_power.at(c_true);
                const double sigma =
                    noiseless ? 0.0
                              : std::sqrt(p_ref / (static_cast<double>(num_ant) * snr_lin));

                std::span<const Complex> signals =
                    options.off_grid ? std::span<const Complex>(off_grid_signals[trial])
                                     : model.row(c_true);
                const std::uint64_t noise_seed = trial_seed(seed, trial);
                for (std::size_t t = 0; t < num_slots; ++t)
                    for (std::size_t m = 0; m < num_ant; ++m) {
                        Complex v = signals[t * num_ant + m];
                        if (sigma > 0.0)
                            v += sigma * counter_complex_gaussian(noise_seed, t, m);
                        samples[t * num_ant + m] = v;
                    }
                const ScanMeasurement meas(samples, num_slots, num_ant, sigma, noise_seed,
                                           kind, ctx);

                const LocationEstimate fs = fs_estimate(meas, grid);
                const LocationEstimate ml =
                    ml_estimate_with_model(meas, model, options.n_l);
                const Vec3 truth = truth_pos[trial];
                err_fs[trial] = norm(fs.position - truth);
                err_ml[trial] = norm(ml.position - truth);
                const double upeb =
                    options.off_grid ? off_grid_peb[trial] : unit_peb.at(c_true);
                peb_val[trial] = sigma * upeb;
            }
        });

        RmseRow row;
        row.snr_db = snr_db;
        double fs2 = 0.0, ml2 = 0.0, pb2 = 0.0;
        for (std::size_t trial = 0; trial < trials; ++trial) {
            fs2 += err_fs[trial] * err_fs[trial];
            ml2 += err_ml[trial] * err_ml[trial];
            pb2 += peb_val[trial] * peb_val[trial];
        }
        row.rmse_fs = std::sqrt(fs2 / static_cast<double>(trials));
        row.rmse_ml = std::sqrt(ml2 / static_cast<double>(trials));
        row.peb_rms = std::sqrt(pb2 / static_cast<double>(trials));
        rows.push_back(row);
    }
    return rows;
}

} // namespace riswave
