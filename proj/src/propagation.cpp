#include "riswave/propagation.hpp"

#include <cmath>
#include <stdexcept>

namespace riswave {

namespace {

void require_above_plate(const Vec3& p, const char* what) {
    if (!(p.z > 0.0)) throw std::invalid_argument(std::string(what) + ": point must have z > 0");
}

void require_antennas_above_plate(const UlaReceiver& rx) {
    for (int m = 1; m <= rx.num_antennas(); ++m)
        require_above_plate(antenna_position(rx, m), "antenna");
}

Complex unit_phasor(double phase) { return {std::cos(phase), std::sin(phase)}; }

// Constant in front of the channel integrand once q, b and g are multiplied
// out: sqrt(G_t G_r) / (8 pi j l) * e^{-jkl}.
Complex channel_prefactor(const UlaReceiver& rx, const IncidentWave& wave,
                          const Medium& medium) {
    const double l = wave.source_distance();
    const double magnitude =
        std::sqrt(wave.tx_gain() * rx.rx_gain()) / (8.0 * pi * l);
    return magnitude * unit_phasor(-medium.wavenumber() * l) * Complex{0.0, -1.0};
}

} // namespace

ChannelVector::ChannelVector(std::vector<Complex> entries) : entries_(std::move(entries)) {
    for (const Complex& h : entries_)
        if (!std::isfinite(h.real()) || !std::isfinite(h.imag()))
            throw std::invalid_argument("ChannelVector: entries must be finite");
}

double ChannelVector::squared_norm() const {
    double s = 0.0;
    for (const Complex& h : entries_) s += std::norm(h);
    return s;
}

FieldSample::FieldSample(Vec3 position, CVec3 e_field)
    : position_(position), e_field_(e_field) {
    require_above_plate(position, "FieldSample");
}

double path_distance(double x, double y, const Vec3& antenna) {
    require_above_plate(antenna, "path_distance");
    const double dx = antenna.x - x;
    const double dy = antenna.y - y;
    return std::sqrt(dx * dx + dy * dy + antenna.z * antenna.z);
}

double obliquity_angle(double x, double y, const Vec3& antenna) {
    return std::acos(antenna.z / path_distance(x, y, antenna));
}

Complex kirchhoff_contribution(double x, double y, const Vec3& antenna,
                               const IncidentWave& wave, const Medium& medium) {
    const double k = medium.wavenumber();
    const double l = wave.source_distance();
    const double d = path_distance(x, y, antenna);
    const double cos_out = antenna.z / d;
    const double obliquity = 0.5 * (std::cos(wave.theta_in()) + cos_out);
    const double phase = -k * (l + y * std::sin(wave.theta_in()) + d);
    // 1/j = -j
    return wave.source_magnitude() / (medium.wavelength() * l * d) * obliquity *
           unit_phasor(phase) * Complex{0.0, -1.0};
}

std::vector<Complex> steering_vector(double x, double y, const UlaReceiver& rx,
                                     const IncidentWave& wave, const Medium& medium) {
    require_antennas_above_plate(rx);
    const double k = medium.wavenumber();
    const double common = wave.source_distance() + y * std::sin(wave.theta_in());
    const double scale = 1.0 / std::sqrt(static_cast<double>(rx.num_antennas()));
    std::vector<Complex> b(rx.num_antennas());
    for (int m = 1; m <= rx.num_antennas(); ++m) {
        const double d = path_distance(x, y, antenna_position(rx, m));
        b[m - 1] = scale * unit_phasor(-k * (common + d));
    }
    return b;
}

std::vector<Complex> path_gain_vector(double x, double y, const UlaReceiver& rx,
                                      const IncidentWave& wave, const Medium& medium) {
    require_antennas_above_plate(rx);
    const double cos_in = std::cos(wave.theta_in());
    const double scale = std::sqrt(static_cast<double>(rx.num_antennas())) /
                         (2.0 * wave.source_distance() * medium.wavelength());
    std::vector<Complex> q(rx.num_antennas());
    for (int m = 1; m <= rx.num_antennas(); ++m) {
        const Vec3 ant = antenna_position(rx, m);
        const double d = path_distance(x, y, ant);
        const double cos_out = ant.z / d;
        // 1/(2jl lambda) carries a -j.
        q[m - 1] = Complex{0.0, -scale * (cos_in + cos_out) / d};
    }
    return q;
}

std::vector<Complex> channel_gain_vector(double x, double y, const UlaReceiver& rx,
                                         const IncidentWave& wave, const Medium& medium) {
    std::vector<Complex> g = path_gain_vector(x, y, rx, wave, medium);
    const double scale =
        medium.wavelength() / (4.0 * pi) * std::sqrt(wave.tx_gain() * rx.rx_gain());
    for (Complex& v : g) v *= scale;
    return g;
}

ChannelVector channel_vector(const ReflectionDesign& design, const SurfaceGrid& grid,
                             const UlaReceiver& rx, const IncidentWave& wave,
                             const Medium& medium) {
    if (grid.count() == 0) throw std::invalid_argument("channel_vector: empty grid");
    require_antennas_above_plate(rx);

    const double k = medium.wavenumber();
    const double sin_in = std::sin(wave.theta_in());
    const double cos_in = std::cos(wave.theta_in());
    const std::size_t nodes = grid.count();

    // Design factor per node: Gamma(x, y) e^{-jk y sin(theta_in)} dA.
    std::vector<Complex> design_factor(nodes);
    parallel_for(nodes, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double x = grid.node_x_of(i);
            const double y = grid.node_y_of(i);
            design_factor[i] =
                design.gamma(x, y) * unit_phasor(-k * y * sin_in) * grid.cell_area();
        }
    });

    const Complex prefactor = channel_prefactor(rx, wave, medium);
    std::vector<Complex> h(rx.num_antennas());
    std::vector<Vec3> ants(rx.num_antennas());
    for (int m = 1; m <= rx.num_antennas(); ++m) ants[m - 1] = antenna_position(rx, m);

    parallel_for(h.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            const Vec3 ant = ants[m];
            const Complex sum =
                pairwise_reduce<Complex>(nodes, Complex{0.0, 0.0}, [&](std::size_t i) {
                    const double x = grid.node_x_of(i);
                    const double y = grid.node_y_of(i);
                    const double dx = ant.x - x;
                    const double dy = ant.y - y;
                    const double d = std::sqrt(dx * dx + dy * dy + ant.z * ant.z);
                    const double kernel = (cos_in + ant.z / d) / d;
                    return design_factor[i] * (kernel * unit_phasor(-k * d));
                });
            h[m] = prefactor * sum;
        }
    });
    return ChannelVector(std::move(h));
}

RowFactoredChannel::RowFactoredChannel(const SurfaceGrid& grid, const UlaReceiver& rx,
                                       const IncidentWave& wave, const Medium& medium) {
    require_antennas_above_plate(rx);
    num_antennas_ = static_cast<std::size_t>(rx.num_antennas());
    rows_ = grid.count_y();
    const std::size_t cols = grid.count_x();
    row_sums_.resize(num_antennas_ * rows_);
    row_y_.resize(rows_);
    for (std::size_t j = 0; j < rows_; ++j) row_y_[j] = grid.node_y(j);

    const double k = medium.wavenumber();
    const double cos_in = std::cos(wave.theta_in());
    prefactor_ = channel_prefactor(rx, wave, medium);
    k_sin_theta_ = k * std::sin(wave.theta_in());
    cell_area_ = grid.cell_area();

    parallel_for(num_antennas_, [&](std::size_t begin, std::size_t end) {
        for (std::size_t m = begin; m < end; ++m) {
            const Vec3 ant = antenna_position(rx, static_cast<int>(m) + 1);
            for (std::size_t j = 0; j < rows_; ++j) {
                const double y = row_y_[j];
                row_sums_[m * rows_ + j] =
                    pairwise_reduce<Complex>(cols, Complex{0.0, 0.0}, [&](std::size_t i) {
                        const double x = grid.node_x(i);
                        const double dx = ant.x - x;
                        const double dy = ant.y - y;
                        const double d = std::sqrt(dx * dx + dy * dy + ant.z * ant.z);
                        const double kernel = (cos_in + ant.z / d) / d;
                        return Complex{kernel * std::cos(k * d), -kernel * std::sin(k * d)};
                    });
            }
        }
    });
}

std::vector<Complex> design_row_factors(const ReflectionDesign& design, const SurfaceGrid& grid,
                                        const IncidentWave& wave, const Medium& medium) {
    if (!design.x_invariant())
        throw std::invalid_argument("design_row_factors: design must be x-invariant");
    const double k_sin = medium.wavenumber() * std::sin(wave.theta_in());
    std::vector<Complex> row_gamma(grid.count_y());
    for (std::size_t j = 0; j < row_gamma.size(); ++j) {
        const double y = grid.node_y(j);
        row_gamma[j] = design.gamma(0.0, y) * unit_phasor(-k_sin * y) * grid.cell_area();
    }
    return row_gamma;
}

ChannelVector RowFactoredChannel::evaluate(const ReflectionDesign& design) const {
    if (!design.x_invariant())
        throw std::invalid_argument("RowFactoredChannel: design must be x-invariant");
    std::vector<Complex> row_gamma(rows_);
    for (std::size_t j = 0; j < rows_; ++j) {
        const double y = row_y_[j];
        row_gamma[j] = design.gamma(0.0, y) * unit_phasor(-k_sin_theta_ * y) * cell_area_;
    }
    return evaluate(std::span<const Complex>(row_gamma));
}

ChannelVector RowFactoredChannel::evaluate(std::span<const Complex> row_factors) const {
    if (row_factors.size() != rows_)
        throw std::invalid_argument("RowFactoredChannel: row factor count mismatch");
    std::vector<Complex> h(num_antennas_);
    for (std::size_t m = 0; m < num_antennas_; ++m) {
        const Complex* rows = row_sums_.data() + m * rows_;
        const Complex sum = pairwise_reduce<Complex>(
            rows_, Complex{0.0, 0.0},
            [&](std::size_t j) { return row_factors[j] * rows[j]; });
        h[m] = prefactor_ * sum;
    }
    return ChannelVector(std::move(h));
}

FieldSample field_at(const ReflectionDesign& design, const SurfaceGrid& grid,
                     const Vec3& point, const IncidentWave& wave, const Medium& medium) {
    require_above_plate(point, "field_at");
    const double k = medium.wavenumber();
    const double sin_in = std::sin(wave.theta_in());
    const double cos_in = std::cos(wave.theta_in());
    const double e0 = wave.e0();
    const double lambda = medium.wavelength();

    const Complex sum =
        pairwise_reduce<Complex>(grid.count(), Complex{0.0, 0.0}, [&](std::size_t i) {
            const double x = grid.node_x_of(i);
            const double y = grid.node_y_of(i);
            const double dx = point.x - x;
            const double dy = point.y - y;
            const double r = std::sqrt(dx * dx + dy * dy + point.z * point.z);
            const double obliquity = 0.5 * (cos_in + point.z / r);
            return design.gamma(x, y) *
                   (obliquity / r * unit_phasor(-k * (y * sin_in + r)));
        });
    // 1/(j lambda) = -j/lambda
    CVec3 e;
    e.x = sum * Complex{0.0, -e0 / lambda} * grid.cell_area();
    return FieldSample(point, e);
}

FieldSample dyadic_field_at(const ReflectionDesign& design, const SurfaceGrid& grid,
                            const Vec3& point, const IncidentWave& wave,
                            const Medium& medium) {
    require_above_plate(point, "dyadic_field_at");
    // Kernel derivatives blow up near the source plane.
    const double gap_x = std::max(std::abs(point.x) - 0.5 * grid.extent_x(), 0.0);
    const double gap_y = std::max(std::abs(point.y) - 0.5 * grid.extent_y(), 0.0);
    const double plate_distance = std::sqrt(gap_x * gap_x + gap_y * gap_y + point.z * point.z);
    if (plate_distance < medium.wavelength() / 10.0)
        throw std::invalid_argument(
            "dyadic_field_at: observation point within lambda/10 of the plate");

    const double k = medium.wavenumber();
    const double sin_in = std::sin(wave.theta_in());
    const double cos_in = std::cos(wave.theta_in());
    const double eta = medium.impedance();
    const double e0 = wave.e0();

    const CVec3 integral =
        pairwise_reduce<CVec3>(grid.count(), CVec3{}, [&](std::size_t i) {
            const double x = grid.node_x_of(i);
            const double y = grid.node_y_of(i);
            const double dx = point.x - x;
            const double dy = point.y - y;
            const double r = std::sqrt(dx * dx + dy * dy + point.z * point.z);
            const double ux = dx / r;
            const double uy = dy / r;
            const double uz = point.z / r;

            const Complex g = unit_phasor(-k * r) / r;
            const Complex jk_plus_inv{1.0 / r, k};
            const Complex g_r = -jk_plus_inv * g;           // dG/dR
            const Complex g_rr =
                (Complex{2.0 / (r * r) - k * k, 2.0 * k / r}) * g; // d2G/dR2

            // J_f,x without the common -2 E0 cos(theta_in)/eta factor.
            const Complex jx = design.gamma(x, y) * unit_phasor(-k * y * sin_in);

            const Complex transverse = g_rr - g_r / r;
            CVec3 v;
            v.x = jx * (g_rr * ux * ux + g_r * (1.0 - ux * ux) / r + k * k * g);
            v.y = jx * (transverse * ux * uy);
            v.z = jx * (transverse * ux * uz);
            return v;
        });

    // (1/(jk sqrt(mu eps))) * (mu/(4 pi)) = eta/(4 pi j k); J_f carries
    // -2 E0 cos(theta_in)/eta.
    const Complex scale = Complex{0.0, -1.0} * eta / (4.0 * pi * k) *
                          (-2.0 * e0 * cos_in / eta) * grid.cell_area();
    CVec3 e;
    e.x = scale * integral.x;
    e.y = scale * integral.y;
    e.z = scale * integral.z;
    return FieldSample(point, e);
}

double normalized_arc_power(const ReflectionDesign& design, const SurfaceGrid& grid, double d,
                            double theta, const IncidentWave& wave, const Medium& medium) {
    if (!(d > 0.0)) throw std::invalid_argument("normalized_arc_power: d must be > 0");
    const Vec3 point{0.0, d * std::cos(theta), d * std::sin(theta)};
    const FieldSample sample = field_at(design, grid, point, wave, medium);
    const double e2 = std::norm(sample.e_field().x) + std::norm(sample.e_field().y) +
                      std::norm(sample.e_field().z);
    return e2 / (2.0 * medium.impedance() * d * d);
}

double received_power(const ChannelVector& h, double s_power) {
    if (!(s_power >= 0.0)) throw std::invalid_argument("received_power: s_power must be >= 0");
    return h.squared_norm() * s_power;
}

double received_power_em(std::span<const FieldSample> fields_at_antennas, double rx_gain,
                         const Medium& medium) {
    double sum = 0.0;
    for (const FieldSample& f : fields_at_antennas) {
        const double e2 =
            std::norm(f.e_field().x) + std::norm(f.e_field().y) + std::norm(f.e_field().z);
        sum += e2;
    }
    const double lambda = medium.wavelength();
    return sum / (2.0 * medium.impedance()) * lambda * lambda * rx_gain / (4.0 * pi);
}

double capacity(double received_power_w, double noise_power_w) {
    if (!(noise_power_w > 0.0)) throw std::invalid_argument("capacity: noise power must be > 0");
    if (!(received_power_w >= 0.0))
        throw std::invalid_argument("capacity: received power must be >= 0");
    return std::log2(1.0 + received_power_w / noise_power_w);
}

} // namespace riswave
