#ifndef RISWAVE_SENSING_HPP
#define RISWAVE_SENSING_HPP

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "riswave/em_model.hpp"
#include "riswave/geometry.hpp"
#include "riswave/propagation.hpp"
#include "riswave/reflection_design.hpp"
#include "riswave/surface_grid.hpp"

namespace riswave {

/// Ordered candidate list for a focal scan. Either an arc grid (distance d
/// crossed with angular position psi, candidates at (0, d cos psi, d sin psi))
/// or an axis-aligned Cartesian grid. Candidates are strictly above the plate.
///
/// Arc grids place d at integer multiples of d_step inside [d_min, d_max] and
/// psi at integer multiples of psi_step inside the open interval (0, pi/2),
/// so that step-aligned truths are exactly on-grid. Ordering is d-major, then
/// psi ascending. Cartesian grids are ordered x-major, then y, then z.
class ScanGrid {
  public:
    static ScanGrid arc(double d_min, double d_max, double d_step, double psi_step_rad);
    /// In-plane grid at x = 0: count x count candidates centered on
    /// (y_center, z_center) with the given spacing.
    static ScanGrid cartesian_yz(double y_center, double z_center, double step,
                                 std::size_t count_per_axis);
    /// Full 3-D grid centered on `center`.
    static ScanGrid cartesian_xyz(const Vec3& center, double step, std::size_t count_per_axis);

    std::size_t count() const { return candidates_.size(); }
    const Vec3& candidate(std::size_t t) const { return candidates_[t]; }
    bool in_plane() const { return in_plane_; }
    double step() const { return step_; }
    const std::string& description() const { return description_; }

  private:
    ScanGrid() = default;
    std::vector<Vec3> candidates_;
    bool in_plane_ = true;
    double step_ = 0.0;
    std::string description_;
};

/// Physical context shared by every scan operation: plate, medium, incident
/// wave, the receiver template (antenna count, length, gain; its center and
/// attitude are set per use) and the quadrature density.
struct ScanContext {
    ScanContext(const RisAperture& aperture, const Medium& medium, const IncidentWave& wave,
                int num_antennas, double ula_length, double rx_gain,
                double samples_per_wavelength);

    RisAperture aperture;
    Medium medium;
    IncidentWave wave;
    int num_antennas;
    double ula_length;
    double rx_gain;
    SurfaceGrid surface;

    UlaReceiver receiver_at(const Vec3& center, double attitude_phi = 0.0) const;
};

/// Design focused at a scan candidate: cylindrical -> focal line through the
/// point along e_x; spherical -> focal point; planar -> theta_out toward it.
ReflectionDesign design_for_candidate(DesignKind kind, const Vec3& candidate,
                                      const ScanContext& ctx);

/// Noise-free per-slot, per-antenna signals s_{t,m} = h_m(design_t) * q_t
/// with pilot q_t = 1, for a receiver centered at `center` (attitude 0).
/// Layout is slot-major: s[t * M + m].
std::vector<Complex> scan_signals(const ScanContext& ctx, const ScanGrid& grid,
                                  DesignKind kind, const Vec3& center);

/// One complete scan observation y_{t,m}, slot-major.
class ScanMeasurement {
  public:
    ScanMeasurement(std::vector<Complex> samples, std::size_t num_slots,
                    std::size_t num_antennas, double sigma, std::uint64_t seed,
                    DesignKind kind, std::shared_ptr<const ScanContext> context);

    const Complex& at(std::size_t t, std::size_t m) const {
        return samples_[t * num_antennas_ + m];
    }
    std::span<const Complex> samples() const { return samples_; }
    std::size_t num_slots() const { return num_slots_; }
    std::size_t num_antennas() const { return num_antennas_; }
    double sigma() const { return sigma_; }
    std::uint64_t seed() const { return seed_; }
    DesignKind kind() const { return kind_; }
    const ScanContext& context() const { return *context_; }
    std::shared_ptr<const ScanContext> context_ptr() const { return context_; }

  private:
    std::vector<Complex> samples_;
    std::size_t num_slots_;
    std::size_t num_antennas_;
    double sigma_;
    std::uint64_t seed_;
    DesignKind kind_;
    std::shared_ptr<const ScanContext> context_;
};

/// Unit-variance circularly symmetric complex Gaussian draw from a counter
/// keyed on (seed, slot, antenna); schedule-independent by construction.
Complex counter_complex_gaussian(std::uint64_t seed, std::uint64_t slot, std::uint64_t antenna);

/// Derives the per-trial noise seed used by the Monte Carlo harness.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial);

/// Simulates one scan of the grid against a true receiver: for every slot t
/// the design is focused at candidate t, the noise-free signals are computed,
/// and i.i.d. CN(0, sigma^2) noise is added per entry, seeded deterministically.
ScanMeasurement simulate_scan(const UlaReceiver& true_receiver, const ScanGrid& grid,
                              DesignKind kind, double sigma, std::uint64_t seed,
                              std::shared_ptr<const ScanContext> ctx);

enum class EstimationMethod { fs, ml };

/// Location estimate: always one of the grid candidates.
struct LocationEstimate {
    Vec3 position;
    std::size_t candidate_index = 0;
    double score = 0.0;
    EstimationMethod method = EstimationMethod::fs;
    double phase_offset = 0.0; // recovered k*l gauge, ML only
    bool ambiguous = false;    // top score shared within 1e-9 by another candidate
};

/// Focal-scanning estimate: candidate t maximizing sum_m |y_{t,m}|^2,
/// ties broken by smallest t.
LocationEstimate fs_estimate(const ScanMeasurement& meas, const ScanGrid& grid);

/// Reduced ML objective
///   f = -(1/sigma^2) sum_{m,t} |y|^2 sin^2(arg(y) - psi_{t,m} + kl)
/// against precomputed model phases psi (slot-major). Noiseless measurements
/// use a unit noise scale; the argmax is unaffected.
double ml_objective(const ScanMeasurement& meas, std::span<const double> psi_model, double kl);

/// Per-candidate noise-free signal tensor for every (candidate, slot,
/// antenna) triple. Built once, shared by the ML estimator and the Monte
/// Carlo harness; on-grid truths read their signals straight from a row.
class ScanModel {
  public:
    ScanModel(std::shared_ptr<const ScanContext> ctx, const ScanGrid& grid, DesignKind kind);

    std::span<const Complex> row(std::size_t candidate) const;
    std::size_t num_candidates() const { return num_candidates_; }
    std::size_t num_slots() const { return num_slots_; }
    std::size_t num_antennas() const { return num_antennas_; }
    const ScanGrid& grid() const { return grid_; }
    DesignKind kind() const { return kind_; }
    const ScanContext& context() const { return *ctx_; }
    std::shared_ptr<const ScanContext> context_ptr() const { return ctx_; }

  private:
    std::shared_ptr<const ScanContext> ctx_;
    ScanGrid grid_;
    DesignKind kind_;
    std::size_t num_candidates_, num_slots_, num_antennas_;
    std::vector<Complex> tensor_; // [c][t][m]
};

/// Brute-force ML estimate over grid candidates x n_l phase offsets in
/// [0, pi/k); ties by smallest candidate index, then smallest l.
LocationEstimate ml_estimate(const ScanMeasurement& meas, const ScanGrid& grid, int n_l);

/// Same search against a prebuilt model (used by the harness). When
/// `candidate_scores` is given it receives the best-over-l objective per
/// candidate.
LocationEstimate ml_estimate_with_model(const ScanMeasurement& meas, const ScanModel& model,
                                        int n_l, std::vector<double>* candidate_scores = nullptr);

/// Received power versus ULA attitude phi, under the design focused at the
/// receiver center for phi = 0.
struct AttitudeProfilePoint {
    double phi;
    double power;
};
std::vector<AttitudeProfilePoint> attitude_power_profile(const ScanContext& ctx,
                                                         DesignKind kind, const Vec3& center,
                                                         std::span<const double> phi_values);

/// Inverts a strictly decreasing power profile by linear interpolation,
/// clamping to the grid ends.
double attitude_estimate(double measured_power, std::span<const AttitudeProfilePoint> profile);

/// Analytic gradients of the noise-free signals s_{t,m} with respect to the
/// receiver-center coordinates (x_u, y_u, z_u), slot-major layout.
struct SignalJacobian {
    std::size_t num_slots = 0;
    std::size_t num_antennas = 0;
    std::vector<Complex> d_dx, d_dy, d_dz;

    const Complex& axis(int i, std::size_t t, std::size_t m) const {
        const std::vector<Complex>& v = i == 0 ? d_dx : (i == 1 ? d_dy : d_dz);
        return v[t * num_antennas + m];
    }
};

/// Gradients by quadrature of the fully differentiated Kirchhoff integrand
/// (both the e^{-jkd}/d kernel factor (-1/d - jk) dd/dXi and the obliquity
/// derivative are included).
SignalJacobian signal_jacobian(const ScanContext& ctx, std::span<const ReflectionDesign> designs,
                               const Vec3& receiver_center);

/// Gradients for every design of a scan grid (factored fast path for
/// x-invariant design kinds).
SignalJacobian scan_jacobian(const ScanContext& ctx, const ScanGrid& grid, DesignKind kind,
                             const Vec3& receiver_center);

/// Fisher information matrix over the selected axes (2x2 in-plane or 3x3).
struct FisherMatrix {
    int dim = 0;
    int axes[3] = {0, 1, 2}; // indices into (x, y, z)
    double j[3][3] = {};

    double min_eigenvalue() const;
};

/// J_{ij} = (2/sigma^2) Re sum_{m,t} ds/dXi_i conj(ds/dXi_j) over the given
/// axes; axes_mask selects which of x, y, z vary (e.g. {false, true, true}
/// for in-plane sensing).
FisherMatrix fisher_matrix(const SignalJacobian& jac, double sigma, const bool axes_mask[3]);

/// Position error bound sqrt(trace(J^{-1})). Throws on rank-deficient J,
/// naming the null direction.
double peb(const FisherMatrix& fisher);

/// Monte Carlo localization RMSE versus SNR, FS and ML paired on identical
/// measurements. SNR follows the planar-reference convention: sigma^2 =
/// ||h_planar(truth)||^2 / snr. Truths are drawn uniformly on-grid unless
/// off_grid is set, in which case they are jittered within one cell.
struct RmseOptions {
    int trials = 200;
    int n_l = 32;
    bool off_grid = false;
};
struct RmseRow {
    double snr_db;
    double rmse_fs;
    double rmse_ml;
    double peb_rms;
};
std::vector<RmseRow> rmse_harness(std::shared_ptr<const ScanContext> ctx, const ScanGrid& grid,
                                  DesignKind kind, std::span<const double> snr_db_list,
                                  std::uint64_t seed, const RmseOptions& options);

} // namespace riswave

#endif
