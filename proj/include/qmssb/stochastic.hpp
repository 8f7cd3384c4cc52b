#pragma once

// Seedable noise generation, Euler-Maruyama integration and deterministic
// ensembles.

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace qmssb {

/// Eigenvalues down to -kPsdTolerance are accepted and clipped to zero.
inline constexpr double kPsdTolerance = 1e-10;

/// Rank-revealing factor of a symmetric PSD matrix: cov = L L^T with L of
/// shape n x rank, computed by diagonally pivoted Cholesky. A rank-deficient
/// covariance yields exactly dependent samples (e.g. x2 = -x1 for
/// [[I, -I], [-I, I]]).
struct PsdFactor {
    Eigen::MatrixXd lower;
    int rank = 0;
};

/// Throws CovarianceError for asymmetric input or eigenvalues below -kPsdTolerance.
PsdFactor factor_psd(const Eigen::MatrixXd &cov);

class NormalStream;

/// Zero-mean Gaussian vector L z, drawing rank deviates from `normals`.
Eigen::VectorXd sample_gaussian(const PsdFactor &factor, NormalStream &normals);

/// Zero-mean Gaussian vector with covariance `cov`; deterministic in `seed`.
Eigen::VectorXd sample_static_noise(const Eigen::MatrixXd &cov, std::uint64_t seed);

struct NoiseSpec {
    /// <xi(t) xi(t')> = white_amplitude delta(t - t') per noisy component.
    double white_amplitude = 0.0;
    /// Per-component multiplier of white_amplitude; empty means all ones.
    std::vector<double> white_mask;
    /// Covariance of a quenched vector drawn once per trajectory and handed
    /// to the drift.
    std::optional<Eigen::MatrixXd> static_covariance;
};

/// out = drift(t, x; quenched)
using DriftFunction =
    std::function<void(double t, std::span<const double> x, std::span<const double> quenched, std::span<double> out)>;

struct SdeProblem {
    std::size_t state_dimension = 1;
    DriftFunction drift;
    NoiseSpec noise;
    std::vector<double> initial_state;
    double t_start = 0.0;
    double t_end = 1.0;
    double dt = 1e-3;
    /// A trajectory diverges when any |x_i| exceeds this bound.
    double divergence_bound = 1e6;
    /// Keep every k-th state; the final state is always kept.
    std::size_t record_stride = 1;
};

/// Number of uniform steps covering [t_start, t_end].
std::size_t step_count(const SdeProblem &problem);

/// Throws DomainError when the problem is malformed.
void validate(const SdeProblem &problem);

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::vector<double> quenched;
    std::uint64_t seed = 0;
    bool decided = false;
    std::optional<double> decision_time;

    const std::vector<double> &final_state() const { return states.back(); }
};

/// x_{n+1} = x_n + drift dt + sqrt(eps mask dt) eta_n. Bit-reproducible for a
/// fixed (seed, dt). Throws DivergenceError carrying the blow-up time.
Trajectory integrate_sde(const SdeProblem &problem, std::uint64_t seed);

struct TrajectorySummary {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    std::vector<double> final_state;
    std::vector<double> quenched;
};

struct EnsembleResult {
    std::size_t n_trajectories = 0;
    std::vector<TrajectorySummary> trajectories;
    std::vector<double> mean;
    std::vector<double> variance;  // sample variance, n - 1 denominator
    std::vector<double> standard_error;
};

/// Runs n trajectories with seeds derive_seed(master_seed, index). The result
/// is bit-identical for any worker count.
EnsembleResult run_ensemble(const SdeProblem &problem, std::size_t n, std::uint64_t master_seed,
                            unsigned workers = 0);

/// Mean, sample variance and standard error accumulated in index order.
struct SampleStats {
    double mean = 0.0;
    double variance = 0.0;
    double standard_error = 0.0;
    std::size_t count = 0;
};

SampleStats sample_stats(std::span<const double> values);

}  // namespace qmssb
