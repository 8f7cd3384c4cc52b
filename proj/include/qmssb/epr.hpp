#pragma once

// Two separated apparatuses measuring a spin pair. Each meter sees a quenched
// bias xi_i.B_i drawn once per trial from a Gaussian whose cross covariance is
// the two-spin correlation matrix, plus its own white bath noise.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>

#include "qmssb/measurement.hpp"

namespace qmssb {

struct EprConfig {
    ApparatusParams apparatus1;
    ApparatusParams apparatus2;
    DensityMatrix shared_rho0 = make_singlet();
    /// Require |B1| |B2| = gamma (apparatus 1) within 1e-10.
    bool enforce_field_constraint = false;
    double t_end = 20.0;
    double dt = 0.01;
};

/// Throws DomainError / DimensionError for an invalid configuration.
void validate(const EprConfig &config);

/// Field of strength `strength` at angle `theta` from z in the x-z plane.
Vec3 planar_field(double strength, double theta);

/// 6x6 covariance of (xi1, xi2): symmetrized single-spin blocks on the
/// diagonal, spin_correlation_matrix(rho) off the diagonal.
Eigen::MatrixXd epr_noise_covariance(const DensityMatrix &rho);

/// Throws CovarianceError when the covariance is not PSD within tolerance.
std::pair<Vec3, Vec3> sample_epr_noise(const DensityMatrix &rho, std::uint64_t seed);

struct PairOutcome {
    Readout readout1 = Readout::undecided;
    Readout readout2 = Readout::undecided;
    Vec3 xi1 = Vec3::Zero();
    Vec3 xi2 = Vec3::Zero();
    double final_phi1 = 0.0;
    double final_phi2 = 0.0;
    std::uint64_t seed = 0;

    bool decided() const { return readout1 != Readout::undecided && readout2 != Readout::undecided; }
};

/// The quenched pair is drawn from `seed`; the two bath noises use
/// derive_seed(seed, 1) and derive_seed(seed, 2).
PairOutcome run_epr_trial(const EprConfig &config, std::uint64_t seed);

struct CorrelationEstimate {
    double value = 0.0;
    double stderr = 0.0;
    std::size_t n = 0;
    std::size_t n_decided = 0;
    std::size_t n_undecided = 0;
    std::size_t n_pp = 0, n_pm = 0, n_mp = 0, n_mm = 0;
    /// Set when more than 10% of the trials were undecided.
    std::optional<std::string> warning;
};

/// Mean readout product over decided trials; trial i uses derive_seed(master_seed, i).
CorrelationEstimate estimate_correlation(const EprConfig &config, std::size_t n, std::uint64_t master_seed,
                                         unsigned workers = 0);

/// Same as estimate_correlation but also returns every trial.
std::pair<CorrelationEstimate, std::vector<PairOutcome>> run_epr_ensemble(const EprConfig &config, std::size_t n,
                                                                          std::uint64_t master_seed,
                                                                          unsigned workers = 0);

/// <erf(a1 + k1 xi1.B1^) erf(a2 + k2 xi2.B2^)> over the quenched Gaussian, with
/// k_i = |B_i| / (gamma_i sqrt(2 eps_eff_i)) and a_i the spin-feedback bias of the
/// reduced initial state on the same scale. Reduced to a one-dimensional
/// integral and evaluated by adaptive Gauss-Kronrod quadrature.
double correlation_quadrature_oracle(const EprConfig &config);

/// -(2/pi) asin(2 k1 k2 cos(theta) / sqrt((1 + 2 k1^2)(1 + 2 k2^2))), the
/// unbiased singlet value of the oracle in closed form.
double singlet_erf_correlation(double kappa1, double kappa2, double theta);

/// k for one apparatus.
double erf_scale(const ApparatusParams &p);

/// Measurement settings of the CHSH experiment in radians (x-z plane).
struct ChshAngles {
    double a;
    double a_prime;
    double b;
    double b_prime;
};

/// a = 90 deg, a' = 0 deg, b = 45 deg, b' = 135 deg.
ChshAngles standard_chsh_angles();

/// Configs in the order (a,b), (a',b), (a,b'), (a',b') built from `base`, keeping
/// each field strength.
std::array<EprConfig, 4> chsh_configs(const EprConfig &base, const ChshAngles &angles);

/// C(a,b) + C(a',b) + C(a,b') - C(a',b').
double chsh_combination(const std::array<double, 4> &c);

/// The combination under C = -cos(theta_12).
double chsh_idealized(const ChshAngles &angles);

struct ChshResult {
    std::array<CorrelationEstimate, 4> correlations;
    std::array<std::string, 4> labels;
    double statistic = 0.0;
    double stderr = 0.0;
    /// |statistic| - 3 stderr > 2.
    bool violation = false;
    std::vector<std::string> warnings;
};

/// Config j runs under derive_seed(master_seed, j).
ChshResult chsh_statistic(const std::array<EprConfig, 4> &configs, std::size_t n, std::uint64_t master_seed,
                          unsigned workers = 0);

double chsh_oracle(const std::array<EprConfig, 4> &configs);

}  // namespace qmssb
