#pragma once

// Single-apparatus measurement as spontaneous symmetry breaking: an overdamped
// double-well meter phi coupled to a spin-1/2 density matrix. Natural units
// hbar = k_B = 1.

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "qmssb/quantum.hpp"

namespace qmssb {

struct ApparatusParams {
    double gamma = 1.0;   // linear instability rate (> 0)
    double lambda = 6.0;  // quartic coupling (> 0)
    double mu = 1.0;      // spin-meter coupling (>= 0)
    double epsilon = 0.01;  // bath white-noise amplitude (>= 0)
    Vec3 field{0.0, 0.0, 1.0};
    double omega = 0.0;  // Larmor frequency
    double kT = 0.1;     // bath temperature (> 0)
    double b0 = 1.0;     // bare transition rate (>= 0)
    double c0 = 0.0;     // dephasing rate (>= 0)
    double g = 1.0;      // prefactor of the measurement-time estimate (> 0)
    /// Variance used inside the erf readout formula; default epsilon / (2 gamma).
    std::optional<double> eps_eff;

    double field_strength() const { return field.norm(); }
    double effective_variance() const { return eps_eff ? *eps_eff : epsilon / (2.0 * gamma); }
};

/// Throws DomainError when a sign constraint is broken.
void validate(const ApparatusParams &p);

/// gamma phi - (lambda/6) phi^3 + mu s |B|, with s the spin expectation along B.
double drift_phi(double phi, double spin_exp_along_b, const ApparatusParams &p);

/// (+sqrt(6 gamma / lambda), -sqrt(6 gamma / lambda)).
std::pair<double, double> fixed_points(const ApparatusParams &p);

/// Bath rates for the meter value phi. `down` drives |u> -> |d>, `up` drives
/// |d> -> |u>; down / up = exp(-mu phi |B| / kT) and the larger of the two
/// equals b0.
struct BathRates {
    double down;
    double up;
    double dephasing;
};

BathRates bath_rates(double phi, const ApparatusParams &p);

/// One step of the spin master equation with phi frozen over the step. rho is
/// expressed in the apparatus frame (S3 along B). The step is the exact
/// propagator of the frozen generator, so trace and Hermiticity are preserved
/// and positivity is checked to 1e-8.
DensityMatrix evolve_density_matrix(const DensityMatrix &rho, double phi, double dt, const ApparatusParams &p);

enum class Readout : int { minus = -1, undecided = 0, plus = 1 };

struct MeasurementOutcome {
    Readout readout = Readout::undecided;
    double final_phi = 0.0;
    DensityMatrix final_rho = maximally_mixed(2);
    /// First time |phi| >= phi_+/2 after the last sign change; NaN if undecided.
    double decision_time = std::numeric_limits<double>::quiet_NaN();
    std::uint64_t seed = 0;
};

struct RunOptions {
    /// Negates every white-noise increment (paired mirror runs).
    bool mirror_noise = false;
    /// Constant extra drift on the meter (quenched bias).
    double static_bias = 0.0;
};

/// Couples the meter SDE and the spin master equation from phi(0) = 0.
MeasurementOutcome run_measurement(const DensityMatrix &rho0, const ApparatusParams &p, double t_end, double dt,
                                   std::uint64_t seed, const RunOptions &options = {});

struct MeasurementRecord {
    std::size_t index = 0;
    std::uint64_t seed = 0;
    Readout readout = Readout::undecided;
    double final_phi = 0.0;
    double decision_time = std::numeric_limits<double>::quiet_NaN();
    double final_polarization = 0.0;  // spin expectation along B at the end
};

struct MeasurementEnsemble {
    std::size_t n = 0;
    std::size_t n_plus = 0;
    std::size_t n_minus = 0;
    std::size_t n_undecided = 0;
    double p_plus = 0.0;  // over decided trials
    double p_plus_stderr = 0.0;
    double median_decision_time = std::numeric_limits<double>::quiet_NaN();
    std::vector<MeasurementRecord> records;
};

/// n independent measurements with seeds derive_seed(master_seed, i).
/// Bit-identical for any worker count or SIMD backend.
MeasurementEnsemble run_measurement_ensemble(const DensityMatrix &rho0, const ApparatusParams &p, double t_end,
                                             double dt, std::size_t n, std::uint64_t master_seed,
                                             unsigned workers = 0, const RunOptions &options = {});

struct MeasurementTime {
    double value;
    bool instantaneous;  // log argument >= 1, the estimate is <= 0
};

/// (2 gamma)^-1 ln[(g / gamma)(delta^2 + epsilon / gamma)]^-1 with
/// delta = (mu / gamma) <S>.B. Throws DomainError if the argument is <= 0.
MeasurementTime measurement_time(const ApparatusParams &p, double delta);

/// (1 + erf(delta / sqrt(2 eps_eff))) / 2.
double p_plus_erf(double delta, double eps_eff);

}  // namespace qmssb
