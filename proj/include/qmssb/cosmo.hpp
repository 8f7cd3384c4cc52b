#pragma once

// Inflationary mode functions in conformal time, the leading-order kernels of
// the effective action, the reheating Langevin equation and the resulting
// power spectrum.

#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

namespace qmssb {

struct InflationParams {
    double H = 1.0;  // H = 0 switches the pump term off
    double eta_start = -1000.0;
    double eta_end = -0.05;
};

void validate(const InflationParams &ip);

struct ModeState {
    double k = 1.0;
    double eta = 0.0;
    std::complex<double> v;
    std::complex<double> dv;

    /// v conj(dv) - conj(v) dv; purely imaginary.
    std::complex<double> wronskian() const { return v * std::conj(dv) - std::conj(v) * dv; }
};

/// k^{-1/2} (1 - i / (k eta)) e^{-i k eta}; a plane wave when H = 0.
std::complex<double> analytic_mode(double k, double eta, double H);
std::complex<double> analytic_mode_derivative(double k, double eta, double H);

struct ModeTrajectory {
    std::vector<ModeState> states;
    /// max |W(eta) - W(eta_start)| / |W(eta_start)| over the run.
    double wronskian_drift = 0.0;
};

/// Integrates v'' + (k^2 - 2/eta^2) v = 0 over the window from the analytic
/// state at eta_start with a fourth-order symplectic composition of leapfrog
/// steps, so the Wronskian is conserved up to roundoff. The step is d_eta,
/// reduced to |eta| / 100 where the pump term grows. Every `record_stride`-th
/// state and the final state are kept. Throws StepSizeError when the Wronskian
/// drifts by more than 1e-8 relative.
ModeTrajectory integrate_mode(double k, const InflationParams &ip, double d_eta, std::size_t record_stride = 1);

struct KernelValues {
    double g_ret;
    double g_stat;
};

/// g_ret = (eta'^3 - eta^3) / (3 eta' eta),
/// g_stat = -1/eta'^2 - (eta/eta' + eta'/eta) / 2. Both arguments must be negative.
KernelValues evaluate_kernels(double eta, double eta_prime);

struct ReheatingParams {
    double lambda = 0.1;
    double phi0 = 1.0;
    double delta_t = 1.0;
    std::size_t steps = 1000;
    /// Adds -3 lambda phi0^2 phi.
    bool include_potential = false;
    /// Adds the retarded memory term built from g_ret.
    bool include_memory = false;
    /// Replaces the white-noise density derived from the kernels.
    std::optional<double> noise_density;
};

void validate(const ReheatingParams &rp);

/// Delta t = phi0 / phi0_dot with the kinetic energy of the order parameter
/// balancing lambda phi0^4 / 4, i.e. sqrt(2 / lambda) / phi0.
double energy_balance_delta_t(double lambda, double phi0);

/// Statistical weight of mode k at horizon crossing, (H^2 / (4 k^3)) |g_stat(-1, -1)|.
double statistical_weight(double k, double H);

/// White-noise density lambda^2 phi0^4 S_k Delta t driving phi_k'' = xi_k.
double reheating_noise_density(double k, const ReheatingParams &rp, const InflationParams &ip);

struct LangevinEstimate {
    double mean_square = 0.0;  // ensemble mean of |phi_k|^2 at the end of reheating
    double stderr = 0.0;
    std::size_t n = 0;
    double noise_density = 0.0;
};

/// Runs n trajectories of phi_k'' = xi_k over [0, Delta t] from rest with seeds
/// derive_seed(master_seed, i). The mode must cross the horizon inside the window.
LangevinEstimate reheating_langevin(double k, const ReheatingParams &rp, const InflationParams &ip, std::size_t n,
                                    std::uint64_t master_seed, unsigned workers = 0);

struct SpectrumResult {
    std::vector<double> k;
    std::vector<double> power;
    std::vector<double> stderr;
    double reference = 0.0;  // (H / 2 pi)^2
};

/// P(k) = k^3 / (2 pi^2) <|phi_k|^2>; wavenumber j runs under derive_seed(master_seed, j).
/// The grid must span at least two decades.
SpectrumResult power_spectrum(const std::vector<double> &k_grid, const ReheatingParams &rp, const InflationParams &ip,
                              std::size_t n, std::uint64_t master_seed, unsigned workers = 0);

/// (H / 2 pi)^2.
double standard_spectrum(double H);

}  // namespace qmssb
