#include "qmssb/cosmo.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qmssb/error.hpp"
#include "qmssb/rng.hpp"
#include "qmssb/stochastic.hpp"

namespace qmssb {

namespace {

using cplx = std::complex<double>;

constexpr double kPumpResolution = 0.01;

void require_negative(double eta, const char *what) {
    if (!(eta < 0.0) || !std::isfinite(eta)) {
        std::ostringstream msg;
        msg << what << ": conformal time must be negative, got " << eta;
        throw DomainError(msg.str());
    }
}

}  // namespace

void validate(const InflationParams &ip) {
    if (!(ip.H >= 0.0) || !std::isfinite(ip.H)) {
        throw DomainError("InflationParams: H must be >= 0");
    }
    if (!(ip.eta_start < ip.eta_end) || !(ip.eta_end < 0.0)) {
        throw DomainError("InflationParams: need eta_start < eta_end < 0");
    }
}

cplx analytic_mode(double k, double eta, double H) {
    if (!(k > 0.0)) {
        throw DomainError("analytic_mode: k must be positive");
    }
    require_negative(eta, "analytic_mode");
    const cplx phase = std::polar(1.0 / std::sqrt(k), -k * eta);
    if (H == 0.0) {
        return phase;
    }
    return phase * cplx(1.0, -1.0 / (k * eta));
}

cplx analytic_mode_derivative(double k, double eta, double H) {
    if (!(k > 0.0)) {
        throw DomainError("analytic_mode_derivative: k must be positive");
    }
    require_negative(eta, "analytic_mode_derivative");
    const cplx phase = std::polar(1.0 / std::sqrt(k), -k * eta);
    if (H == 0.0) {
        return cplx(0.0, -k) * phase;
    }
    return phase * cplx(-1.0 / eta, 1.0 / (k * eta * eta) - k);
}

ModeTrajectory integrate_mode(double k, const InflationParams &ip, double d_eta, std::size_t record_stride) {
    validate(ip);
    if (!(k > 0.0)) {
        throw DomainError("integrate_mode: k must be positive");
    }
    if (!(d_eta > 0.0) || record_stride == 0) {
        throw DomainError("integrate_mode: d_eta must be positive and record_stride >= 1");
    }
    const bool pump = ip.H != 0.0;
    auto omega2 = [&](double eta) { return pump ? k * k - 2.0 / (eta * eta) : k * k; };

    const double cbrt2 = std::cbrt(2.0);
    const double w1 = 1.0 / (2.0 - cbrt2);
    const double w0 = -cbrt2 / (2.0 - cbrt2);

    ModeState s{k, ip.eta_start, analytic_mode(k, ip.eta_start, ip.H), analytic_mode_derivative(k, ip.eta_start, ip.H)};
    const cplx w_start = s.wronskian();
    ModeTrajectory out;
    out.states.push_back(s);

    // The pump term varies on the scale |eta|, so steps shrink toward eta = 0.
    std::size_t n = 0;
    while (s.eta < ip.eta_end) {
        const double limit = pump ? std::min(d_eta, kPumpResolution * std::abs(s.eta)) : d_eta;
        const bool last = s.eta + limit >= ip.eta_end;
        const double h = last ? ip.eta_end - s.eta : limit;
        double eta = s.eta;
        for (double tau : {w1 * h, w0 * h, w1 * h}) {
            s.dv -= 0.5 * tau * omega2(eta) * s.v;
            s.v += tau * s.dv;
            eta += tau;
            s.dv -= 0.5 * tau * omega2(eta) * s.v;
        }
        s.eta = last ? ip.eta_end : s.eta + h;
        ++n;
        const double drift = std::abs(s.wronskian() - w_start) / std::abs(w_start);
        if (!(drift <= out.wronskian_drift)) {
            out.wronskian_drift = std::isfinite(drift) ? drift : std::numeric_limits<double>::infinity();
        }
        if (n % record_stride == 0 || last) {
            out.states.push_back(s);
        }
    }
    if (out.wronskian_drift > 1e-8) {
        std::ostringstream msg;
        msg << "integrate_mode: Wronskian drift " << out.wronskian_drift << " exceeds 1e-8; reduce d_eta";
        throw StepSizeError(msg.str());
    }
    return out;
}

KernelValues evaluate_kernels(double eta, double eta_prime) {
    require_negative(eta, "evaluate_kernels");
    require_negative(eta_prime, "evaluate_kernels");
    const double g_ret = (eta_prime * eta_prime * eta_prime - eta * eta * eta) / (3.0 * eta_prime * eta);
    const double g_stat = -1.0 / (eta_prime * eta_prime) - 0.5 * (eta / eta_prime + eta_prime / eta);
    return {g_ret, g_stat};
}

void validate(const ReheatingParams &rp) {
    if (!(rp.lambda >= 0.0) || !std::isfinite(rp.phi0)) {
        throw DomainError("ReheatingParams: lambda must be >= 0 and phi0 finite");
    }
    if (!(rp.delta_t > 0.0) || rp.steps == 0) {
        throw DomainError("ReheatingParams: delta_t must be positive and steps >= 1");
    }
    if (rp.noise_density && !(*rp.noise_density >= 0.0)) {
        throw DomainError("ReheatingParams: noise_density must be >= 0");
    }
}

double energy_balance_delta_t(double lambda, double phi0) {
    if (!(lambda > 0.0) || !(phi0 != 0.0)) {
        throw DomainError("energy_balance_delta_t: lambda and phi0 must be nonzero");
    }
    return std::sqrt(2.0 / lambda) / std::abs(phi0);
}

double statistical_weight(double k, double H) {
    if (!(k > 0.0)) {
        throw DomainError("statistical_weight: k must be positive");
    }
    return H * H / (4.0 * k * k * k) * std::abs(evaluate_kernels(-1.0, -1.0).g_stat);
}

double reheating_noise_density(double k, const ReheatingParams &rp, const InflationParams &ip) {
    validate(rp);
    if (rp.noise_density) {
        return *rp.noise_density;
    }
    const double p2 = rp.phi0 * rp.phi0;
    return rp.lambda * rp.lambda * p2 * p2 * statistical_weight(k, ip.H) * rp.delta_t;
}

LangevinEstimate reheating_langevin(double k, const ReheatingParams &rp, const InflationParams &ip, std::size_t n,
                                    std::uint64_t master_seed, unsigned workers) {
    validate(ip);
    validate(rp);
    if (!(k > 0.0)) {
        throw DomainError("reheating_langevin: k must be positive");
    }
    const double crossing = -1.0 / k;
    if (crossing < ip.eta_start || crossing > ip.eta_end) {
        std::ostringstream msg;
        msg << "reheating_langevin: horizon crossing eta = " << crossing << " lies outside the window";
        throw DomainError(msg.str());
    }
    const double q = reheating_noise_density(k, rp, ip);

    // State (phi, pi, m1, m2); m1, m2 carry the two separable parts of the
    // retarded convolution with g_ret in horizon units, eta(t) = -exp(-H t).
    const double mass2 = rp.include_potential ? 3.0 * rp.lambda * rp.phi0 * rp.phi0 : 0.0;
    const double p2 = rp.phi0 * rp.phi0;
    const double memory = rp.include_memory ? rp.lambda * rp.lambda * p2 * p2 * ip.H * ip.H : 0.0;
    const double H = ip.H;

    SdeProblem problem;
    problem.state_dimension = 4;
    problem.initial_state = {0.0, 0.0, 0.0, 0.0};
    problem.t_start = 0.0;
    problem.t_end = rp.delta_t;
    problem.dt = rp.delta_t / static_cast<double>(rp.steps);
    problem.noise.white_amplitude = q;
    problem.noise.white_mask = {0.0, 1.0, 0.0, 0.0};
    problem.drift = [=](double t, std::span<const double> x, std::span<const double>, std::span<double> f) {
        const double eta = -std::exp(-H * t);
        f[0] = x[1];
        double force = -mass2 * x[0];
        if (memory != 0.0) {
            force -= memory * (x[2] / eta - eta * eta * x[3]) / 3.0;
        }
        f[1] = force;
        f[2] = eta * eta * x[0];
        f[3] = x[0] / eta;
    };

    const EnsembleResult ens = run_ensemble(problem, n, master_seed, workers);
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double phi = ens.trajectories[i].final_state[0];
        sq[i] = phi * phi;
    }
    const SampleStats s = sample_stats(sq);
    return {s.mean, s.standard_error, n, q};
}

SpectrumResult power_spectrum(const std::vector<double> &k_grid, const ReheatingParams &rp, const InflationParams &ip,
                              std::size_t n, std::uint64_t master_seed, unsigned workers) {
    if (k_grid.size() < 2) {
        throw DomainError("power_spectrum: need at least two wavenumbers");
    }
    const auto [lo, hi] = std::minmax_element(k_grid.begin(), k_grid.end());
    if (!(*lo > 0.0) || *hi / *lo < 100.0 * (1.0 - 1e-12)) {
        throw DomainError("power_spectrum: k grid must be positive and span two decades");
    }
    SpectrumResult out;
    out.reference = standard_spectrum(ip.H);
    for (std::size_t j = 0; j < k_grid.size(); ++j) {
        const double k = k_grid[j];
        const LangevinEstimate e = reheating_langevin(k, rp, ip, n, derive_seed(master_seed, j), workers);
        const double factor = k * k * k / (2.0 * std::numbers::pi * std::numbers::pi);
        out.k.push_back(k);
        out.power.push_back(factor * e.mean_square);
        out.stderr.push_back(factor * e.stderr);
    }
    return out;
}

double standard_spectrum(double H) {
    if (!(H > 0.0)) {
        throw DomainError("standard_spectrum: H must be positive");
    }
    const double x = H / (2.0 * std::numbers::pi);
    return x * x;
}

}  // namespace qmssb
