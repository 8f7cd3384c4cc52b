#include "qmssb/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmssb/error.hpp"
#include "qmssb/kernels.hpp"
#include "qmssb/meter_batch.hpp"
#include "qmssb/parallel.hpp"
#include "qmssb/rng.hpp"

namespace qmssb {

namespace {

constexpr std::size_t kChunk = 64;
constexpr std::size_t kTrialsPerBlock = 256;

// Relaxation coefficients of the frozen two-level generator over one step.
struct SpinStep {
    double pol_eq;
    double pop_decay;
    double coh_decay;
};

SpinStep spin_step(double phi, double dt, const ApparatusParams &p) {
    const BathRates r = bath_rates(phi, p);
    const double total = r.down + r.up;
    SpinStep s;
    s.pol_eq = total > 0.0 ? (r.up - r.down) / total : 0.0;
    s.pop_decay = std::exp(-2.0 * total * dt);
    s.coh_decay = std::exp(-(total + 4.0 * r.dephasing) * dt);
    return s;
}

std::size_t steps_for(double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end > 0.0)) {
        throw DomainError("measurement: t_end and dt must be positive");
    }
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

}  // namespace

void validate(const ApparatusParams &p) {
    std::ostringstream bad;
    if (!(p.gamma > 0.0)) bad << " gamma>0";
    if (!(p.lambda > 0.0)) bad << " lambda>0";
    if (!(p.mu >= 0.0)) bad << " mu>=0";
    if (!(p.epsilon >= 0.0)) bad << " epsilon>=0";
    if (!(p.kT > 0.0)) bad << " kT>0";
    if (!(p.b0 >= 0.0)) bad << " b0>=0";
    if (!(p.c0 >= 0.0)) bad << " c0>=0";
    if (!(p.g > 0.0)) bad << " g>0";
    if (!p.field.allFinite()) bad << " field finite";
    if (p.eps_eff && !(*p.eps_eff > 0.0)) bad << " eps_eff>0";
    if (!bad.str().empty()) {
        throw DomainError("ApparatusParams violates:" + bad.str());
    }
}

double drift_phi(double phi, double spin_exp_along_b, const ApparatusParams &p) {
    return p.gamma * phi - (p.lambda / 6.0) * (phi * phi * phi) + p.mu * spin_exp_along_b * p.field_strength();
}

std::pair<double, double> fixed_points(const ApparatusParams &p) {
    if (!(p.gamma > 0.0) || !(p.lambda > 0.0)) {
        throw DomainError("fixed_points: gamma and lambda must be positive");
    }
    const double root = std::sqrt(6.0 * p.gamma / p.lambda);
    return {root, -root};
}

BathRates bath_rates(double phi, const ApparatusParams &p) {
    const double x = p.mu * phi * p.field_strength() / p.kT;
    const double suppressed = p.b0 * std::exp(-std::abs(x));
    BathRates r;
    if (x >= 0.0) {
        r.down = suppressed;
        r.up = p.b0;
    } else {
        r.down = p.b0;
        r.up = suppressed;
    }
    r.dephasing = p.c0;
    return r;
}

DensityMatrix evolve_density_matrix(const DensityMatrix &rho, double phi, double dt, const ApparatusParams &p) {
    if (rho.dim() != 2) {
        throw DimensionError("evolve_density_matrix: expected a single spin");
    }
    if (!(dt >= 0.0)) {
        throw DomainError("evolve_density_matrix: dt must be >= 0");
    }
    const double s = (rho(0, 0) - rho(1, 1)).real();
    const Complex c = rho(0, 1);
    const SpinStep k = spin_step(phi, dt, p);
    const double s_next = k.pol_eq + (s - k.pol_eq) * k.pop_decay;
    const Complex c_next = c * std::polar(k.coh_decay, -2.0 * p.omega * dt);

    CMatrix m(2, 2);
    m << 0.5 * (1.0 + s_next), c_next, std::conj(c_next), 0.5 * (1.0 - s_next);
    const double lo = min_eigenvalue(m);
    if (lo < -1e-8) {
        std::ostringstream msg;
        msg << "evolve_density_matrix: positivity lost (min eigenvalue " << lo << ")";
        throw StepSizeError(msg.str());
    }
    return DensityMatrix::unchecked(std::move(m));
}

namespace detail {

std::pair<double, Complex> to_apparatus_frame(const DensityMatrix &rho, const Vec3 &field) {
    if (rho.dim() != 2) {
        throw DimensionError("to_apparatus_frame: expected a single spin");
    }
    const Eigen::Matrix2cd u = rotation_to_z(field);
    const Eigen::Matrix2cd r = u * rho.matrix() * u.adjoint();
    return {(r(0, 0) - r(1, 1)).real(), r(0, 1)};
}

DensityMatrix from_apparatus_frame(double polarization, Complex coherence, const Vec3 &field) {
    Eigen::Matrix2cd r;
    r << 0.5 * (1.0 + polarization), coherence, std::conj(coherence), 0.5 * (1.0 - polarization);
    const Eigen::Matrix2cd u = rotation_to_z(field);
    CMatrix lab = u.adjoint() * r * u;
    return DensityMatrix::unchecked(std::move(lab));
}

std::vector<MeterLaneResult> simulate_meters(const ApparatusParams &p, double t_end, double dt,
                                             std::span<const MeterLaneInit> lanes, bool mirror_noise) {
    validate(p);
    const std::size_t steps = steps_for(t_end, dt);
    const double phi_plus = fixed_points(p).first;
    const double threshold = 0.5 * phi_plus;
    const double bound = 1e6 * std::max(phi_plus, 1.0);
    const double sigma = std::sqrt(p.epsilon * dt);
    const double sign = mirror_noise ? -1.0 : 1.0;

    kernels::MeterCoefficients coeff{};
    coeff.gamma = p.gamma;
    coeff.cubic = p.lambda / 6.0;
    coeff.coupling = p.mu * p.field_strength();
    coeff.dt = dt;
    coeff.rot_cos = std::cos(2.0 * p.omega * dt);
    coeff.rot_sin = std::sin(2.0 * p.omega * dt);

    std::vector<MeterLaneResult> results(lanes.size());

    for (std::size_t base = 0; base < lanes.size(); base += kChunk) {
        const std::size_t width = std::min(kChunk, lanes.size() - base);
        std::vector<double> phi(width, 0.0), pol(width), re(width), im(width), bias(width);
        std::vector<double> noise(width), pol_eq(width), pop_decay(width), coh_decay(width);
        std::vector<NormalStream> normals;
        normals.reserve(width);
        std::vector<int> last_sign(width, 0);
        std::vector<double> candidate(width, std::numeric_limits<double>::quiet_NaN());
        for (std::size_t j = 0; j < width; ++j) {
            const MeterLaneInit &init = lanes[base + j];
            normals.emplace_back(init.noise_seed);
            pol[j] = init.polarization;
            re[j] = init.coherence.real();
            im[j] = init.coherence.imag();
            bias[j] = init.static_bias;
        }

        kernels::MeterLanes view{phi.data(),    pol.data(),    re.data(),        im.data(),        bias.data(),
                                 noise.data(),  pol_eq.data(), pop_decay.data(), coh_decay.data(), width};

        for (std::size_t n = 0; n < steps; ++n) {
            for (std::size_t j = 0; j < width; ++j) {
                noise[j] = sign * (sigma * normals[j]());
                const SpinStep k = spin_step(phi[j], dt, p);
                pol_eq[j] = k.pol_eq;
                pop_decay[j] = k.pop_decay;
                coh_decay[j] = k.coh_decay;
            }
            kernels::meter_step(coeff, view);

            const double t = static_cast<double>(n + 1) * dt;
            for (std::size_t j = 0; j < width; ++j) {
                const double x = phi[j];
                if (!std::isfinite(x) || std::abs(x) > bound) {
                    std::ostringstream msg;
                    msg << "meter diverged at t = " << t << "; reduce dt";
                    throw DivergenceError(msg.str(), t);
                }
                const int s = x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
                if (s != 0 && s != last_sign[j]) {
                    last_sign[j] = s;
                    candidate[j] = std::numeric_limits<double>::quiet_NaN();
                }
                if (std::isnan(candidate[j]) && std::abs(x) >= threshold) {
                    candidate[j] = t;
                }
            }
        }

        for (std::size_t j = 0; j < width; ++j) {
            MeterLaneResult &r = results[base + j];
            r.final_phi = phi[j];
            r.polarization = pol[j];
            r.coherence = Complex(re[j], im[j]);
            if (std::abs(phi[j]) >= threshold) {
                r.readout = phi[j] > 0.0 ? Readout::plus : Readout::minus;
                r.decision_time = candidate[j];
            } else {
                r.readout = Readout::undecided;
                r.decision_time = std::numeric_limits<double>::quiet_NaN();
            }
        }
    }
    return results;
}

}  // namespace detail

MeasurementOutcome run_measurement(const DensityMatrix &rho0, const ApparatusParams &p, double t_end, double dt,
                                   std::uint64_t seed, const RunOptions &options) {
    auto [pol, coh] = detail::to_apparatus_frame(rho0, p.field);
    detail::MeterLaneInit init{seed, pol, coh, options.static_bias};
    auto res = detail::simulate_meters(p, t_end, dt, std::span(&init, 1), options.mirror_noise);
    const detail::MeterLaneResult &r = res.front();
    MeasurementOutcome out;
    out.readout = r.readout;
    out.final_phi = r.final_phi;
    out.final_rho = detail::from_apparatus_frame(r.polarization, r.coherence, p.field);
    out.decision_time = r.decision_time;
    out.seed = seed;
    return out;
}

MeasurementEnsemble run_measurement_ensemble(const DensityMatrix &rho0, const ApparatusParams &p, double t_end,
                                             double dt, std::size_t n, std::uint64_t master_seed, unsigned workers,
                                             const RunOptions &options) {
    if (n == 0) {
        throw DomainError("run_measurement_ensemble: n must be >= 1");
    }
    validate(p);
    auto [pol, coh] = detail::to_apparatus_frame(rho0, p.field);

    MeasurementEnsemble out;
    out.n = n;
    out.records.resize(n);
    const std::size_t blocks = (n + kTrialsPerBlock - 1) / kTrialsPerBlock;
    parallel_for(blocks, workers, [&](std::size_t b) {
        const std::size_t begin = b * kTrialsPerBlock;
        const std::size_t end = std::min(n, begin + kTrialsPerBlock);
        std::vector<detail::MeterLaneInit> inits;
        inits.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i) {
            inits.push_back({derive_seed(master_seed, i), pol, coh, options.static_bias});
        }
        auto res = detail::simulate_meters(p, t_end, dt, inits, options.mirror_noise);
        for (std::size_t i = begin; i < end; ++i) {
            const auto &r = res[i - begin];
            out.records[i] = {i, inits[i - begin].noise_seed, r.readout, r.final_phi, r.decision_time, r.polarization};
        }
    });

    std::vector<double> times;
    for (const auto &r : out.records) {
        switch (r.readout) {
            case Readout::plus:
                ++out.n_plus;
                times.push_back(r.decision_time);
                break;
            case Readout::minus:
                ++out.n_minus;
                times.push_back(r.decision_time);
                break;
            case Readout::undecided:
                ++out.n_undecided;
                break;
        }
    }
    const std::size_t decided = out.n_plus + out.n_minus;
    if (decided > 0) {
        out.p_plus = static_cast<double>(out.n_plus) / static_cast<double>(decided);
        out.p_plus_stderr = std::sqrt(out.p_plus * (1.0 - out.p_plus) / static_cast<double>(decided));
        std::sort(times.begin(), times.end());
        const std::size_t m = times.size();
        out.median_decision_time = m % 2 == 1 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
    }
    return out;
}

MeasurementTime measurement_time(const ApparatusParams &p, double delta) {
    if (!(p.gamma > 0.0) || !(p.g > 0.0)) {
        throw DomainError("measurement_time: gamma and g must be positive");
    }
    const double arg = (p.g / p.gamma) * (delta * delta + p.epsilon / p.gamma);
    if (!(arg > 0.0)) {
        throw DomainError("measurement_time: log argument must be positive");
    }
    return {-std::log(arg) / (2.0 * p.gamma), arg >= 1.0};
}

double p_plus_erf(double delta, double eps_eff) {
    if (!(eps_eff > 0.0)) {
        throw DomainError("p_plus_erf: eps_eff must be positive");
    }
    return 0.5 * (1.0 + std::erf(delta / std::sqrt(2.0 * eps_eff)));
}

}  // namespace qmssb
