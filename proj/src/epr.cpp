#include "qmssb/epr.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "qmssb/error.hpp"
#include "qmssb/meter_batch.hpp"
#include "qmssb/parallel.hpp"
#include "qmssb/rng.hpp"
#include "qmssb/stochastic.hpp"

namespace qmssb {

namespace {

constexpr std::size_t kTrialsPerBlock = 256;

Vec3 unit(const Vec3 &v) {
    const double n = v.norm();
    if (!(n > 0.0)) {
        throw DomainError("EPR: field must be nonzero");
    }
    return v / n;
}

struct Side {
    double polarization;
    Complex coherence;
};

std::pair<Side, Side> reduced_sides(const EprConfig &c) {
    auto [s1, c1] = detail::to_apparatus_frame(partial_trace(c.shared_rho0, 0), c.apparatus1.field);
    auto [s2, c2] = detail::to_apparatus_frame(partial_trace(c.shared_rho0, 1), c.apparatus2.field);
    return {{s1, c1}, {s2, c2}};
}

int sign_of(Readout r) { return static_cast<int>(r); }

}  // namespace

void validate(const EprConfig &c) {
    validate(c.apparatus1);
    validate(c.apparatus2);
    if (c.shared_rho0.dim() != 4) {
        throw DimensionError("EprConfig: shared_rho0 must be a two-spin state");
    }
    if (!(c.t_end > 0.0) || !(c.dt > 0.0)) {
        throw DomainError("EprConfig: t_end and dt must be positive");
    }
    unit(c.apparatus1.field);
    unit(c.apparatus2.field);
    if (c.enforce_field_constraint) {
        const double prod = c.apparatus1.field_strength() * c.apparatus2.field_strength();
        if (std::abs(prod - c.apparatus1.gamma) > 1e-10) {
            std::ostringstream msg;
            msg << "EprConfig: |B1||B2| = " << prod << " but gamma = " << c.apparatus1.gamma;
            throw DomainError(msg.str());
        }
    }
}

Vec3 planar_field(double strength, double theta) {
    return Vec3(strength * std::sin(theta), 0.0, strength * std::cos(theta));
}

Eigen::MatrixXd epr_noise_covariance(const DensityMatrix &rho) {
    if (rho.dim() != 4) {
        throw DimensionError("epr_noise_covariance: expected a two-spin state");
    }
    const SpinObservables &s = pauli();
    const CMatrix id = CMatrix::Identity(2, 2);
    auto kron = [](const CMatrix &a, const CMatrix &b) {
        CMatrix out(4, 4);
        for (int i = 0; i < 2; ++i) {
            for (int j = 0; j < 2; ++j) {
                out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
            }
        }
        return out;
    };
    Eigen::MatrixXd cov(6, 6);
    const Mat3 k = spin_correlation_matrix(rho);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const CMatrix sym = 0.5 * (s.components[i] * s.components[j] + s.components[j] * s.components[i]);
            cov(i, j) = (rho.matrix() * kron(sym, id)).trace().real();
            cov(3 + i, 3 + j) = (rho.matrix() * kron(id, sym)).trace().real();
            cov(i, 3 + j) = k(i, j);
            cov(3 + j, i) = k(i, j);
        }
    }
    return cov;
}

std::pair<Vec3, Vec3> sample_epr_noise(const DensityMatrix &rho, std::uint64_t seed) {
    const Eigen::VectorXd x = sample_static_noise(epr_noise_covariance(rho), seed);
    return {x.head<3>(), x.tail<3>()};
}

namespace {

// Trials [begin, end) with explicit seeds; xi drawn per trial, meters batched per side.
std::vector<PairOutcome> run_trials(const EprConfig &c, const PsdFactor &factor, std::span<const std::uint64_t> seeds) {
    const auto [side1, side2] = reduced_sides(c);
    const Vec3 b1 = c.apparatus1.field;
    const Vec3 b2 = c.apparatus2.field;
    std::vector<PairOutcome> out(seeds.size());
    std::vector<detail::MeterLaneInit> lanes1(seeds.size()), lanes2(seeds.size());
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        NormalStream normals(seeds[i]);
        const Eigen::VectorXd xi = sample_gaussian(factor, normals);
        out[i].seed = seeds[i];
        out[i].xi1 = xi.head<3>();
        out[i].xi2 = xi.tail<3>();
        lanes1[i] = {derive_seed(seeds[i], 1), side1.polarization, side1.coherence, out[i].xi1.dot(b1)};
        lanes2[i] = {derive_seed(seeds[i], 2), side2.polarization, side2.coherence, out[i].xi2.dot(b2)};
    }
    const auto r1 = detail::simulate_meters(c.apparatus1, c.t_end, c.dt, lanes1, false);
    const auto r2 = detail::simulate_meters(c.apparatus2, c.t_end, c.dt, lanes2, false);
    for (std::size_t i = 0; i < seeds.size(); ++i) {
        out[i].readout1 = r1[i].readout;
        out[i].readout2 = r2[i].readout;
        out[i].final_phi1 = r1[i].final_phi;
        out[i].final_phi2 = r2[i].final_phi;
    }
    return out;
}

}  // namespace

PairOutcome run_epr_trial(const EprConfig &config, std::uint64_t seed) {
    validate(config);
    const PsdFactor factor = factor_psd(epr_noise_covariance(config.shared_rho0));
    return run_trials(config, factor, std::span(&seed, 1)).front();
}

std::pair<CorrelationEstimate, std::vector<PairOutcome>> run_epr_ensemble(const EprConfig &config, std::size_t n,
                                                                          std::uint64_t master_seed,
                                                                          unsigned workers) {
    if (n == 0) {
        throw DomainError("estimate_correlation: n must be >= 1");
    }
    validate(config);
    const PsdFactor factor = factor_psd(epr_noise_covariance(config.shared_rho0));
    std::vector<PairOutcome> trials(n);
    const std::size_t blocks = (n + kTrialsPerBlock - 1) / kTrialsPerBlock;
    parallel_for(blocks, workers, [&](std::size_t b) {
        const std::size_t begin = b * kTrialsPerBlock;
        const std::size_t end = std::min(n, begin + kTrialsPerBlock);
        std::vector<std::uint64_t> seeds;
        for (std::size_t i = begin; i < end; ++i) {
            seeds.push_back(derive_seed(master_seed, i));
        }
        auto res = run_trials(config, factor, seeds);
        std::move(res.begin(), res.end(), trials.begin() + static_cast<std::ptrdiff_t>(begin));
    });

    CorrelationEstimate est;
    est.n = n;
    std::vector<double> products;
    products.reserve(n);
    for (const PairOutcome &t : trials) {
        if (!t.decided()) {
            ++est.n_undecided;
            continue;
        }
        const int s1 = sign_of(t.readout1);
        const int s2 = sign_of(t.readout2);
        if (s1 > 0 && s2 > 0) ++est.n_pp;
        if (s1 > 0 && s2 < 0) ++est.n_pm;
        if (s1 < 0 && s2 > 0) ++est.n_mp;
        if (s1 < 0 && s2 < 0) ++est.n_mm;
        products.push_back(static_cast<double>(s1 * s2));
    }
    est.n_decided = products.size();
    if (!products.empty()) {
        const SampleStats s = sample_stats(products);
        est.value = s.mean;
        est.stderr = s.standard_error;
    } else {
        est.value = std::numeric_limits<double>::quiet_NaN();
        est.stderr = std::numeric_limits<double>::quiet_NaN();
    }
    if (10 * est.n_undecided > n) {
        std::ostringstream msg;
        msg << est.n_undecided << " of " << n << " trials undecided";
        est.warning = msg.str();
    }
    return {est, std::move(trials)};
}

CorrelationEstimate estimate_correlation(const EprConfig &config, std::size_t n, std::uint64_t master_seed,
                                         unsigned workers) {
    return run_epr_ensemble(config, n, master_seed, workers).first;
}

double erf_scale(const ApparatusParams &p) {
    return p.field_strength() / (p.gamma * std::sqrt(2.0 * p.effective_variance()));
}

double correlation_quadrature_oracle(const EprConfig &config) {
    validate(config);
    const Eigen::MatrixXd cov = epr_noise_covariance(config.shared_rho0);
    const Vec3 n1 = unit(config.apparatus1.field);
    const Vec3 n2 = unit(config.apparatus2.field);
    const double var1 = n1.dot(cov.topLeftCorner<3, 3>() * n1);
    const double var2 = n2.dot(cov.bottomRightCorner<3, 3>() * n2);
    const double cross = n1.dot(cov.topRightCorner<3, 3>() * n2);

    const auto [side1, side2] = reduced_sides(config);
    const double k1 = erf_scale(config.apparatus1);
    const double k2 = erf_scale(config.apparatus2);
    const double a1 = config.apparatus1.mu * side1.polarization * k1;
    const double a2 = config.apparatus2.mu * side2.polarization * k2;

    // u = xi1.n1 / sd1 and v = xi2.n2 / sd2 are standard normals with correlation r.
    const double sd1 = std::sqrt(std::max(var1, 0.0));
    const double sd2 = std::sqrt(std::max(var2, 0.0));
    const double r = sd1 > 0.0 && sd2 > 0.0 ? std::clamp(cross / (sd1 * sd2), -1.0, 1.0) : 0.0;
    const double c1 = k1 * sd1;
    const double c2 = k2 * sd2;
    const double denom = std::sqrt(1.0 + 2.0 * c2 * c2 * (1.0 - r * r));
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);

    auto integrand = [&](double u) {
        return norm * std::exp(-0.5 * u * u) * std::erf(a1 + c1 * u) * std::erf((a2 + c2 * r * u) / denom);
    };
    using boost::math::quadrature::gauss_kronrod;
    const double inf = std::numeric_limits<double>::infinity();
    double err = 0.0;
    if (a1 == 0.0 && a2 == 0.0) {
        return 2.0 * gauss_kronrod<double, 61>::integrate(integrand, 0.0, inf, 15, 1e-13, &err);
    }
    return gauss_kronrod<double, 61>::integrate(integrand, -inf, 0.0, 15, 1e-13, &err) +
           gauss_kronrod<double, 61>::integrate(integrand, 0.0, inf, 15, 1e-13, &err);
}

double singlet_erf_correlation(double kappa1, double kappa2, double theta) {
    const double x = 2.0 * kappa1 * kappa2 * std::cos(theta) /
                     std::sqrt((1.0 + 2.0 * kappa1 * kappa1) * (1.0 + 2.0 * kappa2 * kappa2));
    return -(2.0 / std::numbers::pi) * std::asin(x);
}

ChshAngles standard_chsh_angles() {
    const double deg = std::numbers::pi / 180.0;
    return {90.0 * deg, 0.0, 45.0 * deg, 135.0 * deg};
}

std::array<EprConfig, 4> chsh_configs(const EprConfig &base, const ChshAngles &angles) {
    const double s1 = base.apparatus1.field_strength();
    const double s2 = base.apparatus2.field_strength();
    const std::array<std::pair<double, double>, 4> settings{
        {{angles.a, angles.b}, {angles.a_prime, angles.b}, {angles.a, angles.b_prime}, {angles.a_prime, angles.b_prime}}};
    std::array<EprConfig, 4> out;
    for (std::size_t j = 0; j < 4; ++j) {
        out[j] = base;
        out[j].apparatus1.field = planar_field(s1, settings[j].first);
        out[j].apparatus2.field = planar_field(s2, settings[j].second);
    }
    return out;
}

double chsh_combination(const std::array<double, 4> &c) { return c[0] + c[1] + c[2] - c[3]; }

double chsh_idealized(const ChshAngles &angles) {
    return chsh_combination({-std::cos(angles.a - angles.b), -std::cos(angles.a_prime - angles.b),
                             -std::cos(angles.a - angles.b_prime), -std::cos(angles.a_prime - angles.b_prime)});
}

ChshResult chsh_statistic(const std::array<EprConfig, 4> &configs, std::size_t n, std::uint64_t master_seed,
                          unsigned workers) {
    for (std::size_t j = 1; j < 4; ++j) {
        if (configs[j].shared_rho0.matrix() != configs[0].shared_rho0.matrix()) {
            throw DomainError("chsh_statistic: configs must share the initial state");
        }
    }
    ChshResult r;
    r.labels = {"C(a,b)", "C(a',b)", "C(a,b')", "C(a',b')"};
    std::array<double, 4> values{};
    double var = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        r.correlations[j] = estimate_correlation(configs[j], n, derive_seed(master_seed, j), workers);
        values[j] = r.correlations[j].value;
        var += r.correlations[j].stderr * r.correlations[j].stderr;
        if (r.correlations[j].warning) {
            r.warnings.push_back(r.labels[j] + ": " + *r.correlations[j].warning);
        }
    }
    r.statistic = chsh_combination(values);
    r.stderr = std::sqrt(var);
    r.violation = std::abs(r.statistic) - 3.0 * r.stderr > 2.0;
    return r;
}

double chsh_oracle(const std::array<EprConfig, 4> &configs) {
    std::array<double, 4> values{};
    for (std::size_t j = 0; j < 4; ++j) {
        values[j] = correlation_quadrature_oracle(configs[j]);
    }
    return chsh_combination(values);
}

}  // namespace qmssb
