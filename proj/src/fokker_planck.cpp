#include "qmssb/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <sstream>

#include "qmssb/error.hpp"
#include "qmssb/kernels.hpp"

namespace qmssb {

namespace {

// x / (e^x - 1), continuous at 0.
double bernoulli(double x) {
    if (std::abs(x) < 1e-8) {
        return 1.0 - 0.5 * x;
    }
    return x / std::expm1(x);
}

struct Grid {
    std::size_t n;
    double half_width;
    double h;
    std::vector<double> forward;
    std::vector<double> backward;
};

Grid build_grid(const DriftModel &m, const FokkerPlanckOptions &o) {
    if (o.cells < 4 || o.cells % 2 != 0) {
        throw DomainError("fokker_planck: cells must be even and >= 4");
    }
    if (!(m.epsilon > 0.0)) {
        throw DomainError("fokker_planck: epsilon must be positive");
    }
    double half = 0.0;
    if (o.half_width) {
        half = *o.half_width;
    } else {
        if (!(m.gamma > 0.0) || !(m.lambda > 0.0)) {
            throw DomainError("fokker_planck: half_width is required without a double well");
        }
        half = 3.0 * std::sqrt(6.0 * m.gamma / m.lambda);
    }
    if (!(half > 0.0) || !std::isfinite(half)) {
        throw DomainError("fokker_planck: half_width must be positive");
    }
    Grid g;
    g.n = o.cells;
    g.half_width = half;
    g.h = 2.0 * half / static_cast<double>(o.cells);
    const double diffusion = 0.5 * m.epsilon;
    const double scale = diffusion / g.h;
    const auto half_n = static_cast<std::ptrdiff_t>(o.cells / 2);
    g.forward.resize(o.cells - 1);
    g.backward.resize(o.cells - 1);
    for (std::size_t j = 0; j + 1 < o.cells; ++j) {
        const double x = static_cast<double>(static_cast<std::ptrdiff_t>(j) + 1 - half_n) * g.h;
        const double f = m.gamma * x - (m.lambda / 6.0) * (x * x * x) + m.bias;
        const double w = f * g.h / diffusion;
        g.forward[j] = scale * bernoulli(-w);
        g.backward[j] = scale * bernoulli(w);
    }
    return g;
}

double max_dt(const Grid &g) {
    double worst = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double out = (i + 1 < g.n ? g.forward[i] : 0.0) + (i > 0 ? g.backward[i - 1] : 0.0);
        worst = std::max(worst, out);
    }
    return 0.9 * g.h / worst;
}

}  // namespace

double FokkerPlanckResult::mass() const {
    double s = 0.0;
    for (double v : density) {
        s += v;
    }
    return s * h;
}

double FokkerPlanckResult::mass_positive() const {
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        if (phi[i] > 0.0) {
            s += density[i];
        }
    }
    return s * h;
}

double FokkerPlanckResult::mean() const {
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        s += phi[i] * density[i];
    }
    return s * h / mass();
}

double FokkerPlanckResult::variance() const {
    const double m = mean();
    double s = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        s += (phi[i] - m) * (phi[i] - m) * density[i];
    }
    return s * h / mass();
}

double FokkerPlanckResult::median() const {
    const double total = mass();
    double acc = 0.0;
    for (std::size_t i = 0; i < phi.size(); ++i) {
        const double cell = density[i] * h;
        if (acc + cell >= 0.5 * total && cell > 0.0) {
            const double frac = (0.5 * total - acc) / cell;
            return phi[i] - 0.5 * h + frac * h;
        }
        acc += cell;
    }
    return phi.back();
}

double fokker_planck_max_dt(const DriftModel &model, const FokkerPlanckOptions &options) {
    return max_dt(build_grid(model, options));
}

FokkerPlanckResult fokker_planck_solve(const DriftModel &model, double t, const FokkerPlanckOptions &options) {
    if (!(t >= 0.0) || !std::isfinite(t)) {
        throw DomainError("fokker_planck: t must be finite and >= 0");
    }
    const Grid g = build_grid(model, options);
    if (!(options.initial_width >= 2.0 * g.h)) {
        throw DomainError("fokker_planck: initial_width must span at least two cells");
    }

    FokkerPlanckResult r;
    r.h = g.h;
    r.phi.resize(g.n);
    r.density.resize(g.n);
    const auto half_n = static_cast<std::ptrdiff_t>(g.n / 2);
    const double s0 = options.initial_width;
    double total = 0.0;
    for (std::size_t i = 0; i < g.n; ++i) {
        const double x = (static_cast<double>(static_cast<std::ptrdiff_t>(i) - half_n) + 0.5) * g.h;
        r.phi[i] = x;
        r.density[i] = std::exp(-0.5 * (x / s0) * (x / s0));
        total += r.density[i];
    }
    for (double &v : r.density) {
        v /= total * g.h;
    }

    double dt_max = options.dt ? *options.dt : max_dt(g);
    if (!(dt_max > 0.0)) {
        throw DomainError("fokker_planck: dt must be positive");
    }
    const std::size_t steps = t > 0.0 ? static_cast<std::size_t>(std::ceil(t / dt_max - 1e-9)) : 0;
    const double dt = steps > 0 ? t / static_cast<double>(steps) : 0.0;
    const double ratio = dt / g.h;
    std::vector<double> flux(g.n - 1);

    for (std::size_t n = 0; n < steps; ++n) {
        kernels::fokker_planck_step(r.density, flux, g.forward, g.backward, ratio);
        const double lo = *std::min_element(r.density.begin(), r.density.end());
        if (lo < -1e-8 || !std::isfinite(lo)) {
            std::ostringstream msg;
            msg << "fokker_planck: density fell to " << lo << " at t = " << static_cast<double>(n + 1) * dt
                << "; reduce dt";
            throw StepSizeError(msg.str());
        }
    }
    r.time = t;
    r.steps = steps;
    return r;
}

FokkerPlanckResult fokker_planck_solve(const ApparatusParams &p, double bias, double t,
                                       const FokkerPlanckOptions &options) {
    validate(p);
    return fokker_planck_solve(DriftModel{p.gamma, p.lambda, bias, p.epsilon}, t, options);
}

}  // namespace qmssb
