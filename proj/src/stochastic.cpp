#include "qmssb/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmssb/error.hpp"
#include "qmssb/parallel.hpp"
#include "qmssb/rng.hpp"

namespace qmssb {

PsdFactor factor_psd(const Eigen::MatrixXd &cov) {
    const Eigen::Index n = cov.rows();
    if (cov.cols() != n) {
        throw DimensionError("factor_psd: covariance must be square");
    }
    PsdFactor out;
    out.lower = Eigen::MatrixXd::Zero(n, n);
    if (n == 0) {
        return out;
    }
    if (!cov.allFinite()) {
        throw CovarianceError("factor_psd: covariance has non-finite entries");
    }
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw CovarianceError("factor_psd: covariance is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov, Eigen::EigenvaluesOnly);
    const double lo = eig.eigenvalues().minCoeff();
    if (lo < -kPsdTolerance) {
        std::ostringstream msg;
        msg << "factor_psd: covariance is not positive semidefinite (min eigenvalue " << lo << ")";
        throw CovarianceError(msg.str());
    }

    Eigen::MatrixXd residual = cov;
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    const double stop = kPsdTolerance * scale;
    for (Eigen::Index k = 0; k < n; ++k) {
        Eigen::Index pivot = -1;
        double best = stop;
        for (Eigen::Index i = 0; i < n; ++i) {
            if (!used[static_cast<std::size_t>(i)] && residual(i, i) > best) {
                best = residual(i, i);
                pivot = i;
            }
        }
        if (pivot < 0) {
            break;
        }
        used[static_cast<std::size_t>(pivot)] = true;
        Eigen::VectorXd column = residual.col(pivot) / std::sqrt(best);
        for (Eigen::Index i = 0; i < n; ++i) {
            if (used[static_cast<std::size_t>(i)] && i != pivot) {
                column[i] = 0.0;
            }
        }
        out.lower.col(k) = column;
        residual.noalias() -= column * column.transpose();
        ++out.rank;
    }
    return out;
}

Eigen::VectorXd sample_gaussian(const PsdFactor &factor, NormalStream &normals) {
    Eigen::VectorXd z(factor.rank);
    for (int k = 0; k < factor.rank; ++k) {
        z[k] = normals();
    }
    Eigen::VectorXd x = Eigen::VectorXd::Zero(factor.lower.rows());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        double acc = 0.0;
        for (int k = 0; k < factor.rank; ++k) {
            acc += factor.lower(i, k) * z[k];
        }
        x[i] = acc;
    }
    return x;
}

Eigen::VectorXd sample_static_noise(const Eigen::MatrixXd &cov, std::uint64_t seed) {
    PsdFactor factor = factor_psd(cov);
    NormalStream normals(seed);
    return sample_gaussian(factor, normals);
}

std::size_t step_count(const SdeProblem &problem) {
    const double span = problem.t_end - problem.t_start;
    return static_cast<std::size_t>(std::ceil(span / problem.dt - 1e-9));
}

void validate(const SdeProblem &p) {
    if (!(p.dt > 0.0) || !std::isfinite(p.dt)) {
        throw DomainError("SdeProblem: dt must be positive");
    }
    if (!(p.t_end > p.t_start)) {
        throw DomainError("SdeProblem: t_end must exceed t_start");
    }
    if (p.state_dimension == 0 || p.initial_state.size() != p.state_dimension) {
        throw DimensionError("SdeProblem: initial_state size must equal state_dimension");
    }
    if (!p.drift) {
        throw DomainError("SdeProblem: drift is empty");
    }
    if (!(p.noise.white_amplitude >= 0.0)) {
        throw DomainError("SdeProblem: white_amplitude must be >= 0");
    }
    if (!p.noise.white_mask.empty() && p.noise.white_mask.size() != p.state_dimension) {
        throw DimensionError("SdeProblem: white_mask size must equal state_dimension");
    }
    if (p.record_stride == 0) {
        throw DomainError("SdeProblem: record_stride must be >= 1");
    }
}

Trajectory integrate_sde(const SdeProblem &problem, std::uint64_t seed) {
    validate(problem);
    const std::size_t dim = problem.state_dimension;
    const std::size_t steps = step_count(problem);

    NormalStream normals(seed);
    Trajectory traj;
    traj.seed = seed;
    if (problem.noise.static_covariance) {
        PsdFactor factor = factor_psd(*problem.noise.static_covariance);
        Eigen::VectorXd q = sample_gaussian(factor, normals);
        traj.quenched.assign(q.data(), q.data() + q.size());
    }

    std::vector<double> noise_scale(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        const double m = problem.noise.white_mask.empty() ? 1.0 : problem.noise.white_mask[i];
        noise_scale[i] = std::sqrt(problem.noise.white_amplitude * m * problem.dt);
    }

    std::vector<double> x = problem.initial_state;
    std::vector<double> f(dim);
    traj.times.push_back(problem.t_start);
    traj.states.push_back(x);

    for (std::size_t n = 0; n < steps; ++n) {
        const double t = problem.t_start + static_cast<double>(n) * problem.dt;
        problem.drift(t, x, traj.quenched, f);
        for (std::size_t i = 0; i < dim; ++i) {
            const double eta = noise_scale[i] > 0.0 ? normals() : 0.0;
            x[i] = x[i] + f[i] * problem.dt + noise_scale[i] * eta;
        }
        const double t_next = problem.t_start + static_cast<double>(n + 1) * problem.dt;
        for (std::size_t i = 0; i < dim; ++i) {
            if (!std::isfinite(x[i]) || std::abs(x[i]) > problem.divergence_bound) {
                std::ostringstream msg;
                msg << "trajectory diverged at t = " << t_next << " (component " << i << ")";
                throw DivergenceError(msg.str(), t_next);
            }
        }
        if ((n + 1) % problem.record_stride == 0 || n + 1 == steps) {
            traj.times.push_back(t_next);
            traj.states.push_back(x);
        }
    }
    return traj;
}

SampleStats sample_stats(std::span<const double> values) {
    SampleStats s;
    s.count = values.size();
    if (values.empty()) {
        return s;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - s.mean) * (v - s.mean);
        }
        s.variance = sq / static_cast<double>(values.size() - 1);
        s.standard_error = std::sqrt(s.variance / static_cast<double>(values.size()));
    }
    return s;
}

EnsembleResult run_ensemble(const SdeProblem &problem, std::size_t n, std::uint64_t master_seed, unsigned workers) {
    if (n == 0) {
        throw DomainError("run_ensemble: n must be >= 1");
    }
    validate(problem);
    SdeProblem lean = problem;
    lean.record_stride = std::max<std::size_t>(1, step_count(problem));

    EnsembleResult out;
    out.n_trajectories = n;
    out.trajectories.resize(n);
    parallel_for(n, workers, [&](std::size_t i) {
        const std::uint64_t seed = derive_seed(master_seed, i);
        try {
            Trajectory t = integrate_sde(lean, seed);
            out.trajectories[i] = {i, seed, t.final_state(), std::move(t.quenched)};
        } catch (const DivergenceError &e) {
            std::ostringstream msg;
            msg << e.what() << " in trajectory " << i;
            throw DivergenceError(msg.str(), e.time(), i);
        }
    });

    const std::size_t dim = problem.state_dimension;
    out.mean.resize(dim);
    out.variance.resize(dim);
    out.standard_error.resize(dim);
    std::vector<double> column(n);
    for (std::size_t d = 0; d < dim; ++d) {
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = out.trajectories[i].final_state[d];
        }
        SampleStats s = sample_stats(column);
        out.mean[d] = s.mean;
        out.variance[d] = s.variance;
        out.standard_error[d] = s.standard_error;
    }
    return out;
}

}  // namespace qmssb
