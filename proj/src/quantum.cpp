#include "qmssb/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qmssb/error.hpp"

namespace qmssb {

namespace {

constexpr Complex I{0.0, 1.0};

SpinObservables build_pauli() {
    SpinObservables s;
    s.components[0] << 0, 1, 1, 0;
    s.components[1] << 0, -I, I, 0;
    s.components[2] << 1, 0, 0, -1;
    s.raising << 0, 1, 0, 0;
    s.lowering << 0, 0, 1, 0;
    return s;
}

Eigen::Matrix4cd kron(const Eigen::Matrix2cd &a, const Eigen::Matrix2cd &b) {
    Eigen::Matrix4cd out;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
        }
    }
    return out;
}

void require_dim(const DensityMatrix &rho, int dim, const char *op) {
    if (rho.dim() != dim) {
        std::ostringstream msg;
        msg << op << ": expected dimension " << dim << ", got " << rho.dim();
        throw DimensionError(msg.str());
    }
}

}  // namespace

const SpinObservables &pauli() {
    static const SpinObservables s = build_pauli();
    return s;
}

std::string to_string(Violation::Kind kind) {
    switch (kind) {
        case Violation::Kind::dimension:
            return "dimension";
        case Violation::Kind::hermiticity:
            return "hermiticity";
        case Violation::Kind::trace:
            return "trace";
        case Violation::Kind::positivity:
            return "positivity";
        case Violation::Kind::non_finite:
            return "non_finite";
    }
    return "unknown";
}

double min_eigenvalue(const CMatrix &m) {
    CMatrix h = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

std::vector<Violation> validate_density_matrix(const CMatrix &m) {
    std::vector<Violation> out;
    if (m.rows() != m.cols() || (m.rows() != 2 && m.rows() != 4)) {
        out.push_back({Violation::Kind::dimension, static_cast<double>(m.rows())});
        return out;
    }
    if (!m.allFinite()) {
        out.push_back({Violation::Kind::non_finite, 0.0});
        return out;
    }
    double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
    if (herm > kHermiticityTolerance) {
        out.push_back({Violation::Kind::hermiticity, herm});
    }
    double trace_err = std::abs(m.trace() - Complex(1.0, 0.0));
    if (trace_err > kTraceTolerance) {
        out.push_back({Violation::Kind::trace, trace_err});
    }
    double lo = min_eigenvalue(m);
    if (lo < -kPositivityTolerance) {
        out.push_back({Violation::Kind::positivity, -lo});
    }
    return out;
}

std::vector<Violation> validate_density_matrix(const DensityMatrix &rho) {
    return validate_density_matrix(rho.matrix());
}

DensityMatrix DensityMatrix::checked(CMatrix m) {
    auto violations = validate_density_matrix(m);
    if (!violations.empty()) {
        std::ostringstream msg;
        msg << "invalid density matrix:";
        for (const auto &v : violations) {
            msg << ' ' << to_string(v.kind) << '=' << v.magnitude;
        }
        throw DomainError(msg.str());
    }
    return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::unchecked(CMatrix m) { return DensityMatrix(std::move(m)); }

DensityMatrix make_pure_spin(double polar_angle, double azimuth) {
    if (!std::isfinite(polar_angle) || !std::isfinite(azimuth)) {
        throw DomainError("make_pure_spin: angles must be finite");
    }
    Eigen::Vector2cd psi(std::cos(polar_angle / 2), std::polar(1.0, azimuth) * std::sin(polar_angle / 2));
    CMatrix m = psi * psi.adjoint();
    return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix make_singlet() {
    Eigen::Vector4cd psi(0, 1, -1, 0);
    psi /= std::sqrt(2.0);
    CMatrix m = psi * psi.adjoint();
    return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix make_triplet_zero() {
    Eigen::Vector4cd psi(0, 1, 1, 0);
    psi /= std::sqrt(2.0);
    CMatrix m = psi * psi.adjoint();
    return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix make_product(const DensityMatrix &first, const DensityMatrix &second) {
    require_dim(first, 2, "make_product");
    require_dim(second, 2, "make_product");
    CMatrix m = kron(first.matrix(), second.matrix());
    return DensityMatrix::unchecked(std::move(m));
}

DensityMatrix maximally_mixed(int dim) {
    if (dim != 2 && dim != 4) {
        throw DimensionError("maximally_mixed: dimension must be 2 or 4");
    }
    CMatrix m = CMatrix::Identity(dim, dim) / static_cast<double>(dim);
    return DensityMatrix::unchecked(std::move(m));
}

double spin_expectation(const DensityMatrix &rho, const Vec3 &axis) {
    require_dim(rho, 2, "spin_expectation");
    if (!axis.allFinite() || std::abs(axis.norm() - 1.0) > 1e-10) {
        throw DomainError("spin_expectation: axis must be a unit vector");
    }
    return axis.dot(bloch_vector(rho));
}

Vec3 bloch_vector(const DensityMatrix &rho) {
    require_dim(rho, 2, "bloch_vector");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        out[i] = (rho.matrix() * pauli().components[i]).trace().real();
    }
    return out;
}

Mat3 spin_correlation_matrix(const DensityMatrix &rho) {
    require_dim(rho, 4, "spin_correlation_matrix");
    Mat3 out;
    const auto &s = pauli().components;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            out(i, j) = (rho.matrix() * kron(s[i], s[j])).trace().real();
        }
    }
    return out;
}

DensityMatrix partial_trace(const DensityMatrix &rho, int keep) {
    require_dim(rho, 4, "partial_trace");
    if (keep != 0 && keep != 1) {
        throw DomainError("partial_trace: keep must be 0 or 1");
    }
    CMatrix out = CMatrix::Zero(2, 2);
    const CMatrix &m = rho.matrix();
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            for (int k = 0; k < 2; ++k) {
                out(a, b) += keep == 0 ? m(2 * a + k, 2 * b + k) : m(2 * k + a, 2 * k + b);
            }
        }
    }
    return DensityMatrix::unchecked(std::move(out));
}

Eigen::Matrix2cd rotation_to_z(const Vec3 &axis) {
    double norm = axis.norm();
    if (!(norm > 0.0) || !std::isfinite(norm)) {
        throw DomainError("rotation_to_z: axis must be nonzero and finite");
    }
    Vec3 n = axis / norm;
    double theta = std::acos(std::clamp(n.z(), -1.0, 1.0));
    double phi = std::atan2(n.y(), n.x());
    Eigen::Vector2cd up(std::cos(theta / 2), std::polar(1.0, phi) * std::sin(theta / 2));
    Eigen::Vector2cd down(std::sin(theta / 2), -std::polar(1.0, phi) * std::cos(theta / 2));
    Eigen::Matrix2cd u;
    u.row(0) = up.adjoint();
    u.row(1) = down.adjoint();
    return u;
}

}  // namespace qmssb
