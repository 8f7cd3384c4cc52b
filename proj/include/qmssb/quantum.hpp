#pragma once

// Exact spin-1/2 algebra for one spin or a pair of spins.
//
// Spin operators use the Pauli normalization (eigenvalues +-1); couplings such
// as mu*B absorb the factor hbar/2. Two-spin states are ordered with spin 1 as
// the left tensor factor: |uu>, |ud>, |du>, |dd>.

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

namespace qmssb {

using Complex = std::complex<double>;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kHermiticityTolerance = 1e-12;
inline constexpr double kTraceTolerance = 1e-12;
inline constexpr double kPositivityTolerance = 1e-10;

struct SpinObservables {
    std::array<Eigen::Matrix2cd, 3> components;  // S1, S2, S3
    Eigen::Matrix2cd raising;                    // S+ = (S1 + i S2) / 2 = |u><d|
    Eigen::Matrix2cd lowering;                   // S- = (S1 - i S2) / 2 = |d><u|
};

const SpinObservables &pauli();

struct Violation {
    enum class Kind { dimension, hermiticity, trace, positivity, non_finite };
    Kind kind;
    double magnitude;
};

std::string to_string(Violation::Kind kind);

/// Lists every broken density-matrix invariant. Empty means valid.
std::vector<Violation> validate_density_matrix(const CMatrix &m);

class DensityMatrix {
   public:
    /// Validates and throws DomainError listing the violations.
    static DensityMatrix checked(CMatrix m);
    /// Skips validation; used for diagnostics and constructed counterexamples.
    static DensityMatrix unchecked(CMatrix m);

    int dim() const { return static_cast<int>(m_.rows()); }
    const CMatrix &matrix() const { return m_; }
    Complex operator()(int i, int j) const { return m_(i, j); }

   private:
    explicit DensityMatrix(CMatrix m) : m_(std::move(m)) {}
    CMatrix m_;
};

std::vector<Violation> validate_density_matrix(const DensityMatrix &rho);

DensityMatrix make_pure_spin(double polar_angle, double azimuth);
DensityMatrix make_singlet();
DensityMatrix make_triplet_zero();
DensityMatrix make_product(const DensityMatrix &first, const DensityMatrix &second);
DensityMatrix maximally_mixed(int dim);

/// Tr(rho S.axis) for a single spin; axis must be a unit vector.
double spin_expectation(const DensityMatrix &rho, const Vec3 &axis);

/// Bloch vector (Tr rho S1, Tr rho S2, Tr rho S3) of a single spin.
Vec3 bloch_vector(const DensityMatrix &rho);

/// entry(i, j) = Tr(rho S_i(1) S_j(2)) for a two-spin state.
Mat3 spin_correlation_matrix(const DensityMatrix &rho);

/// Reduced state of spin 0 or spin 1 of a two-spin state.
DensityMatrix partial_trace(const DensityMatrix &rho, int keep);

/// Unitary U with U (axis.S) U^dagger = S3.
Eigen::Matrix2cd rotation_to_z(const Vec3 &axis);

double min_eigenvalue(const CMatrix &m);

}  // namespace qmssb
