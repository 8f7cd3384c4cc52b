#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qmssb/error.hpp"
#include "qmssb/quantum.hpp"
#include "support.hpp"

using namespace qmssb;
using std::numbers::pi;

namespace {

bool has_kind(const std::vector<Violation> &v, Violation::Kind k) {
    for (const auto &x : v) {
        if (x.kind == k) return true;
    }
    return false;
}

double magnitude_of(const std::vector<Violation> &v, Violation::Kind k) {
    for (const auto &x : v) {
        if (x.kind == k) return x.magnitude;
    }
    return 0.0;
}

}  // namespace

TEST_CASE("pauli operators square to identity and close the algebra") {
    const auto &s = pauli();
    const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
    const Complex two_i(0.0, 2.0);
    for (int i = 0; i < 3; ++i) {
        CHECK((s.components[i] * s.components[i] - id).norm() < 1e-15);
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        const Eigen::Matrix2cd comm = s.components[i] * s.components[j] - s.components[j] * s.components[i];
        CHECK((comm - two_i * s.components[k]).norm() < 1e-15);
    }
    CHECK((s.raising - 0.5 * (s.components[0] + Complex(0, 1) * s.components[1])).norm() < 1e-15);
    CHECK((s.lowering - s.raising.adjoint()).norm() < 1e-15);
}

TEST_CASE("make_pure_spin poles and equator") {
    const CMatrix up = make_pure_spin(0.0, 0.0).matrix();
    CHECK(std::abs(up(0, 0) - 1.0) < 1e-15);
    CHECK(std::abs(up(1, 1)) < 1e-15);
    const CMatrix down = make_pure_spin(pi, 0.0).matrix();
    CHECK(std::abs(down(1, 1) - 1.0) < 1e-15);
    CHECK(std::abs(down(0, 0)) < 1e-15);
    const CMatrix eq = make_pure_spin(pi / 2, 0.0).matrix();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(eq(i, j) - 0.5) < 1e-15);
        }
    }
}

TEST_CASE("singlet is pure, maximally entangled and perfectly anti-correlated") {
    const DensityMatrix s = make_singlet();
    CHECK(s.dim() == 4);
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(s.matrix());
    const auto ev = eig.eigenvalues();
    CHECK(std::abs(ev[3] - 1.0) < 1e-12);
    for (int i = 0; i < 3; ++i) CHECK(std::abs(ev[i]) < 1e-12);
    CHECK(std::abs(s.matrix().trace() - 1.0) < 1e-12);
    for (int keep : {0, 1}) {
        CHECK((partial_trace(s, keep).matrix() - 0.5 * CMatrix::Identity(2, 2)).norm() < 1e-15);
    }
    CHECK((spin_correlation_matrix(s) + Mat3::Identity()).norm() < 1e-15);
}

TEST_CASE("spin_expectation examples and errors") {
    CHECK(spin_expectation(make_pure_spin(0, 0), Vec3::UnitZ()) == doctest::Approx(1.0).epsilon(1e-15));
    const DensityMatrix mixed = partial_trace(make_singlet(), 0);
    testing::Gen gen(7);
    for (int i = 0; i < 20; ++i) {
        CHECK(std::abs(spin_expectation(mixed, gen.unit_vector())) < 1e-15);
    }
    CHECK(spin_expectation(make_pure_spin(pi / 3, 0), Vec3::UnitZ()) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS(spin_expectation(mixed, Vec3(0, 0, 2)), DomainError);
    CHECK_THROWS_AS(spin_expectation(make_singlet(), Vec3::UnitZ()), DimensionError);
}

TEST_CASE("spin_correlation_matrix examples") {
    const DensityMatrix up = make_pure_spin(0, 0);
    Mat3 expect = Mat3::Zero();
    expect(2, 2) = 1.0;
    CHECK((spin_correlation_matrix(make_product(up, up)) - expect).norm() < 1e-15);
    const Mat3 t = spin_correlation_matrix(make_triplet_zero());
    CHECK((t - Eigen::Vector3d(1, 1, -1).asDiagonal().toDenseMatrix()).norm() < 1e-15);
    CHECK_THROWS_AS(spin_correlation_matrix(up), DimensionError);
}

TEST_CASE("validate_density_matrix diagnostics") {
    CHECK(validate_density_matrix(maximally_mixed(2)).empty());

    CMatrix bad(2, 2);
    bad << 2.0, 0.0, 0.0, -1.0;
    const auto v = validate_density_matrix(bad);
    CHECK_FALSE(has_kind(v, Violation::Kind::trace));
    CHECK(has_kind(v, Violation::Kind::positivity));
    CHECK(magnitude_of(v, Violation::Kind::positivity) == doctest::Approx(1.0));

    CMatrix pert = make_singlet().matrix();
    pert(0, 1) += 1e-6;
    const auto w = validate_density_matrix(pert);
    REQUIRE(has_kind(w, Violation::Kind::hermiticity));
    CHECK(magnitude_of(w, Violation::Kind::hermiticity) == doctest::Approx(1e-6).epsilon(1e-3));

    CMatrix asym(3, 3);
    asym.setIdentity();
    CHECK(has_kind(validate_density_matrix(asym / 3.0), Violation::Kind::dimension));
    CHECK_THROWS_AS(DensityMatrix::checked(bad), DomainError);
}

TEST_CASE("property: constructed states satisfy the invariants") {
    testing::Gen gen(11);
    for (int i = 0; i < 200; ++i) {
        CHECK(validate_density_matrix(gen.pure_spin()).empty());
        const DensityMatrix p = make_product(gen.mixed_spin(), gen.mixed_spin());
        CHECK(validate_density_matrix(p).empty());
        CHECK(validate_density_matrix(gen.random_state(4)).empty());
    }
}

TEST_CASE("property: spin_expectation is linear and bounded") {
    testing::Gen gen(12);
    for (int i = 0; i < 300; ++i) {
        const DensityMatrix a = gen.mixed_spin();
        const DensityMatrix b = gen.mixed_spin();
        const double w = gen.uniform(0.0, 1.0);
        const Vec3 n = gen.unit_vector();
        const DensityMatrix mix = DensityMatrix::checked(w * a.matrix() + (1.0 - w) * b.matrix());
        const double lhs = spin_expectation(mix, n);
        const double rhs = w * spin_expectation(a, n) + (1.0 - w) * spin_expectation(b, n);
        CHECK(std::abs(lhs - rhs) < 1e-12);
        CHECK(std::abs(lhs) <= 1.0 + 1e-12);
    }
}

TEST_CASE("property: product-state correlations factorize") {
    testing::Gen gen(13);
    for (int i = 0; i < 300; ++i) {
        const DensityMatrix a = gen.mixed_spin();
        const DensityMatrix b = gen.mixed_spin();
        const Mat3 c = spin_correlation_matrix(make_product(a, b));
        const Mat3 outer = bloch_vector(a) * bloch_vector(b).transpose();
        CHECK((c - outer).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("property: correlation entries of random states lie in [-1, 1]") {
    testing::Gen gen(14);
    for (int i = 0; i < 300; ++i) {
        const Mat3 c = spin_correlation_matrix(gen.random_state(4));
        CHECK(c.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
    }
}

TEST_CASE("property: partial traces of random states are valid") {
    testing::Gen gen(15);
    for (int i = 0; i < 100; ++i) {
        const DensityMatrix r = gen.random_state(4);
        CHECK(validate_density_matrix(partial_trace(r, 0)).empty());
        CHECK(validate_density_matrix(partial_trace(r, 1)).empty());
    }
}

TEST_CASE("rotation_to_z maps the field axis onto S3") {
    testing::Gen gen(16);
    const auto &s = pauli();
    for (int i = 0; i < 100; ++i) {
        const Vec3 n = gen.unit_vector();
        const Eigen::Matrix2cd u = rotation_to_z(n);
        const Eigen::Matrix2cd sn = n.x() * s.components[0] + n.y() * s.components[1] + n.z() * s.components[2];
        CHECK((u * sn * u.adjoint() - s.components[2]).norm() < 1e-12);
        CHECK((u * u.adjoint() - Eigen::Matrix2cd::Identity()).norm() < 1e-12);
    }
}
