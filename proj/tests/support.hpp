#pragma once

// Random generators for property tests.

#include <cmath>
#include <numbers>
#include <random>

#include "qmssb/quantum.hpp"

namespace qmssb::testing {

class Gen {
   public:
    explicit Gen(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    double normal() { return std::normal_distribution<double>()(engine_); }
    std::uint64_t bits() { return engine_(); }

    Vec3 unit_vector() {
        Vec3 v(normal(), normal(), normal());
        return v / v.norm();
    }

    DensityMatrix pure_spin() { return make_pure_spin(std::acos(uniform(-1.0, 1.0)), uniform(0.0, 2.0 * std::numbers::pi)); }

    /// Mixed single-spin state with Bloch vector inside the ball.
    DensityMatrix mixed_spin() {
        const Vec3 r = unit_vector() * std::cbrt(uniform(0.0, 1.0));
        CMatrix m(2, 2);
        m << 0.5 * (1.0 + r.z()), Complex(0.5 * r.x(), -0.5 * r.y()), Complex(0.5 * r.x(), 0.5 * r.y()),
            0.5 * (1.0 - r.z());
        return DensityMatrix::checked(m);
    }

    /// A A^dagger / Tr for a Gaussian complex A.
    DensityMatrix random_state(int dim) {
        CMatrix a(dim, dim);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                a(i, j) = Complex(normal(), normal());
            }
        }
        CMatrix m = a * a.adjoint();
        m /= m.trace().real();
        m = 0.5 * (m + m.adjoint()).eval();
        return DensityMatrix::checked(m);
    }

   private:
    std::mt19937_64 engine_;
};

}  // namespace qmssb::testing
