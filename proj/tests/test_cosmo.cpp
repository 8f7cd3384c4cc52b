#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qmssb/cosmo.hpp"
#include "qmssb/error.hpp"
#include "support.hpp"

using namespace qmssb;
using std::numbers::pi;

TEST_CASE("analytic_mode limits") {
    CHECK(std::abs(analytic_mode(1.0, -1e7, 1.0)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(analytic_mode(4.0, -1e7, 1.0)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(std::abs(analytic_mode(1.0, -1.0, 1.0)) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
    CHECK(std::abs(analytic_mode(1.0, -1.0, 0.0)) == doctest::Approx(1.0).epsilon(1e-15));
    for (double k : {0.1, 1.0, 3.0}) {
        const double eta = -1e-4 / k;
        CHECK(std::abs(analytic_mode(k, eta, 1.0)) * std::pow(k, 1.5) * std::abs(eta) ==
              doctest::Approx(1.0).epsilon(1e-7));
    }
    CHECK_THROWS_AS(analytic_mode(1.0, 0.5, 1.0), DomainError);
}

TEST_CASE("analytic_mode solves the mode equation") {
    testing::Gen gen(1);
    for (int i = 0; i < 50; ++i) {
        const double k = gen.uniform(0.1, 5.0);
        const double eta = -gen.uniform(0.2, 20.0);
        const double h = 1e-4;
        const auto v = analytic_mode(k, eta, 1.0);
        const auto d2 = (analytic_mode(k, eta + h, 1.0) - 2.0 * v + analytic_mode(k, eta - h, 1.0)) / (h * h);
        const auto residual = d2 + (k * k - 2.0 / (eta * eta)) * v;
        CHECK(std::abs(residual) < 1e-5 * (1.0 + std::abs(d2)));
        const auto dv = (analytic_mode(k, eta + h, 1.0) - analytic_mode(k, eta - h, 1.0)) / (2.0 * h);
        CHECK(std::abs(dv - analytic_mode_derivative(k, eta, 1.0)) < 1e-6 * (1.0 + std::abs(dv)));
    }
}

TEST_CASE("integrate_mode: pump off is a plane wave") {
    const InflationParams ip{0.0, -50.0, -0.05};
    const ModeTrajectory t = integrate_mode(1.0, ip, 1e-3, 1000);
    for (const ModeState &s : t.states) {
        CHECK(std::abs(s.v) == doctest::Approx(1.0).epsilon(1e-8));
    }
    CHECK(t.wronskian_drift < 1e-8);
}

TEST_CASE("integrate_mode tracks the analytic magnitude and conserves the Wronskian") {
    for (double k : {0.5, 1.0, 2.0}) {
        const InflationParams ip{1.0, -1000.0 / k, -0.05 / k};
        const ModeTrajectory t = integrate_mode(k, ip, 1e-3 / k, 50);
        CHECK(t.wronskian_drift < 1e-8);
        CHECK(std::abs(t.states.front().wronskian() - std::complex<double>(0.0, 2.0)) < 1e-12);
        double worst = 0.0;
        for (const ModeState &s : t.states) {
            const double x = k * std::abs(s.eta);
            if (x < 0.1 || x > 10.0) continue;
            worst = std::max(worst, std::abs(std::abs(s.v) / std::abs(analytic_mode(k, s.eta, 1.0)) - 1.0));
        }
        CHECK(worst < 0.01);
        const ModeState &last = t.states.back();
        CHECK(last.eta == ip.eta_end);
    }
}

TEST_CASE("integrate_mode stays accurate deep outside the horizon") {
    const ModeTrajectory t = integrate_mode(1.0, {1.0, -100.0, -1e-4}, 1e-3, 1000000);
    const ModeState &last = t.states.back();
    CHECK(std::abs(last.v - analytic_mode(1.0, last.eta, 1.0)) < 1e-6 * std::abs(last.v));
}

TEST_CASE("integrate_mode: sub- and super-horizon envelopes") {
    const double k = 1.0;
    const InflationParams ip{1.0, -1000.0, -0.1};
    const ModeTrajectory t = integrate_mode(k, ip, 1e-3, 1);
    CHECK(t.states.size() > 999000);
    const ModeState *inside = nullptr;
    for (const ModeState &s : t.states) {
        if (inside == nullptr && s.eta >= -10.0) inside = &s;
    }
    REQUIRE(inside != nullptr);
    CHECK(std::abs(inside->v) == doctest::Approx(1.0).epsilon(0.01));
    const ModeState &out = t.states.back();
    const double growth = 1.0 / (k * std::abs(out.eta));  // aH / k
    CHECK(std::abs(out.v) == doctest::Approx(std::pow(k, -0.5) * growth).epsilon(0.01));
}

TEST_CASE("integrate_mode rejects coarse steps and bad windows") {
    CHECK_THROWS_AS(integrate_mode(1.0, {1.0, -10.0, -20.0}, 1e-3), DomainError);
    // Leapfrog is unstable for k d_eta > 2; the blow-up destroys the Wronskian.
    CHECK_THROWS_AS(integrate_mode(100.0, {1.0, -1000.0, -0.05}, 0.5), StepSizeError);
}

TEST_CASE("kernel values") {
    const KernelValues s = evaluate_kernels(-1.0, -2.0);
    CHECK(s.g_ret == doctest::Approx(-7.0 / 6.0).epsilon(1e-15));
    CHECK(s.g_stat == doctest::Approx(-1.5).epsilon(1e-15));
    testing::Gen gen(2);
    for (int i = 0; i < 200; ++i) {
        const double eta = -gen.uniform(1e-3, 1e3);
        const double other = -gen.uniform(1e-3, 1e3);
        const KernelValues e = evaluate_kernels(eta, eta);
        CHECK(e.g_ret == 0.0);
        CHECK(std::abs(e.g_stat - (-1.0 / (eta * eta) - 1.0)) <= 1e-12 * std::max(1.0, 1.0 / (eta * eta)));
        const double a = evaluate_kernels(eta, other).g_ret;
        const double b = evaluate_kernels(other, eta).g_ret;
        CHECK(std::abs(a + b) <= 1e-12 * std::max(1.0, std::abs(a)));
    }
    CHECK_THROWS_AS(evaluate_kernels(1.0, -1.0), DomainError);
}

TEST_CASE("reheating_langevin: no coupling means no fluctuation") {
    const InflationParams ip;
    ReheatingParams rp;
    rp.lambda = 0.0;
    const LangevinEstimate e = reheating_langevin(1.0, rp, ip, 100, 1);
    CHECK(e.mean_square == 0.0);
    rp.lambda = 0.1;
    rp.phi0 = 0.0;
    CHECK(reheating_langevin(1.0, rp, ip, 100, 1).mean_square == 0.0);
}

TEST_CASE("reheating_langevin: random-acceleration benchmark") {
    const InflationParams ip;
    ReheatingParams rp;
    rp.noise_density = 0.8;
    rp.delta_t = 1.5;
    const LangevinEstimate e = reheating_langevin(1.0, rp, ip, 10000, 3);
    const double expect = 0.8 * std::pow(1.5, 3) / 3.0;
    CHECK(e.mean_square == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("reheating_langevin: lambda^2 and phi0^4 scaling") {
    const InflationParams ip;
    ReheatingParams rp;
    rp.lambda = 0.1;
    rp.phi0 = 0.7;
    rp.delta_t = 2.0;
    const LangevinEstimate base = reheating_langevin(0.3, rp, ip, 2000, 4);
    ReheatingParams twice_phi = rp;
    twice_phi.phi0 *= 2.0;
    ReheatingParams twice_lambda = rp;
    twice_lambda.lambda *= 2.0;
    const LangevinEstimate a = reheating_langevin(0.3, twice_phi, ip, 2000, 4);
    const LangevinEstimate b = reheating_langevin(0.3, twice_lambda, ip, 2000, 4);
    CHECK(a.mean_square / base.mean_square == doctest::Approx(16.0).epsilon(1e-10));
    CHECK(b.mean_square / base.mean_square == doctest::Approx(4.0).epsilon(1e-10));
    const LangevinEstimate again = reheating_langevin(0.3, rp, ip, 2000, 4, 3);
    CHECK(again.mean_square == base.mean_square);
}

TEST_CASE("reheating_langevin: horizon crossing must lie inside the window") {
    ReheatingParams rp;
    CHECK_THROWS_AS(reheating_langevin(1e-6, rp, InflationParams{}, 10, 1), DomainError);
    CHECK_THROWS_AS(reheating_langevin(1e3, rp, InflationParams{}, 10, 1), DomainError);
}

TEST_CASE("reheating_langevin: optional terms change the answer but stay finite") {
    const InflationParams ip;
    ReheatingParams rp;
    rp.delta_t = 2.0;
    const LangevinEstimate plain = reheating_langevin(1.0, rp, ip, 500, 6);
    rp.include_potential = true;
    rp.include_memory = true;
    const LangevinEstimate full = reheating_langevin(1.0, rp, ip, 500, 6);
    CHECK(std::isfinite(full.mean_square));
    CHECK(full.mean_square > 0.0);
    CHECK(full.mean_square != plain.mean_square);
}

TEST_CASE("power spectrum is flat and positive") {
    const InflationParams ip;
    ReheatingParams rp;
    rp.delta_t = 2.0;
    const SpectrumResult s = power_spectrum({0.01, 0.1, 1.0}, rp, ip, 1000, 7);
    REQUIRE(s.power.size() == 3);
    const double expect = rp.lambda * rp.lambda * std::pow(rp.delta_t * rp.phi0, 4) * s.reference / 3.0;
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(s.power[j] > 0.0);
        CHECK(std::abs(s.power[j] - expect) < 4.0 * s.stderr[j]);
    }
    CHECK_THROWS_AS(power_spectrum({0.1, 1.0}, rp, ip, 10, 1), DomainError);
}

TEST_CASE("energy-balance reheating time lands near the standard amplitude") {
    const double lambda = 0.1, phi0 = 2.0;
    const double dt = energy_balance_delta_t(lambda, phi0);
    CHECK(dt == doctest::Approx(std::sqrt(2.0 / lambda) / phi0));
    CHECK(lambda * lambda * std::pow(dt * phi0, 4) / 3.0 == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("standard_spectrum") {
    CHECK(standard_spectrum(2.0 * pi) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(standard_spectrum(1.0) == doctest::Approx(0.025330295910584444).epsilon(1e-14));
    CHECK(standard_spectrum(3.0) / standard_spectrum(1.5) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK_THROWS_AS(standard_spectrum(0.0), DomainError);
}
