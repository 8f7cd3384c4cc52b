#pragma once

// Scalar element operations shared by the reference backend and by the
// remainder loops of the vector backends.

#include "qmssb/kernels.hpp"

namespace qmssb::kernels::detail {

inline void meter_step_range(const MeterCoefficients &c, const MeterLanes &l, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
        const double s = l.polarization[i];
        const double ph = l.phi[i];
        const double bias = l.static_bias[i] + c.coupling * s;
        const double cube = ph * ph * ph;
        const double drift = c.gamma * ph - c.cubic * cube + bias;
        l.phi[i] = ph + drift * c.dt + l.noise[i];

        const double eq = l.pol_eq[i];
        l.polarization[i] = eq + (s - eq) * l.pop_decay[i];

        const double re = l.coh_re[i];
        const double im = l.coh_im[i];
        const double d = l.coh_decay[i];
        l.coh_re[i] = (re * c.rot_cos + im * c.rot_sin) * d;
        l.coh_im[i] = (im * c.rot_cos - re * c.rot_sin) * d;
    }
}

inline void flux_range(const double *p, double *flux, const double *fwd, const double *bwd, std::size_t begin,
                       std::size_t end) {
    for (std::size_t j = begin; j < end; ++j) {
        flux[j] = fwd[j] * p[j] - bwd[j] * p[j + 1];
    }
}

// Interior cells only: i in [begin, end) with 1 <= i <= n - 2.
inline void interior_update_range(double *p, const double *flux, double r, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
        p[i] = p[i] + r * (flux[i - 1] - flux[i]);
    }
}

inline void update_range(double *p, const double *flux, double r, std::size_t begin, std::size_t n) {
    p[0] = p[0] + r * (0.0 - flux[0]);
    interior_update_range(p, flux, r, begin + 1, n - 1);
    p[n - 1] = p[n - 1] + r * (flux[n - 2] - 0.0);
}

}  // namespace qmssb::kernels::detail
