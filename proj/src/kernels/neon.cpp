// AArch64 Advanced SIMD backend. vmulq/vaddq/vsubq are used separately so
// that no fused multiply-add changes the rounding relative to scalar code.

#include <arm_neon.h>

#include "kernels_common.hpp"

namespace qmssb::kernels::neon {

void meter_step(const MeterCoefficients &c, const MeterLanes &l) {
    const float64x2_t gamma = vdupq_n_f64(c.gamma);
    const float64x2_t cubic = vdupq_n_f64(c.cubic);
    const float64x2_t coupling = vdupq_n_f64(c.coupling);
    const float64x2_t dt = vdupq_n_f64(c.dt);
    const float64x2_t rc = vdupq_n_f64(c.rot_cos);
    const float64x2_t rs = vdupq_n_f64(c.rot_sin);

    std::size_t i = 0;
    for (; i + 2 <= l.count; i += 2) {
        const float64x2_t s = vld1q_f64(l.polarization + i);
        const float64x2_t ph = vld1q_f64(l.phi + i);
        const float64x2_t bias = vaddq_f64(vld1q_f64(l.static_bias + i), vmulq_f64(coupling, s));
        const float64x2_t cube = vmulq_f64(vmulq_f64(ph, ph), ph);
        const float64x2_t drift = vaddq_f64(vsubq_f64(vmulq_f64(gamma, ph), vmulq_f64(cubic, cube)), bias);
        vst1q_f64(l.phi + i, vaddq_f64(vaddq_f64(ph, vmulq_f64(drift, dt)), vld1q_f64(l.noise + i)));

        const float64x2_t eq = vld1q_f64(l.pol_eq + i);
        vst1q_f64(l.polarization + i, vaddq_f64(eq, vmulq_f64(vsubq_f64(s, eq), vld1q_f64(l.pop_decay + i))));

        const float64x2_t re = vld1q_f64(l.coh_re + i);
        const float64x2_t im = vld1q_f64(l.coh_im + i);
        const float64x2_t d = vld1q_f64(l.coh_decay + i);
        vst1q_f64(l.coh_re + i, vmulq_f64(vaddq_f64(vmulq_f64(re, rc), vmulq_f64(im, rs)), d));
        vst1q_f64(l.coh_im + i, vmulq_f64(vsubq_f64(vmulq_f64(im, rc), vmulq_f64(re, rs)), d));
    }
    detail::meter_step_range(c, l, i, l.count);
}

void fokker_planck_step(std::span<double> density, std::span<double> flux, std::span<const double> forward,
                        std::span<const double> backward, double dt_over_h) {
    const std::size_t n = density.size();
    if (n < 2) {
        return;
    }
    double *p = density.data();
    double *f = flux.data();
    const double *fwd = forward.data();
    const double *bwd = backward.data();

    const std::size_t faces = n - 1;
    std::size_t j = 0;
    for (; j + 2 <= faces; j += 2) {
        const float64x2_t left = vmulq_f64(vld1q_f64(fwd + j), vld1q_f64(p + j));
        const float64x2_t right = vmulq_f64(vld1q_f64(bwd + j), vld1q_f64(p + j + 1));
        vst1q_f64(f + j, vsubq_f64(left, right));
    }
    detail::flux_range(p, f, fwd, bwd, j, faces);

    const float64x2_t r = vdupq_n_f64(dt_over_h);
    p[0] = p[0] + dt_over_h * (0.0 - f[0]);
    std::size_t i = 1;
    for (; i + 2 <= n - 1; i += 2) {
        const float64x2_t diff = vsubq_f64(vld1q_f64(f + i - 1), vld1q_f64(f + i));
        vst1q_f64(p + i, vaddq_f64(vld1q_f64(p + i), vmulq_f64(r, diff)));
    }
    detail::interior_update_range(p, f, dt_over_h, i, n - 1);
    p[n - 1] = p[n - 1] + dt_over_h * (f[n - 2] - 0.0);
}

}  // namespace qmssb::kernels::neon
