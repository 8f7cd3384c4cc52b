// Compiled with -mavx2 (and without -mfma). Only reached after a runtime
// CPU check in dispatch.cpp.

#include <immintrin.h>

#include "kernels_common.hpp"

namespace qmssb::kernels::avx2 {

void meter_step(const MeterCoefficients &c, const MeterLanes &l) {
    const __m256d gamma = _mm256_set1_pd(c.gamma);
    const __m256d cubic = _mm256_set1_pd(c.cubic);
    const __m256d coupling = _mm256_set1_pd(c.coupling);
    const __m256d dt = _mm256_set1_pd(c.dt);
    const __m256d rc = _mm256_set1_pd(c.rot_cos);
    const __m256d rs = _mm256_set1_pd(c.rot_sin);

    std::size_t i = 0;
    for (; i + 4 <= l.count; i += 4) {
        const __m256d s = _mm256_loadu_pd(l.polarization + i);
        const __m256d ph = _mm256_loadu_pd(l.phi + i);
        const __m256d bias = _mm256_add_pd(_mm256_loadu_pd(l.static_bias + i), _mm256_mul_pd(coupling, s));
        const __m256d cube = _mm256_mul_pd(_mm256_mul_pd(ph, ph), ph);
        const __m256d drift =
            _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(gamma, ph), _mm256_mul_pd(cubic, cube)), bias);
        const __m256d next = _mm256_add_pd(_mm256_add_pd(ph, _mm256_mul_pd(drift, dt)), _mm256_loadu_pd(l.noise + i));
        _mm256_storeu_pd(l.phi + i, next);

        const __m256d eq = _mm256_loadu_pd(l.pol_eq + i);
        const __m256d pol =
            _mm256_add_pd(eq, _mm256_mul_pd(_mm256_sub_pd(s, eq), _mm256_loadu_pd(l.pop_decay + i)));
        _mm256_storeu_pd(l.polarization + i, pol);

        const __m256d re = _mm256_loadu_pd(l.coh_re + i);
        const __m256d im = _mm256_loadu_pd(l.coh_im + i);
        const __m256d d = _mm256_loadu_pd(l.coh_decay + i);
        const __m256d re_next = _mm256_mul_pd(_mm256_add_pd(_mm256_mul_pd(re, rc), _mm256_mul_pd(im, rs)), d);
        const __m256d im_next = _mm256_mul_pd(_mm256_sub_pd(_mm256_mul_pd(im, rc), _mm256_mul_pd(re, rs)), d);
        _mm256_storeu_pd(l.coh_re + i, re_next);
        _mm256_storeu_pd(l.coh_im + i, im_next);
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
    for (; j + 4 <= faces; j += 4) {
        const __m256d left = _mm256_mul_pd(_mm256_loadu_pd(fwd + j), _mm256_loadu_pd(p + j));
        const __m256d right = _mm256_mul_pd(_mm256_loadu_pd(bwd + j), _mm256_loadu_pd(p + j + 1));
        _mm256_storeu_pd(f + j, _mm256_sub_pd(left, right));
    }
    detail::flux_range(p, f, fwd, bwd, j, faces);

    const __m256d r = _mm256_set1_pd(dt_over_h);
    p[0] = p[0] + dt_over_h * (0.0 - f[0]);
    std::size_t i = 1;
    for (; i + 4 <= n - 1; i += 4) {
        const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(f + i - 1), _mm256_loadu_pd(f + i));
        _mm256_storeu_pd(p + i, _mm256_add_pd(_mm256_loadu_pd(p + i), _mm256_mul_pd(r, diff)));
    }
    detail::interior_update_range(p, f, dt_over_h, i, n - 1);
    p[n - 1] = p[n - 1] + dt_over_h * (f[n - 2] - 0.0);
}

}  // namespace qmssb::kernels::avx2
