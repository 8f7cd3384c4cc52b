#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_common.hpp"
#include "qmssb/error.hpp"

namespace qmssb::kernels {

namespace {

bool cpu_has_avx2() {
#if defined(QMSSB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend initial_backend() {
    if (const char *env = std::getenv("QMSSB_SIMD")) {
        Backend b = parse_backend(env);
        if (supported(b)) {
            return b;
        }
    }
    return best_available();
}

std::atomic<Backend> &current() {
    static std::atomic<Backend> backend{initial_backend()};
    return backend;
}

}  // namespace

std::string_view name(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return "scalar";
        case Backend::avx2:
            return "avx2";
        case Backend::neon:
            return "neon";
    }
    return "scalar";
}

Backend parse_backend(std::string_view text) {
    if (text == "scalar") return Backend::scalar;
    if (text == "avx2") return Backend::avx2;
    if (text == "neon") return Backend::neon;
    if (text == "auto") return best_available();
    throw DomainError("unknown SIMD backend '" + std::string(text) + "'");
}

bool supported(Backend backend) {
    switch (backend) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
            return cpu_has_avx2();
        case Backend::neon:
#if defined(QMSSB_HAVE_NEON)
            return true;
#else
            return false;
#endif
    }
    return false;
}

Backend best_available() {
    if (supported(Backend::avx2)) return Backend::avx2;
    if (supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Backend active() { return current().load(std::memory_order_relaxed); }

void select(Backend backend) {
    if (!supported(backend)) {
        throw DomainError("SIMD backend '" + std::string(name(backend)) + "' is not available on this CPU/build");
    }
    current().store(backend, std::memory_order_relaxed);
}

void meter_step(const MeterCoefficients &c, const MeterLanes &lanes) {
    switch (active()) {
#if defined(QMSSB_HAVE_AVX2)
        case Backend::avx2:
            return avx2::meter_step(c, lanes);
#endif
#if defined(QMSSB_HAVE_NEON)
        case Backend::neon:
            return neon::meter_step(c, lanes);
#endif
        default:
            return scalar::meter_step(c, lanes);
    }
}

void fokker_planck_step(std::span<double> density, std::span<double> flux, std::span<const double> forward,
                        std::span<const double> backward, double dt_over_h) {
    switch (active()) {
#if defined(QMSSB_HAVE_AVX2)
        case Backend::avx2:
            return avx2::fokker_planck_step(density, flux, forward, backward, dt_over_h);
#endif
#if defined(QMSSB_HAVE_NEON)
        case Backend::neon:
            return neon::fokker_planck_step(density, flux, forward, backward, dt_over_h);
#endif
        default:
            return scalar::fokker_planck_step(density, flux, forward, backward, dt_over_h);
    }
}

}  // namespace qmssb::kernels
