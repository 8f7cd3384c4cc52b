#pragma once

// Data-parallel inner loops. Every backend performs the same IEEE operations
// in the same order (no FMA, no reassociation), so results are bit-identical
// across backends and a trajectory does not depend on which lane or batch it
// ran in.

#include <cstddef>
#include <span>
#include <string_view>

namespace qmssb::kernels {

enum class Backend { scalar, avx2, neon };

std::string_view name(Backend backend);
/// Parses "scalar", "avx2", "neon" or "auto".
Backend parse_backend(std::string_view text);
bool supported(Backend backend);
Backend best_available();

/// Backend used by the dispatching entry points. Initialized from QMSSB_SIMD
/// (default auto).
Backend active();
void select(Backend backend);

/// One explicit step of the meter/spin pair for a batch of independent lanes.
///
///   phi  <- phi + (gamma phi - cubic phi^3 + static_bias + coupling s) dt + noise
///   s    <- s_eq + (s - s_eq) pop_decay
///   coh  <- coh exp(-i rot) coh_decay
///
/// s is the spin polarization along the apparatus axis and coh the off-diagonal
/// element of the 2x2 density matrix in that frame. The drift uses the values
/// from before the step.
struct MeterCoefficients {
    double gamma;
    double cubic;     // lambda / 6
    double coupling;  // mu |B|
    double dt;
    double rot_cos;
    double rot_sin;
};

struct MeterLanes {
    double *phi;
    double *polarization;
    double *coh_re;
    double *coh_im;
    const double *static_bias;
    const double *noise;
    const double *pol_eq;
    const double *pop_decay;
    const double *coh_decay;
    std::size_t count;
};

void meter_step(const MeterCoefficients &c, const MeterLanes &lanes);

/// Explicit conservative update of a cell-centered density with two-point
/// face fluxes F_j = forward_j P_j - backward_j P_{j+1} and zero flux at both
/// walls:  P_i <- P_i + dt_over_h (F_{i-1} - F_i).
/// `flux` is scratch of size density.size() - 1.
void fokker_planck_step(std::span<double> density, std::span<double> flux, std::span<const double> forward,
                        std::span<const double> backward, double dt_over_h);

namespace scalar {
void meter_step(const MeterCoefficients &c, const MeterLanes &lanes);
void fokker_planck_step(std::span<double> density, std::span<double> flux, std::span<const double> forward,
                        std::span<const double> backward, double dt_over_h);
}  // namespace scalar

namespace avx2 {
void meter_step(const MeterCoefficients &c, const MeterLanes &lanes);
void fokker_planck_step(std::span<double> density, std::span<double> flux, std::span<const double> forward,
                        std::span<const double> backward, double dt_over_h);
}  // namespace avx2

namespace neon {
void meter_step(const MeterCoefficients &c, const MeterLanes &lanes);
void fokker_planck_step(std::span<double> density, std::span<double> flux, std::span<const double> forward,
                        std::span<const double> backward, double dt_over_h);
}  // namespace neon

}  // namespace qmssb::kernels
