#include "kernels_common.hpp"

namespace qmssb::kernels::scalar {

void meter_step(const MeterCoefficients &c, const MeterLanes &lanes) {
    detail::meter_step_range(c, lanes, 0, lanes.count);
}

void fokker_planck_step(std::span<double> density, std::span<double> flux, std::span<const double> forward,
                        std::span<const double> backward, double dt_over_h) {
    const std::size_t n = density.size();
    if (n < 2) {
        return;
    }
    detail::flux_range(density.data(), flux.data(), forward.data(), backward.data(), 0, n - 1);
    detail::update_range(density.data(), flux.data(), dt_over_h, 0, n);
}

}  // namespace qmssb::kernels::scalar
