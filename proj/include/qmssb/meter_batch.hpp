#pragma once

// Lane-parallel simulation of independent meter/spin pairs. Used by the
// single-apparatus ensemble and by both sides of the EPR experiment.

#include <cstdint>
#include <span>
#include <vector>

#include "qmssb/measurement.hpp"

namespace qmssb::detail {

struct MeterLaneInit {
    std::uint64_t noise_seed = 0;
    double polarization = 0.0;  // spin expectation along B, apparatus frame
    Complex coherence{0.0, 0.0};
    double static_bias = 0.0;
};

struct MeterLaneResult {
    Readout readout = Readout::undecided;
    double final_phi = 0.0;
    double polarization = 0.0;
    Complex coherence{0.0, 0.0};
    double decision_time = 0.0;
};

/// Lanes are simulated in fixed-width chunks through kernels::meter_step;
/// each lane owns its noise stream, so a lane's result is independent of
/// which other lanes share its chunk.
std::vector<MeterLaneResult> simulate_meters(const ApparatusParams &p, double t_end, double dt,
                                             std::span<const MeterLaneInit> lanes, bool mirror_noise);

/// (polarization, coherence) of a single-spin state in the frame with S3 along B.
std::pair<double, Complex> to_apparatus_frame(const DensityMatrix &rho, const Vec3 &field);

DensityMatrix from_apparatus_frame(double polarization, Complex coherence, const Vec3 &field);

}  // namespace qmssb::detail
