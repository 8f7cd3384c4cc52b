#pragma once

// One-dimensional Fokker-Planck solver for the meter density,
//   dP/dt = -d/dphi[(gamma phi - lambda phi^3 / 6 + bias) P] + (epsilon / 2) d2P/dphi2.

#include <cstddef>
#include <optional>
#include <vector>

#include "qmssb/measurement.hpp"

namespace qmssb {

struct FokkerPlanckOptions {
    /// Number of cells; must be even so the grid is mirror symmetric about 0.
    std::size_t cells = 1200;
    /// Grid covers [-half_width, half_width]; default 3 phi_+.
    std::optional<double> half_width;
    /// Standard deviation of the initial Gaussian centred at 0.
    double initial_width = 0.02;
    /// Fixed time step; default is 0.9 of the positivity limit.
    std::optional<double> dt;
};

struct FokkerPlanckResult {
    std::vector<double> phi;      // cell centres
    std::vector<double> density;  // P at the centres
    double h = 0.0;
    double time = 0.0;
    std::size_t steps = 0;

    double mass() const;
    /// Integral of P over phi > 0.
    double mass_positive() const;
    double mean() const;
    double variance() const;
    double median() const;
};

/// Drift gamma phi - (lambda / 6) phi^3 + bias without the sign constraints of
/// ApparatusParams, e.g. gamma < 0 and lambda = 0 for the Ornstein-Uhlenbeck case.
struct DriftModel {
    double gamma = 1.0;
    double lambda = 6.0;
    double bias = 0.0;
    double epsilon = 0.01;
};

/// Scharfetter-Gummel fluxes, explicit in time. Throws StepSizeError when a
/// density value falls below -1e-8 and DomainError for a malformed grid.
FokkerPlanckResult fokker_planck_solve(const DriftModel &model, double t, const FokkerPlanckOptions &options = {});

FokkerPlanckResult fokker_planck_solve(const ApparatusParams &p, double bias, double t,
                                       const FokkerPlanckOptions &options = {});

/// Largest stable explicit step for the given model and grid.
double fokker_planck_max_dt(const DriftModel &model, const FokkerPlanckOptions &options);

}  // namespace qmssb
