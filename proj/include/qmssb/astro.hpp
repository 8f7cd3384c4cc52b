#pragma once

// Order-of-magnitude masses and radii of planets and stars from fundamental
// constants, in SI units.

namespace qmssb {

namespace si {
inline constexpr double G = 6.67430e-11;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double e = 1.602176634e-19;
inline constexpr double k0 = 8.9875517923e9;  // Coulomb constant
inline constexpr double m_e = 9.1093837015e-31;
inline constexpr double m_p = 1.67262192369e-27;
inline constexpr double k_B = 1.380649e-23;
inline constexpr double eV = 1.602176634e-19;
}  // namespace si

struct AstroEstimates {
    double planet_mass;
    double planet_radius;
    double star_mass;
    double star_radius;
    double fusion_temperature;
};

/// planet: M = e^3 k0^{3/2} / (2 sqrt2 G^{3/2} m_p^2), R = hbar^2 / (3 sqrt(2 G k0) e m_e m_p)
/// star:   M = e^3 k0^{3/2} / (8 G^{3/2} m_e^{3/2} m_p^{1/2}),
///         R = 39.5 sqrt(eV) hbar^3 / (e^3 sqrt(G) k0^{3/2} m_e^{3/2} m_p)
/// T: Coulomb energy of two protons at the proton Bohr radius, m_p k0^2 e^4 / (hbar^2 k_B).
AstroEstimates astro_estimates();

}  // namespace qmssb
