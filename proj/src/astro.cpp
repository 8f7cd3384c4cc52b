#include "qmssb/astro.hpp"

#include <cmath>

namespace qmssb {

AstroEstimates astro_estimates() {
    using namespace si;
    const double e3 = e * e * e;
    const double k0_32 = std::pow(k0, 1.5);
    const double G_32 = std::pow(G, 1.5);
    const double me_32 = std::pow(m_e, 1.5);

    AstroEstimates a{};
    a.planet_mass = e3 * k0_32 / (2.0 * std::sqrt(2.0) * G_32 * m_p * m_p);
    a.planet_radius = hbar * hbar / (3.0 * std::sqrt(2.0 * G * k0) * e * m_e * m_p);
    a.star_mass = e3 * k0_32 / (8.0 * G_32 * me_32 * std::sqrt(m_p));
    a.star_radius = 39.5 * std::sqrt(eV) * hbar * hbar * hbar / (e3 * std::sqrt(G) * k0_32 * me_32 * m_p);
    a.fusion_temperature = m_p * k0 * k0 * e * e * e * e / (hbar * hbar * k_B);
    return a;
}

}  // namespace qmssb
