#include "omls/analytic.hpp"

#include <cmath>
#include <stdexcept>

namespace omls {

OmitResponse omit_steady_state(double delta, double g, const SystemParams& p,
                               std::complex<double> a_in) {
    const double kappa = p.optical.kappa;
    const double gm = p.mechanical.gamma_m;
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("omit_steady_state requires kappa > 0");
    }
    const std::complex<double> i{0.0, 1.0};
    std::complex<double> denom = 0.5 * kappa - i * delta;
    if (g != 0.0) {
        const std::complex<double> mech = 0.5 * gm - i * delta;
        if (mech == std::complex<double>{0.0, 0.0}) {
            throw std::invalid_argument(
                "undamped mechanical pole: gamma_m = 0 at two-photon "
                "resonance");
        }
        denom += g * g / mech;
    }
    OmitResponse r;
    r.detuning = delta;
    r.alpha_ss = std::sqrt(p.optical.kappa_ext) * a_in / denom;
    r.intracavity_power = std::norm(r.alpha_ss);
    r.emitted_power = p.optical.kappa_ext * r.intracavity_power;
    return r;
}

double omit_dip_width(double c, double gamma_m) {
    if (c < 0.0) {
        throw std::invalid_argument("cooperativity must be non-negative");
    }
    return (1.0 + c) * gamma_m;
}

RetrievalRate adiabatic_retrieval_rate(double g, const SystemParams& p) {
    const double kappa = p.optical.kappa;
    if (!(kappa > 0.0)) {
        throw std::invalid_argument(
            "adiabatic_retrieval_rate requires kappa > 0");
    }
    RetrievalRate r;
    r.rate = 0.5 * p.mechanical.gamma_m + 2.0 * g * g / kappa;
    r.adiabatic = 4.0 * std::abs(g) <= 0.2 * kappa;
    return r;
}

std::complex<double> mechanical_free_decay(std::complex<double> beta0,
                                           double tau, double gamma_m) {
    if (tau < 0.0) {
        throw std::invalid_argument("free decay requires tau >= 0");
    }
    return beta0 * std::exp(-0.5 * gamma_m * tau);
}

}  // namespace omls
