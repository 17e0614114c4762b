#pragma once

#include <complex>

#include "omls/model.hpp"

namespace omls {

// Stationary response of the coupled-mode equations with the drive on the
// red sideband (Delta = -omega_m), so the two-photon detuning equals the
// signal detuning delta.
struct OmitResponse {
    double detuning = 0.0;            // rad/us
    std::complex<double> alpha_ss{0.0, 0.0};
    double intracavity_power = 0.0;   // |alpha_ss|^2, photons
    double emitted_power = 0.0;       // kappa_ext |alpha_ss|^2, photons/us
};

// alpha_ss = sqrt(kappa_ext) A_in / [kappa/2 - i delta + G^2/(gamma_m/2 - i delta)]
// Throws std::invalid_argument on the undamped pole (gamma_m = 0, delta = 0,
// G > 0).
OmitResponse omit_steady_state(double delta, double g, const SystemParams& p,
                               std::complex<double> a_in);

// Full width at half depth of the transparency dip: (1 + C) * gamma_m.
double omit_dip_width(double c, double gamma_m);

struct RetrievalRate {
    double rate = 0.0;      // rad/us, amplitude decay of the retrieved pulse
    bool adiabatic = true;  // false when 4G/kappa > 0.2
};

// gamma_m/2 + 2 G^2/kappa: half of gamma_m + Gamma_opt with
// Gamma_opt = 4 G^2/kappa. Valid while the cavity follows the mechanics
// adiabatically (4G << kappa); out-of-regime inputs only clear the flag.
RetrievalRate adiabatic_retrieval_rate(double g, const SystemParams& p);

// Free evolution in the dark: beta(tau) = beta0 * exp(-gamma_m tau / 2),
// phase preserved in the rotating frame.
std::complex<double> mechanical_free_decay(std::complex<double> beta0,
                                           double tau, double gamma_m);

}  // namespace omls
