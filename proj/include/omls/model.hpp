#pragma once

#include <optional>
#include <string>
#include <vector>

namespace omls {

// Optical cavity mode. The cavity resonance omega0 is the frequency origin:
// every detuning in the toolkit is measured relative to it.
//
// Constructors reject negative or non-finite rates. kappa = 0 and
// kappa_ext > kappa are representable (lossless test configurations need
// them); validate_params reports them.
struct OpticalMode {
    double kappa;      // total decay rate, rad/us
    double kappa_ext;  // external output coupling, rad/us

    OpticalMode(double kappa_total, double kappa_external);
};

struct MechanicalMode {
    double omega_m;  // rad/us
    double gamma_m;  // rad/us

    MechanicalMode(double omega, double gamma);
};

// Drive power -> effective coupling rate G. The default route is a single
// reference pair (P_ref, G_ref) with G = G_ref * sqrt(P/P_ref); the
// microscopic route g_om * x_zpf * sqrt(n_c) is available when those device
// numbers are known.
struct CouplingCalibration {
    double p_ref_mw = 1.0;
    double g_ref = 0.0;  // rad/us at p_ref_mw

    std::optional<double> g_om;            // rad/us per displacement unit
    std::optional<double> x_zpf;           // zero-point displacement
    std::optional<double> photons_per_mw;  // intracavity n_c per mW of drive

    static CouplingCalibration from_reference(double p_ref_mw, double g_ref);
    static CouplingCalibration from_microscopic(double g_om, double x_zpf,
                                                double photons_per_mw);
};

struct SystemParams {
    OpticalMode optical;
    MechanicalMode mechanical;
    CouplingCalibration calibration;
    std::string label;
    double wavelength_nm = 800.0;  // sets the photon flux of signal powers
};

// C = 4 G^2 / (gamma_m * kappa). Throws std::invalid_argument for
// non-positive gamma_m or kappa.
double cooperativity(double g, double gamma_m, double kappa);

// Inverse of the above: G = sqrt(C * gamma_m * kappa) / 2.
double coupling_from_cooperativity(double c, double gamma_m, double kappa);

// G(P) = G_ref * sqrt(P / P_ref). Throws for negative power.
double coupling_rate_from_power(double p_mw, const CouplingCalibration& cal);

// Signal amplitude sqrt(photons/us) carried by p_mw at the system wavelength.
double signal_amplitude_from_power(double p_mw, const SystemParams& p);

struct ValidationCheck {
    std::string name;
    bool passed = true;
    bool hard = false;  // positivity violations; everything else is advisory
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationCheck> checks;
    double sideband_ratio = 0.0;  // omega_m / kappa

    bool all_passed() const;
    bool hard_failure() const;
    std::string to_string() const;
};

// Pure inspection: positivity, overcoupling bound kappa_ext <= kappa, and
// the resolved-sideband ratio omega_m / kappa.
ValidationReport validate_params(const SystemParams& p);

// Device presets. kappa_ext defaults to kappa/2 (critical coupling); it is
// not known independently and stays overridable.
SystemParams sample_a();
SystemParams sample_b();
SystemParams preset_by_label(const std::string& label);
std::vector<std::string> preset_labels();

}  // namespace omls
