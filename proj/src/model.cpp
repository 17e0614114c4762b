#include "omls/model.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "omls/units.hpp"

namespace omls {

double photon_flux_per_mw(double wavelength_nm) {
    if (wavelength_nm <= 0.0) {
        throw std::invalid_argument("wavelength must be positive");
    }
    constexpr double h = 6.62607015e-34;  // J s
    constexpr double c = 299792458.0;     // m/s
    const double photon_energy = h * c / (wavelength_nm * 1e-9);  // J
    return 1e-3 / photon_energy * 1e-6;  // photons/us per mW
}

namespace {

void require_finite_nonnegative(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument(std::string(name) +
                                    " must be finite and non-negative");
    }
}

}  // namespace

OpticalMode::OpticalMode(double kappa_total, double kappa_external)
    : kappa(kappa_total), kappa_ext(kappa_external) {
    require_finite_nonnegative(kappa_total, "kappa");
    require_finite_nonnegative(kappa_external, "kappa_ext");
}

MechanicalMode::MechanicalMode(double omega, double gamma)
    : omega_m(omega), gamma_m(gamma) {
    if (!std::isfinite(omega) || omega <= 0.0) {
        throw std::invalid_argument("omega_m must be positive");
    }
    require_finite_nonnegative(gamma, "gamma_m");
}

CouplingCalibration CouplingCalibration::from_reference(double p_ref_mw,
                                                        double g_ref) {
    if (!(p_ref_mw > 0.0)) {
        throw std::invalid_argument("reference power must be positive");
    }
    require_finite_nonnegative(g_ref, "G_ref");
    CouplingCalibration cal;
    cal.p_ref_mw = p_ref_mw;
    cal.g_ref = g_ref;
    return cal;
}

CouplingCalibration CouplingCalibration::from_microscopic(
    double g_om, double x_zpf, double photons_per_mw) {
    require_finite_nonnegative(g_om, "g_om");
    require_finite_nonnegative(x_zpf, "x_zpf");
    require_finite_nonnegative(photons_per_mw, "photons_per_mw");
    CouplingCalibration cal;
    cal.g_om = g_om;
    cal.x_zpf = x_zpf;
    cal.photons_per_mw = photons_per_mw;
    // Equivalent reference pair at 1 mW, so both routes share one formula.
    cal.p_ref_mw = 1.0;
    cal.g_ref = g_om * x_zpf * std::sqrt(photons_per_mw);
    return cal;
}

double cooperativity(double g, double gamma_m, double kappa) {
    if (!(gamma_m > 0.0) || !(kappa > 0.0)) {
        throw std::invalid_argument(
            "cooperativity requires positive gamma_m and kappa");
    }
    return 4.0 * g * g / (gamma_m * kappa);
}

double coupling_from_cooperativity(double c, double gamma_m, double kappa) {
    if (c < 0.0) {
        throw std::invalid_argument("cooperativity must be non-negative");
    }
    return 0.5 * std::sqrt(c * gamma_m * kappa);
}

double coupling_rate_from_power(double p_mw, const CouplingCalibration& cal) {
    if (!std::isfinite(p_mw) || p_mw < 0.0) {
        throw std::invalid_argument("drive power must be non-negative");
    }
    return cal.g_ref * std::sqrt(p_mw / cal.p_ref_mw);
}

double signal_amplitude_from_power(double p_mw, const SystemParams& p) {
    if (!std::isfinite(p_mw) || p_mw < 0.0) {
        throw std::invalid_argument("signal power must be non-negative");
    }
    return std::sqrt(p_mw * photon_flux_per_mw(p.wavelength_nm));
}

bool ValidationReport::all_passed() const {
    for (const auto& c : checks) {
        if (!c.passed) return false;
    }
    return true;
}

bool ValidationReport::hard_failure() const {
    for (const auto& c : checks) {
        if (!c.passed && c.hard) return true;
    }
    return false;
}

std::string ValidationReport::to_string() const {
    std::ostringstream os;
    for (const auto& c : checks) {
        os << (c.passed ? "pass" : (c.hard ? "FAIL" : "warn")) << "  "
           << c.name;
        if (!c.detail.empty()) os << ": " << c.detail;
        os << '\n';
    }
    return os.str();
}

ValidationReport validate_params(const SystemParams& p) {
    ValidationReport r;
    const double kappa = p.optical.kappa;
    const double kext = p.optical.kappa_ext;
    const double wm = p.mechanical.omega_m;
    const double gm = p.mechanical.gamma_m;

    auto add = [&r](std::string name, bool ok, bool hard, std::string detail) {
        r.checks.push_back({std::move(name), ok, hard, std::move(detail)});
    };

    add("kappa > 0", kappa > 0.0, true, "");
    add("kappa_ext > 0", kext > 0.0, true, "");
    add("omega_m > 0", wm > 0.0, true, "");
    add("gamma_m >= 0", gm >= 0.0, true, "");

    std::ostringstream oc;
    oc << "kappa_ext/kappa = " << (kappa > 0.0 ? kext / kappa : 0.0);
    add("overcoupling bound kappa_ext <= kappa", kext <= kappa, false, oc.str());

    r.sideband_ratio = kappa > 0.0 ? wm / kappa : 0.0;
    std::ostringstream os;
    os << "omega_m/kappa = " << r.sideband_ratio;
    add("resolved sideband omega_m > kappa", wm > kappa, false, os.str());

    if (gm > 0.0) {
        std::ostringstream oq;
        oq << "omega_m/gamma_m = " << wm / gm;
        add("high mechanical Q omega_m >> gamma_m", wm / gm > 1e3, false,
            oq.str());
    }
    return r;
}

SystemParams sample_a() {
    SystemParams p{
        OpticalMode(rad_per_us_from_mhz(6.0), rad_per_us_from_mhz(3.0)),
        MechanicalMode(rad_per_us_from_mhz(160.0), rad_per_us_from_mhz(0.013)),
        // Writing/readout at 6 mW correspond to G/2pi = 0.77 MHz.
        CouplingCalibration::from_reference(6.0, rad_per_us_from_mhz(0.77)),
        "sample-a"};
    return p;
}

SystemParams sample_b() {
    SystemParams p{
        OpticalMode(rad_per_us_from_mhz(20.0), rad_per_us_from_mhz(10.0)),
        MechanicalMode(rad_per_us_from_mhz(160.9), rad_per_us_from_mhz(0.096)),
        // 1.6 mW of readout power corresponds to G/2pi = 0.45 MHz.
        CouplingCalibration::from_reference(1.6, rad_per_us_from_mhz(0.45)),
        "sample-b"};
    return p;
}

SystemParams preset_by_label(const std::string& label) {
    if (label == "sample-a") return sample_a();
    if (label == "sample-b") return sample_b();
    throw std::invalid_argument("unknown sample preset: " + label);
}

std::vector<std::string> preset_labels() { return {"sample-a", "sample-b"}; }

}  // namespace omls
