#include <doctest.h>

#include <random>
#include <stdexcept>

#include "omls/model.hpp"
#include "omls/units.hpp"

using namespace omls;

TEST_CASE("cooperativity evaluates the device presets") {
    CHECK(cooperativity(0.0, 1.0, 2.0) == 0.0);

    // sample B (fig. 5 parameters): 4 * 0.38^2 / (0.096 * 20)
    const double c_b =
        cooperativity(rad_per_us_from_mhz(0.38), rad_per_us_from_mhz(0.096),
                      rad_per_us_from_mhz(20.0));
    CHECK(c_b == doctest::Approx(0.30083333333333334).epsilon(1e-12));
    CHECK(c_b == doctest::Approx(0.301).epsilon(2e-3));

    // sample A (fig. 3 parameters)
    const double c_a =
        cooperativity(rad_per_us_from_mhz(0.77), rad_per_us_from_mhz(0.013),
                      rad_per_us_from_mhz(6.0));
    CHECK(c_a == doctest::Approx(30.405128205128204).epsilon(1e-12));
    CHECK(c_a == doctest::Approx(30.4).epsilon(2e-3));

    CHECK_THROWS_AS(cooperativity(1.0, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(cooperativity(1.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("cooperativity scales quadratically in G") {
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> dist(1e-3, 1e3);
    for (int i = 0; i < 200; ++i) {
        const double g = dist(rng), gm = dist(rng), k = dist(rng);
        CHECK(cooperativity(2.0 * g, gm, k) == 4.0 * cooperativity(g, gm, k));
    }
}

TEST_CASE("coupling_from_cooperativity inverts cooperativity") {
    const double gm = rad_per_us_from_mhz(0.096);
    const double k = rad_per_us_from_mhz(20.0);
    for (double c : {0.1, 0.301, 1.0, 10.0, 30.4}) {
        const double g = coupling_from_cooperativity(c, gm, k);
        CHECK(cooperativity(g, gm, k) == doctest::Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("coupling rate follows the square root of power") {
    const auto cal =
        CouplingCalibration::from_reference(1.6, rad_per_us_from_mhz(0.45));

    CHECK(coupling_rate_from_power(0.0, cal) == 0.0);

    // single calibration point predicts the other reported operating points
    const double g29 = mhz_from_rad_per_us(coupling_rate_from_power(2.9, cal));
    CHECK(g29 == doctest::Approx(0.6058310408026317).epsilon(1e-12));
    CHECK(std::abs(g29 - 0.6) / 0.6 < 0.10);

    const double g12 = mhz_from_rad_per_us(coupling_rate_from_power(1.2, cal));
    CHECK(g12 == doctest::Approx(0.3897114317029974).epsilon(1e-12));
    CHECK(std::abs(g12 - 0.38) / 0.38 < 0.10);

    const double g03 = mhz_from_rad_per_us(coupling_rate_from_power(0.3, cal));
    CHECK(std::abs(g03 - 0.2) / 0.2 < 0.10);

    CHECK_THROWS_AS(coupling_rate_from_power(-1.0, cal),
                    std::invalid_argument);
}

TEST_CASE("coupling rate is homogeneous: G(s^2 P) = s G(P)") {
    const auto cal = CouplingCalibration::from_reference(6.0, 4.84);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> dist(1e-3, 1e2);
    for (int i = 0; i < 200; ++i) {
        const double p = dist(rng), s = dist(rng);
        const double lhs = coupling_rate_from_power(s * s * p, cal);
        const double rhs = s * coupling_rate_from_power(p, cal);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-13));
    }
}

TEST_CASE("microscopic calibration route matches g_om x_zpf sqrt(n_c)") {
    const auto cal = CouplingCalibration::from_microscopic(2.0, 0.5, 9.0);
    // 1 mW -> 2 * 0.5 * 3
    CHECK(coupling_rate_from_power(1.0, cal) == doctest::Approx(3.0));
    CHECK(coupling_rate_from_power(4.0, cal) == doctest::Approx(6.0));
}

TEST_CASE("validate_params passes both presets") {
    const auto ra = validate_params(sample_a());
    CHECK(ra.all_passed());
    CHECK(!ra.hard_failure());
    CHECK(ra.sideband_ratio == doctest::Approx(160.0 / 6.0).epsilon(1e-12));

    const auto rb = validate_params(sample_b());
    CHECK(rb.all_passed());
    CHECK(rb.sideband_ratio == doctest::Approx(160.9 / 20.0).epsilon(1e-12));
}

TEST_CASE("validate_params flags an overcoupled kappa_ext") {
    SystemParams p = sample_a();
    p.optical = OpticalMode(p.optical.kappa, 2.0 * p.optical.kappa);
    const auto r = validate_params(p);
    CHECK(!r.all_passed());
    CHECK(!r.hard_failure());  // advisory, not positivity
    bool overcoupling_failed = false;
    for (const auto& c : r.checks) {
        if (c.name.find("overcoupling") != std::string::npos) {
            overcoupling_failed = !c.passed;
        }
    }
    CHECK(overcoupling_failed);
}

TEST_CASE("validate_params reports kappa = 0 as a hard failure") {
    SystemParams p = sample_a();
    p.optical = OpticalMode(0.0, 0.0);
    const auto r = validate_params(p);
    CHECK(r.hard_failure());
}

TEST_CASE("constructors reject negative rates") {
    CHECK_THROWS_AS(OpticalMode(-1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(OpticalMode(1.0, -0.5), std::invalid_argument);
    CHECK_THROWS_AS(MechanicalMode(0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(MechanicalMode(1.0, -0.1), std::invalid_argument);
    CHECK_THROWS_AS(CouplingCalibration::from_reference(0.0, 1.0),
                    std::invalid_argument);
}

TEST_CASE("presets resolve by label") {
    CHECK(preset_by_label("sample-a").label == "sample-a");
    CHECK(preset_by_label("sample-b").label == "sample-b");
    CHECK_THROWS_AS(preset_by_label("sample-c"), std::invalid_argument);
    CHECK(preset_labels().size() == 2);
    // kappa_ext defaults to critical coupling
    const auto b = sample_b();
    CHECK(b.optical.kappa_ext == doctest::Approx(0.5 * b.optical.kappa));
}

TEST_CASE("photon flux conversion at 800 nm") {
    CHECK(photon_flux_per_mw(800.0) ==
          doctest::Approx(4.0272932540341673e9).epsilon(1e-9));
    const double amp = signal_amplitude_from_power(0.1, sample_a());
    CHECK(amp * amp == doctest::Approx(0.1 * photon_flux_per_mw(800.0)));
    CHECK_THROWS_AS(signal_amplitude_from_power(-0.1, sample_a()),
                    std::invalid_argument);
}
