#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "omls/analytic.hpp"
#include "omls/dynamics.hpp"
#include "omls/numeric.hpp"
#include "omls/units.hpp"

using namespace omls;
using doctest::Approx;

namespace {

PulseSequence constant_drive(double g, double duration, double delta_drive,
                             double signal_amp = 0.0, double delta_sig = 0.0) {
    PulseSequence s;
    s.writing.envelope = {0.5, duration, g, 0.02};
    s.writing.detuning = delta_drive;
    s.signal.envelope = {0.5, duration, signal_amp, 0.02};
    s.signal.detuning = delta_sig;
    return s;
}

}  // namespace

TEST_CASE("steady state reduces to the bare cavity when G = 0") {
    const SystemParams p = sample_b();
    const auto r = omit_steady_state(0.0, 0.0, p, {1.0, 0.0});
    const cplx expected =
        std::sqrt(p.optical.kappa_ext) / (0.5 * p.optical.kappa);
    CHECK(std::abs(r.alpha_ss - expected) < 1e-15);
    CHECK(r.intracavity_power == Approx(std::norm(expected)));
    CHECK(r.emitted_power ==
          Approx(p.optical.kappa_ext * std::norm(expected)));
}

TEST_CASE("on-resonance suppression equals 1/(1+C)^2") {
    SUBCASE("sample B at G/2pi = 0.38 MHz") {
        const SystemParams p = sample_b();
        const double g = rad_per_us_from_mhz(0.38);
        const double bare =
            omit_steady_state(0.0, 0.0, p, {1.0, 0.0}).intracavity_power;
        const double on =
            omit_steady_state(0.0, g, p, {1.0, 0.0}).intracavity_power;
        // direct evaluation of the closed form at delta = 0
        CHECK(on / bare == Approx(0.5909580949152571).epsilon(1e-12));
        CHECK(on / bare == Approx(0.591).epsilon(1e-3));
    }
    SUBCASE("sample A at G/2pi = 0.77 MHz") {
        const SystemParams p = sample_a();
        const double g = rad_per_us_from_mhz(0.77);
        const double bare =
            omit_steady_state(0.0, 0.0, p, {1.0, 0.0}).intracavity_power;
        const double on =
            omit_steady_state(0.0, g, p, {1.0, 0.0}).intracavity_power;
        CHECK(on / bare == Approx(0.0010139087211775283).epsilon(1e-12));
    }
}

TEST_CASE("undamped pole at two-photon resonance is rejected") {
    SystemParams p = sample_b();
    p.mechanical = MechanicalMode(p.mechanical.omega_m, 0.0);
    CHECK_THROWS_AS(omit_steady_state(0.0, 1.0, p, {1.0, 0.0}),
                    std::invalid_argument);
    // fine off resonance or with the coupling off
    CHECK_NOTHROW(omit_steady_state(0.5, 1.0, p, {1.0, 0.0}));
    CHECK_NOTHROW(omit_steady_state(0.0, 0.0, p, {1.0, 0.0}));
}

TEST_CASE("dip width is (1 + C) gamma_m") {
    const double gm_b = rad_per_us_from_mhz(0.096);
    CHECK(omit_dip_width(0.0, gm_b) == gm_b);
    CHECK(mhz_from_rad_per_us(omit_dip_width(0.30083333333333334, gm_b)) ==
          Approx(0.12488).epsilon(1e-5));
    const double gm_a = rad_per_us_from_mhz(0.013);
    CHECK(mhz_from_rad_per_us(omit_dip_width(30.405128205128204, gm_a)) ==
          Approx(0.4082666666666666).epsilon(1e-9));
    CHECK_THROWS_AS(omit_dip_width(-0.1, gm_b), std::invalid_argument);
}

TEST_CASE("adiabatic retrieval rate gamma_m/2 + 2G^2/kappa") {
    const SystemParams p = sample_b();
    SUBCASE("free decay at G = 0") {
        CHECK(adiabatic_retrieval_rate(0.0, p).rate ==
              Approx(0.5 * p.mechanical.gamma_m));
    }
    SUBCASE("sample B operating points") {
        const auto r02 =
            adiabatic_retrieval_rate(rad_per_us_from_mhz(0.2), p);
        CHECK(mhz_from_rad_per_us(r02.rate) == Approx(0.052).epsilon(1e-9));
        CHECK(1.0 / r02.rate == Approx(3.0606719825364483).epsilon(1e-9));
        CHECK(r02.adiabatic);

        const auto r06 =
            adiabatic_retrieval_rate(rad_per_us_from_mhz(0.6), p);
        CHECK(mhz_from_rad_per_us(r06.rate) == Approx(0.084).epsilon(1e-9));
        CHECK(1.0 / r06.rate == Approx(1.8947017034749447).epsilon(1e-9));
        CHECK(r06.adiabatic);

        // faster readout shortens the retrieved pulse
        CHECK(r06.rate > r02.rate);
    }
    SUBCASE("out-of-regime coupling clears the flag") {
        const SystemParams pa = sample_a();
        CHECK(!adiabatic_retrieval_rate(rad_per_us_from_mhz(0.77), pa)
                   .adiabatic);  // 4G/kappa = 0.513
    }
}

TEST_CASE("mechanical free decay") {
    const double gm = rad_per_us_from_mhz(0.013);
    const cplx b0{0.6, -0.8};
    CHECK(mechanical_free_decay(b0, 0.0, gm) == b0);
    CHECK(std::abs(mechanical_free_decay({0.0, 0.0}, 5.0, gm)) == 0.0);

    const cplx b8 = mechanical_free_decay(b0, 8.0, gm);
    CHECK(std::norm(b8) / std::norm(b0) ==
          Approx(0.5202471603592826).epsilon(1e-12));
    CHECK(std::norm(b8) / std::norm(b0) == Approx(0.520).epsilon(1e-3));
    CHECK(std::arg(b8) == Approx(std::arg(b0)));  // phase preserved

    CHECK_THROWS_AS(mechanical_free_decay(b0, -1.0, gm),
                    std::invalid_argument);
}

TEST_CASE("integrator settles onto the closed-form steady state") {
    // 101 detunings spanning +/- 3 kappa, constant drive held for 20/gamma_m
    const SystemParams p = sample_b();
    const double g = rad_per_us_from_mhz(0.38);
    const double span = 3.0 * p.optical.kappa;
    const double duration = 34.0;  // > 20/gamma_m = 33.2 us

    const int n = 101;
    std::vector<double> rel(n);
    parallel_for(n, 0, [&](std::size_t i) {
        const double delta = -span + 2.0 * span * i / (n - 1);
        const PulseSequence s =
            constant_drive(g, duration, -p.mechanical.omega_m, 1.0, delta);
        const double dt = recommended_dt(s, p, 0.05);
        const Trajectory traj = integrate(s, p, {duration, dt});
        const double sim = std::norm(traj.alpha.back());
        const double ss =
            omit_steady_state(delta, g, p, {1.0, 0.0}).intracavity_power;
        rel[i] = std::abs(sim - ss) / ss;
    });
    for (int i = 0; i < n; ++i) {
        CAPTURE(i);
        CHECK(rel[i] < 1e-3);
    }
}

TEST_CASE("closed-form dip width matches (1+C) gamma_m within 5%") {
    const SystemParams p = sample_b();
    const double gm = p.mechanical.gamma_m;
    for (double c : {0.301, 1.0}) {
        const double g = coupling_from_cooperativity(c, gm, p.optical.kappa);
        const double w_pred = omit_dip_width(c, gm);

        // measure the full width at half depth on a fine closed-form grid
        const double span = 6.0 * w_pred;
        const int n = 40001;
        std::vector<double> depth(n), delta(n);
        for (int i = 0; i < n; ++i) {
            delta[i] = -span + 2.0 * span * i / (n - 1);
            const double s =
                omit_steady_state(delta[i], g, p, {1.0, 0.0}).intracavity_power;
            const double env =
                omit_steady_state(delta[i], 0.0, p, {1.0, 0.0})
                    .intracavity_power;
            depth[i] = env - s;
        }
        const auto dip = std::max_element(depth.begin(), depth.end());
        const double half = 0.5 * *dip;
        auto cross = [&](int dir) {
            int i = static_cast<int>(dip - depth.begin());
            while (depth[i + dir] > half) i += dir;
            const double f =
                (depth[i] - half) / (depth[i] - depth[i + dir]);
            return delta[i] + f * (delta[i + dir] - delta[i]);
        };
        const double width = cross(+1) - cross(-1);
        CHECK(std::abs(width - w_pred) / w_pred < 0.05);
    }
}

TEST_CASE("retrieved amplitude decays at the adiabatic rate") {
    // readout of a stored excitation: beta0 = 1, no input signal
    const SystemParams p = sample_b();
    for (double four_g_over_kappa : {0.04, 0.12, 0.2}) {
        const double g = 0.25 * four_g_over_kappa * p.optical.kappa;
        const PulseSequence s =
            constant_drive(g, 8.0, -p.mechanical.omega_m);
        const double dt = recommended_dt(s, p);
        const Trajectory traj =
            integrate(s, p, {6.0, dt}, ModeState{{0.0, 0.0}, {1.0, 0.0}});

        const std::size_t i0 = traj.index_at(1.5);
        const std::size_t i1 = traj.index_at(4.5);
        std::vector<double> ts, ln_b;
        for (std::size_t i = i0; i <= i1; i += 16) {
            ts.push_back(traj.times[i]);
            ln_b.push_back(std::log(std::abs(traj.beta[i])));
        }
        const double fitted = -linear_fit(ts, ln_b).slope;
        const RetrievalRate pred = adiabatic_retrieval_rate(g, p);
        CHECK(pred.adiabatic);
        CHECK(std::abs(fitted - pred.rate) / pred.rate < 0.10);
    }
}

TEST_CASE("free decay formula matches the integrator in the dark") {
    const SystemParams p = sample_a();
    const PulseSequence s = standard_sequence(SequenceKind::Fig3, p);
    const Trajectory traj = integrate(s, p, {12.6, recommended_dt(s, p)});
    const double t1 = 2.0;
    const cplx b1 = traj.beta[traj.index_at(t1)];
    for (double t2 : {4.0, 6.5, 9.0}) {
        const cplx expected =
            mechanical_free_decay(b1, t2 - t1, p.mechanical.gamma_m);
        const cplx actual = traj.beta[traj.index_at(t2)];
        CHECK(std::abs(actual - expected) / std::abs(expected) < 1e-6);
    }
}
