#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "omls/scenarios.hpp"
#include "omls/units.hpp"

using namespace omls;
using doctest::Approx;

namespace {

GateConfig fig3_gate(const SystemParams& p) {
    GateConfig g;
    g.gate_start = 0.0;
    g.gate_length = 0.1;
    g.rbw_mhz = 30.0;
    g.center_mhz = mhz_from_rad_per_us(p.mechanical.omega_m);
    return g;
}

GateConfig omit_gate(const PulseSequence& probe) {
    GateConfig g;
    g.gate_start = probe.writing.envelope.t_start + 6.5;
    g.gate_length = 1.0;
    g.rbw_mhz = 10.0;
    return g;
}

GateConfig storage_gate(const SystemParams& p, const PulseSequence& seq) {
    GateConfig g;
    const auto& r = *seq.readout;
    g.gate_length = 1.0;
    g.gate_start = r.envelope.t_start + 0.5 * (r.envelope.duration - 1.0);
    g.rbw_mhz = 10.0;
    g.center_mhz = mhz_from_rad_per_us(p.mechanical.omega_m);
    return g;
}

}  // namespace

TEST_CASE("light storage with no coupling stores and retrieves nothing") {
    const SystemParams p = sample_a();
    SequenceOverrides o;
    o.write_g = 0.0;
    o.readout_g = 0.0;
    const PulseSequence s = standard_sequence(SequenceKind::Fig3, p, o);
    const StorageResult r = run_light_storage(p, s, fig3_gate(p));
    CHECK(r.stored_phonons_at_readout == 0.0);
    // only the long-dead cavity tail of the signal reaches the window
    CHECK(r.retrieved_energy < 1e-30);
}

TEST_CASE("fig3 storage decays by exp(-gamma_m tau) over the 8 us delay") {
    const SystemParams p = sample_a();
    const PulseSequence s = standard_sequence(SequenceKind::Fig3, p);
    const StorageResult r = run_light_storage(p, s, fig3_gate(p));

    const double write_end =
        s.writing.envelope.t_start + s.writing.envelope.duration;
    const double stored_at_write_end =
        std::norm(r.trajectory.beta[r.trajectory.index_at(write_end)]);
    const double ratio = r.stored_phonons_at_readout / stored_at_write_end;
    CHECK(ratio == Approx(0.520).epsilon(5e-3));

    // the retrieved burst lives inside the readout window only
    const auto power = r.trajectory.emitted_power_series();
    const std::size_t dark0 = r.trajectory.index_at(2.5);
    const std::size_t dark1 = r.trajectory.index_at(9.3);
    const double dark_peak =
        *std::max_element(power.begin() + dark0, power.begin() + dark1);
    const std::size_t ro0 = r.trajectory.index_at(r.readout_window_begin);
    const std::size_t ro1 = r.trajectory.index_at(r.readout_window_end);
    const double ret_peak =
        *std::max_element(power.begin() + ro0, power.begin() + ro1);
    CHECK(ret_peak > 1e6 * dark_peak);

    // physical bound: at most kappa_ext/kappa of the stored excitation exits
    CHECK(r.retrieved_energy <=
          (p.optical.kappa_ext / p.optical.kappa) *
              r.stored_phonons_at_readout * (1.0 + 1e-9));
}

TEST_CASE("retrieved energy vs delay fits exp(-gamma_m tau)") {
    const SystemParams p = sample_a();
    const PulseSequence base = standard_sequence(SequenceKind::Fig3, p);
    const std::vector<double> delays{0.0, 8.0, 16.0, 24.0, 32.0};
    const DelaySeries series = storage_energy_vs_delay(p, base, delays);

    CHECK(std::abs(series.fitted_rate - p.mechanical.gamma_m) /
              p.mechanical.gamma_m <
          0.01);
    // zero delay retrieves the most
    for (std::size_t i = 1; i < series.retrieved_energy.size(); ++i) {
        CHECK(series.retrieved_energy[i] < series.retrieved_energy[i - 1]);
    }
    CHECK(series.retrieved_energy.front() ==
          *std::max_element(series.retrieved_energy.begin(),
                            series.retrieved_energy.end()));
}

TEST_CASE("a lossless mechanical mode stores forever") {
    SystemParams p = sample_a();
    p.mechanical = MechanicalMode(p.mechanical.omega_m, 0.0);
    const PulseSequence base = standard_sequence(SequenceKind::Fig3, p);
    // delays long enough that the signal tail never enters the readout
    const std::vector<double> delays{8.0, 16.0, 24.0};
    const DelaySeries series = storage_energy_vs_delay(p, base, delays);
    CHECK(std::abs(series.fitted_rate) < 1e-6);
    CHECK(series.retrieved_energy[2] ==
          Approx(series.retrieved_energy[0]).epsilon(1e-6));
}

TEST_CASE("readout series: faster coupling drains the excitation faster") {
    const SystemParams p = sample_b();
    const std::vector<double> gs{rad_per_us_from_mhz(0.2),
                                 rad_per_us_from_mhz(0.45),
                                 rad_per_us_from_mhz(0.6)};
    const auto traces = run_readout_series(p, gs);
    REQUIRE(traces.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(traces[i].adiabatic);
        CHECK(std::abs(traces[i].fitted_rate - traces[i].predicted_rate) /
                  traces[i].predicted_rate <
              0.10);
        if (i > 0) CHECK(traces[i].fitted_rate > traces[i - 1].fitted_rate);
    }
}

TEST_CASE("zero readout power retrieves no light") {
    const SystemParams p = sample_b();
    const std::vector<double> gs{0.0};
    const auto traces = run_readout_series(p, gs);
    double v_max = 0.0;
    for (double v : traces[0].beats.voltage) {
        v_max = std::max(v_max, std::abs(v));
    }
    CHECK(v_max == 0.0);
}

TEST_CASE("omit sweep shows the transparency dip at two-photon resonance") {
    const SystemParams p = sample_b();
    const double g = rad_per_us_from_mhz(0.38);  // C ~ 0.301
    const auto grid = default_detuning_grid(p, g, 0.0, 101, 41);
    const PulseSequence probe =
        standard_sequence(SequenceKind::Fig5Omit, p);
    const Spectrum spec = run_omit_sweep(p, g, grid, omit_gate(probe));
    CHECK(!spec.steady_state_warning);
    CHECK(std::is_sorted(spec.detuning_mhz.begin(), spec.detuning_mhz.end()));

    const DipMeasurement dip = measure_omit_dip(spec, p);
    // dip floor sits at 1/(1+C)^2 of the local envelope
    CHECK(dip.depth_ratio == Approx(0.591).epsilon(0.03));
    // dip centered at two-photon resonance, one grid step of slack
    CHECK(std::abs(dip.position_mhz) < 0.02);
    // full width at half depth ~ (1+C) gamma_m
    CHECK(dip.width_mhz == Approx(0.12488).epsilon(0.05));
}

TEST_CASE("omit sweep without coupling is the bare cavity line") {
    const SystemParams p = sample_b();
    const auto grid = default_detuning_grid(p, 0.0, 0.0, 61, 0);
    const PulseSequence probe =
        standard_sequence(SequenceKind::Fig5Omit, p);
    const Spectrum spec = run_omit_sweep(p, 0.0, grid, omit_gate(probe));

    // shape matches a Lorentzian of width kappa (amplitude-matched at peak)
    const double half_k = 0.5 * p.optical.kappa;
    const auto imax = std::max_element(spec.power.begin(), spec.power.end());
    const double scale = *imax * (half_k * half_k);
    for (std::size_t i = 0; i < spec.power.size(); ++i) {
        const double d = rad_per_us_from_mhz(spec.detuning_mhz[i]);
        const double model = scale / (half_k * half_k + d * d);
        CHECK(spec.power[i] == Approx(model).epsilon(0.02));
    }
    CHECK(fit_cooperativity(spec, p).c < 0.01);
}

TEST_CASE("storage sweep peaks where the omit spectrum dips") {
    const SystemParams p = sample_b();
    const double g = rad_per_us_from_mhz(0.38);
    const auto grid = default_detuning_grid(p, g, 0.0, 61, 41);

    const PulseSequence probe = standard_sequence(SequenceKind::Fig5Omit, p);
    const Spectrum omit = run_omit_sweep(p, g, grid, omit_gate(probe));
    const PulseSequence st = standard_sequence(SequenceKind::Fig5Storage, p);
    const Spectrum storage =
        run_storage_sweep(p, grid, storage_gate(p, st));

    const double dip = measure_omit_dip(omit, p).position_mhz;
    const double peak = spectrum_peak_mhz(storage);

    // one grid step of slack; the refined grid spacing near resonance
    const double c = cooperativity(g, p.mechanical.gamma_m, p.optical.kappa);
    const double step =
        mhz_from_rad_per_us(6.0 * (1.0 + c) * p.mechanical.gamma_m / 40.0);
    CHECK(std::abs(peak - dip) <= step * (1.0 + 1e-9));

    // far-detuned signals are not stored
    const auto imax =
        std::max_element(storage.power.begin(), storage.power.end());
    const double far = storage.power.front();
    CHECK(far < 0.01 * *imax);
}

TEST_CASE("fit recovers the cooperativity from noiseless spectra") {
    const SystemParams p = sample_b();
    const double gm = p.mechanical.gamma_m;
    for (double c_true : {0.1, 0.301, 1.0, 10.0, 30.4}) {
        const double g =
            coupling_from_cooperativity(c_true, gm, p.optical.kappa);
        const auto grid = default_detuning_grid(p, g);
        Spectrum spec;
        spec.kind = SpectrumKind::Omit;
        for (double d : grid) {
            spec.detuning_mhz.push_back(mhz_from_rad_per_us(d));
            spec.power.push_back(
                7.3 * omit_steady_state(d, g, p, {1.0, 0.0}).intracavity_power);
        }
        const CooperativityFit fit = fit_cooperativity(spec, p);
        CHECK(std::abs(fit.c - c_true) / c_true < 0.01);
        CHECK(fit.scale == Approx(7.3).epsilon(1e-3));
        CHECK(fit.iterations > 0);
    }

    // C = 0 round-trips to (numerically) zero
    Spectrum flat;
    flat.kind = SpectrumKind::Omit;
    for (double d : default_detuning_grid(p, 0.0)) {
        flat.detuning_mhz.push_back(mhz_from_rad_per_us(d));
        flat.power.push_back(
            2.0 * omit_steady_state(d, 0.0, p, {1.0, 0.0}).intracavity_power);
    }
    CHECK(fit_cooperativity(flat, p).c < 1e-3);
}

TEST_CASE("tight fit round-trip at the published cooperativity") {
    const SystemParams p = sample_b();
    const double g = rad_per_us_from_mhz(0.38);
    const double c_true =
        cooperativity(g, p.mechanical.gamma_m, p.optical.kappa);
    Spectrum spec;
    for (double d : default_detuning_grid(p, g)) {
        spec.detuning_mhz.push_back(mhz_from_rad_per_us(d));
        spec.power.push_back(
            omit_steady_state(d, g, p, {1.0, 0.0}).intracavity_power);
    }
    const CooperativityFit fit = fit_cooperativity(spec, p);
    CHECK(std::abs(fit.c - c_true) / c_true < 1e-3);
}

TEST_CASE("sweeps are bitwise identical in serial and parallel") {
    const SystemParams p = sample_b();
    const double g = rad_per_us_from_mhz(0.38);
    const auto grid = default_detuning_grid(p, g, 0.0, 15, 7);
    const PulseSequence probe = standard_sequence(SequenceKind::Fig5Omit, p);
    const Spectrum serial = run_omit_sweep(p, g, grid, omit_gate(probe), {}, 1);
    const Spectrum parallel =
        run_omit_sweep(p, g, grid, omit_gate(probe), {}, 4);
    CHECK(serial.power == parallel.power);
    CHECK(serial.detuning_mhz == parallel.detuning_mhz);
}

TEST_CASE("default detuning grid is strictly increasing and refined") {
    const SystemParams p = sample_b();
    const double g = rad_per_us_from_mhz(0.38);
    const auto grid = default_detuning_grid(p, g);
    CHECK(grid.size() >= 201);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        CHECK(grid[i] > grid[i - 1]);
    }
    CHECK(grid.front() == Approx(-3.0 * p.optical.kappa));
    CHECK(grid.back() == Approx(3.0 * p.optical.kappa));
}
