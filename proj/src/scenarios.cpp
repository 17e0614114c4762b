#include "omls/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "omls/csv.hpp"
#include "omls/numeric.hpp"
#include "omls/units.hpp"

namespace omls {

void spectrum_to_csv(const Spectrum& spec, const std::string& path) {
    const std::vector<std::string> names{"detuning_mhz", "power"};
    const std::vector<std::vector<double>> cols{spec.detuning_mhz, spec.power};
    write_csv(path, names, cols);
}

namespace {

struct ReadoutWindow {
    double begin;
    double end;
};

ReadoutWindow readout_window(const PulseSequence& s, const SystemParams& p,
                             double t_end) {
    const auto& r = *s.readout;
    // include the cavity ring-down tail after the envelope closes
    const double tail = p.optical.kappa > 0.0 ? 10.0 / p.optical.kappa : 1.0;
    return {r.envelope.support_begin(),
            std::min(t_end, r.envelope.support_end() + tail)};
}

double energy_over_window(const Trajectory& traj, ReadoutWindow w) {
    const std::size_t i0 = traj.index_at(w.begin);
    const std::size_t i1 = traj.index_at(w.end);
    if (i1 <= i0 + 1) return 0.0;
    std::vector<double> seg(i1 - i0 + 1);
    for (std::size_t i = i0; i <= i1; ++i) {
        seg[i - i0] = traj.emitted_power_at(i);
    }
    return trapezoid(seg, traj.dt);
}

}  // namespace

StorageResult run_light_storage(const SystemParams& p, const PulseSequence& s,
                                const GateConfig& gate,
                                const StorageRunOptions& opt) {
    s.validate();
    const double dt = opt.dt.value_or(recommended_dt(s, p));
    const double t_end = opt.t_end.value_or(suggested_t_end(s));
    StorageResult result;
    result.trajectory = integrate(s, p, {t_end, dt});
    result.beats = synthesize_beat(result.trajectory, p, opt.lo_amp,
                                   opt.samples_per_period);
    result.scan = gated_power_scan(result.beats, gate, opt.scan_step);
    if (s.readout) {
        const ReadoutWindow w = readout_window(s, p, t_end);
        result.readout_window_begin = w.begin;
        result.readout_window_end = w.end;
        result.retrieved_energy = energy_over_window(result.trajectory, w);
        const std::size_t ir =
            result.trajectory.index_at(s.readout->envelope.t_start);
        result.stored_phonons_at_readout =
            std::norm(result.trajectory.beta[ir]);
    }
    return result;
}

DelaySeries storage_energy_vs_delay(const SystemParams& p,
                                    const PulseSequence& base,
                                    std::span<const double> delays,
                                    unsigned threads) {
    if (!base.readout) {
        throw std::invalid_argument(
            "delay series requires a sequence with a readout pulse");
    }
    for (double d : delays) {
        if (d < 0.0) throw std::invalid_argument("delays must be >= 0");
    }
    const double dt = recommended_dt(base, p);  // shared across delays
    DelaySeries series;
    series.delays.assign(delays.begin(), delays.end());
    series.retrieved_energy.resize(delays.size());

    const double write_end =
        base.writing.envelope.t_start + base.writing.envelope.duration;
    parallel_for(delays.size(), threads, [&](std::size_t i) {
        PulseSequence s = base;
        s.readout->envelope.t_start = write_end + delays[i];
        s.validate();
        const double t_end = suggested_t_end(s);
        const Trajectory traj = integrate(s, p, {t_end, dt});
        series.retrieved_energy[i] =
            energy_over_window(traj, readout_window(s, p, t_end));
    });

    bool positive = delays.size() >= 2;
    for (double e : series.retrieved_energy) positive = positive && e > 0.0;
    if (positive) {
        std::vector<double> log_e(series.retrieved_energy.size());
        for (std::size_t i = 0; i < log_e.size(); ++i) {
            log_e[i] = std::log(series.retrieved_energy[i]);
        }
        series.fitted_rate = -linear_fit(series.delays, log_e).slope;
    }
    return series;
}

std::vector<ReadoutTrace> run_readout_series(const SystemParams& p,
                                             std::span<const double> g_values,
                                             const SequenceOverrides& o,
                                             unsigned threads) {
    std::vector<ReadoutTrace> traces(g_values.size());
    parallel_for(g_values.size(), threads, [&](std::size_t i) {
        SequenceOverrides ov = o;
        ov.readout_g = g_values[i];
        const PulseSequence s = standard_sequence(SequenceKind::Fig4, p, ov);
        const double dt = recommended_dt(s, p);
        const double t_end = suggested_t_end(s);
        const Trajectory traj = integrate(s, p, {t_end, dt});

        ReadoutTrace& tr = traces[i];
        tr.g = g_values[i];
        const RetrievalRate pred = adiabatic_retrieval_rate(g_values[i], p);
        tr.predicted_rate = pred.rate;
        tr.adiabatic = pred.adiabatic;

        const auto& r = *s.readout;
        // fit the retrieved amplitude decay after the cavity transient
        const double w0 = r.envelope.t_start + 0.2;
        const double w1 =
            std::min(r.envelope.t_start + 4.0,
                     r.envelope.t_start + r.envelope.duration - 0.1);
        const std::size_t i0 = traj.index_at(w0);
        const std::size_t i1 = traj.index_at(w1);
        bool fittable = i1 > i0 + 8;
        for (std::size_t k = i0; fittable && k <= i1; ++k) {
            fittable = std::abs(traj.alpha[k]) > 1e-300;
        }
        if (fittable) {
            std::vector<double> ts(i1 - i0 + 1), ln_a(i1 - i0 + 1);
            for (std::size_t k = i0; k <= i1; ++k) {
                ts[k - i0] = traj.times[k];
                ln_a[k - i0] = std::log(std::abs(traj.alpha[k]));
            }
            tr.fitted_rate = -linear_fit(ts, ln_a).slope;
        }

        const BeatRecord full = synthesize_beat(traj, p, 1.0);
        const double b0 = r.envelope.support_begin();
        const double b1 = std::min(t_end, r.envelope.support_end());
        const auto lo = std::lower_bound(full.times.begin(), full.times.end(), b0);
        const auto hi = std::lower_bound(full.times.begin(), full.times.end(), b1);
        tr.beats.lo_reference = "readout";
        tr.beats.times.assign(lo, hi);
        tr.beats.voltage.assign(full.voltage.begin() + (lo - full.times.begin()),
                                full.voltage.begin() + (hi - full.times.begin()));
    });
    return traces;
}

std::vector<double> default_detuning_grid(const SystemParams& p,
                                          double control_g, double span,
                                          int points, int refine_points) {
    if (points < 2) throw std::invalid_argument("grid needs >= 2 points");
    if (span <= 0.0) span = 3.0 * p.optical.kappa;
    std::set<double> grid;
    for (int i = 0; i < points; ++i) {
        grid.insert(-span + 2.0 * span * i / (points - 1));
    }
    const double gm = p.mechanical.gamma_m;
    if (refine_points >= 2 && control_g > 0.0 && gm > 0.0) {
        const double c = cooperativity(control_g, gm, p.optical.kappa);
        const double w = 3.0 * (1.0 + c) * gm;
        for (int i = 0; i < refine_points; ++i) {
            grid.insert(-w + 2.0 * w * i / (refine_points - 1));
        }
    }
    return {grid.begin(), grid.end()};
}

Spectrum run_omit_sweep(const SystemParams& p, double control_g,
                        std::span<const double> detunings,
                        const GateConfig& gate, const SequenceOverrides& o,
                        unsigned threads) {
    SequenceOverrides base = o;
    base.write_g = control_g;
    const PulseSequence probe = standard_sequence(SequenceKind::Fig5Omit, p, base);
    const double t_end =
        std::ceil((gate.gate_start + gate.gate_length + 0.2) * 10.0) / 10.0;

    Spectrum spec;
    spec.kind = SpectrumKind::Omit;
    const double gm = p.mechanical.gamma_m;
    if (gm > 0.0 && control_g >= 0.0) {
        const double gamma_eff =
            (1.0 + cooperativity(control_g, gm, p.optical.kappa)) * gm;
        spec.steady_state_warning =
            (gate.gate_start - probe.writing.envelope.t_start) * gamma_eff < 5.0;
    } else {
        spec.steady_state_warning = true;
    }

    spec.detuning_mhz.resize(detunings.size());
    spec.power.resize(detunings.size());
    parallel_for(detunings.size(), threads, [&](std::size_t i) {
        SequenceOverrides ov = base;
        ov.signal_detuning = detunings[i];
        const PulseSequence s = standard_sequence(SequenceKind::Fig5Omit, p, ov);
        const double dt = recommended_dt(s, p);
        const Trajectory traj = integrate(s, p, {t_end, dt});
        const BeatRecord rec = synthesize_beat(traj, p, 1.0);
        GateConfig gi = gate;
        gi.center_mhz =
            mhz_from_rad_per_us(detunings[i] - s.writing.detuning);
        spec.detuning_mhz[i] = mhz_from_rad_per_us(detunings[i]);
        spec.power[i] = gated_power(rec, gi);
    });
    return spec;
}

Spectrum run_storage_sweep(const SystemParams& p,
                           std::span<const double> detunings,
                           const GateConfig& gate, const SequenceOverrides& o,
                           unsigned threads) {
    const double t_end =
        std::ceil((gate.gate_start + gate.gate_length + 0.2) * 10.0) / 10.0;
    Spectrum spec;
    spec.kind = SpectrumKind::Storage;
    spec.detuning_mhz.resize(detunings.size());
    spec.power.resize(detunings.size());
    parallel_for(detunings.size(), threads, [&](std::size_t i) {
        SequenceOverrides ov = o;
        ov.signal_detuning = detunings[i];
        const PulseSequence s =
            standard_sequence(SequenceKind::Fig5Storage, p, ov);
        const double dt = recommended_dt(s, p);
        const Trajectory traj = integrate(s, p, {t_end, dt});
        const BeatRecord rec = synthesize_beat(traj, p, 1.0);
        spec.detuning_mhz[i] = mhz_from_rad_per_us(detunings[i]);
        spec.power[i] = gated_power(rec, gate);
    });
    return spec;
}

namespace {

// Bare-cavity (G = 0) spectral shape, unit amplitude.
double bare_envelope(double delta, const SystemParams& p) {
    const double half_k = 0.5 * p.optical.kappa;
    return 1.0 / (half_k * half_k + delta * delta);
}

// Amplitude factor matching the model to the data away from the dip.
double envelope_scale(std::span<const double> delta_rad,
                      std::span<const double> power, const SystemParams& p,
                      double exclude_halfwidth) {
    std::vector<double> ratios;
    for (std::size_t i = 0; i < delta_rad.size(); ++i) {
        if (std::abs(delta_rad[i]) <= exclude_halfwidth) continue;
        const double env = bare_envelope(delta_rad[i], p);
        if (env > 0.0) ratios.push_back(power[i] / env);
    }
    if (ratios.size() < 8) {
        // fall back to the outer half of the grid
        std::vector<std::size_t> idx(delta_rad.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(delta_rad[a]) > std::abs(delta_rad[b]);
        });
        ratios.clear();
        for (std::size_t k = 0; k < idx.size() / 2; ++k) {
            const double env = bare_envelope(delta_rad[idx[k]], p);
            if (env > 0.0) ratios.push_back(power[idx[k]] / env);
        }
    }
    return median(std::move(ratios));
}

}  // namespace

DipMeasurement measure_omit_dip(const Spectrum& spec, const SystemParams& p) {
    const std::size_t n = spec.detuning_mhz.size();
    if (n < 5) throw std::invalid_argument("spectrum too sparse for dip fit");
    std::vector<double> delta_rad(n);
    for (std::size_t i = 0; i < n; ++i) {
        delta_rad[i] = rad_per_us_from_mhz(spec.detuning_mhz[i]);
    }
    const double scale =
        envelope_scale(delta_rad, spec.power, p, 0.25 * p.optical.kappa);

    std::vector<double> depth(n);
    std::size_t dip = 0;
    for (std::size_t i = 0; i < n; ++i) {
        depth[i] = scale * bare_envelope(delta_rad[i], p) - spec.power[i];
        if (depth[i] > depth[dip]) dip = i;
    }
    if (depth[dip] <= 0.0) {
        throw std::runtime_error("no transparency dip found in spectrum");
    }

    DipMeasurement m;
    m.position_mhz = spec.detuning_mhz[dip];
    m.depth_ratio =
        spec.power[dip] / (scale * bare_envelope(delta_rad[dip], p));

    const double half = 0.5 * depth[dip];
    auto cross = [&](bool right) -> double {
        std::size_t i = dip;
        for (;;) {
            const std::size_t j = right ? i + 1 : i - 1;
            if ((right && j >= n) || (!right && i == 0)) {
                return spec.detuning_mhz[i];  // dip runs off the grid
            }
            if (depth[j] <= half) {
                const double f = (depth[i] - half) / (depth[i] - depth[j]);
                return spec.detuning_mhz[i] +
                       f * (spec.detuning_mhz[j] - spec.detuning_mhz[i]);
            }
            i = j;
        }
    };
    m.width_mhz = cross(true) - cross(false);
    return m;
}

double spectrum_peak_mhz(const Spectrum& spec) {
    if (spec.power.empty()) {
        throw std::invalid_argument("empty spectrum");
    }
    const auto it = std::max_element(spec.power.begin(), spec.power.end());
    return spec.detuning_mhz[static_cast<std::size_t>(
        it - spec.power.begin())];
}

CooperativityFit fit_cooperativity(const Spectrum& spec,
                                   const SystemParams& p) {
    const std::size_t n = spec.detuning_mhz.size();
    if (n < 16) {
        throw std::invalid_argument(
            "spectrum too sparse for a cooperativity fit");
    }
    const double gm = p.mechanical.gamma_m;
    const double kappa = p.optical.kappa;
    if (!(gm > 0.0) || !(kappa > 0.0)) {
        throw std::invalid_argument(
            "cooperativity fit requires positive gamma_m and kappa");
    }
    std::vector<double> delta_rad(n);
    for (std::size_t i = 0; i < n; ++i) {
        delta_rad[i] = rad_per_us_from_mhz(spec.detuning_mhz[i]);
    }

    std::vector<double> model(n);
    auto eval_model = [&](double c) {
        const double g = coupling_from_cooperativity(c, gm, kappa);
        for (std::size_t i = 0; i < n; ++i) {
            model[i] =
                omit_steady_state(delta_rad[i], g, p, 1.0).intracavity_power;
        }
    };
    auto scale_for = [&](double c) {
        std::vector<double> ratios;
        const double exclude = 2.5 * (1.0 + c) * gm;
        for (std::size_t i = 0; i < n; ++i) {
            if (std::abs(delta_rad[i]) > exclude && model[i] > 0.0) {
                ratios.push_back(spec.power[i] / model[i]);
            }
        }
        if (ratios.size() < 8) {
            std::vector<std::size_t> idx(n);
            for (std::size_t i = 0; i < n; ++i) idx[i] = i;
            std::sort(idx.begin(), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          return std::abs(delta_rad[a]) > std::abs(delta_rad[b]);
                      });
            ratios.clear();
            for (std::size_t k = 0; k < n / 2; ++k) {
                if (model[idx[k]] > 0.0) {
                    ratios.push_back(spec.power[idx[k]] / model[idx[k]]);
                }
            }
        }
        return median(std::move(ratios));
    };
    auto objective = [&](double c) {
        eval_model(c);
        const double s = scale_for(c);
        double r2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = spec.power[i] - s * model[i];
            r2 += d * d;
        }
        return r2;
    };

    // coarse bracket: C = 0 plus a log grid up to 1e3
    std::vector<double> candidates{0.0};
    constexpr int kLogPoints = 121;
    for (int i = 0; i < kLogPoints; ++i) {
        candidates.push_back(
            std::pow(10.0, -3.0 + 6.0 * i / (kLogPoints - 1)));
    }
    std::size_t best = 0;
    double best_val = objective(candidates[0]);
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double v = objective(candidates[i]);
        if (v < best_val) {
            best_val = v;
            best = i;
        }
    }
    if (best + 1 == candidates.size()) {
        throw std::runtime_error(
            "cooperativity fit did not converge within [0, 1e3]");
    }
    const double lo = best == 0 ? 0.0 : candidates[best - 1];
    const double hi = candidates[best + 1];
    const MinResult m = golden_section_min(objective, lo, hi, 1e-6);

    CooperativityFit fit;
    fit.c = m.x;
    fit.residual = m.fx;
    fit.iterations = static_cast<int>(candidates.size()) + m.iterations;
    eval_model(fit.c);
    fit.scale = scale_for(fit.c);
    return fit;
}

}  // namespace omls
