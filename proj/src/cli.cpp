#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "omls/config.hpp"
#include "omls/csv.hpp"
#include "omls/errors.hpp"
#include "omls/units.hpp"

namespace omls {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

json params_json(const SystemParams& p) {
    json j;
    j["label"] = p.label;
    j["omega_m_mhz"] = mhz_from_rad_per_us(p.mechanical.omega_m);
    j["gamma_m_mhz"] = mhz_from_rad_per_us(p.mechanical.gamma_m);
    j["kappa_mhz"] = mhz_from_rad_per_us(p.optical.kappa);
    j["kappa_ext_mhz"] = mhz_from_rad_per_us(p.optical.kappa_ext);
    j["g_ref_mhz"] = mhz_from_rad_per_us(p.calibration.g_ref);
    j["p_ref_mw"] = p.calibration.p_ref_mw;
    j["wavelength_nm"] = p.wavelength_nm;
    return j;
}

json sequence_json(const PulseSequence& s) {
    json j;
    j["write_g_mhz"] = mhz_from_rad_per_us(s.writing.envelope.peak);
    j["write_start_us"] = s.writing.envelope.t_start;
    j["write_duration_us"] = s.writing.envelope.duration;
    j["drive_detuning_mhz"] = mhz_from_rad_per_us(s.writing.detuning);
    j["signal_peak_flux_photons_per_us"] =
        s.signal.envelope.peak * s.signal.envelope.peak;
    j["signal_detuning_mhz"] = mhz_from_rad_per_us(s.signal.detuning);
    j["signal_phase_rad"] = s.signal.phase;
    j["edge_time_us"] = s.writing.envelope.edge_time;
    if (s.readout) {
        j["readout_g_mhz"] = mhz_from_rad_per_us(s.readout->envelope.peak);
        j["readout_start_us"] = s.readout->envelope.t_start;
        j["readout_duration_us"] = s.readout->envelope.duration;
        j["delay_us"] = s.delay();
    }
    return j;
}

json gate_json(const GateConfig& g) {
    json j;
    j["gate_start_us"] = g.gate_start;
    j["gate_length_us"] = g.gate_length;
    j["rbw_mhz"] = g.rbw_mhz;
    j["center_mhz"] = g.center_mhz;
    j["filter"] = to_string(g.filter);
    return j;
}

// Derived quantities for the write/control coupling rate.
json derived_json(const SystemParams& p, double g) {
    json j;
    j["g_mhz"] = mhz_from_rad_per_us(g);
    const double kappa = p.optical.kappa;
    const double gm = p.mechanical.gamma_m;
    if (gm > 0.0 && kappa > 0.0) {
        const double c = cooperativity(g, gm, kappa);
        j["cooperativity_dimensionless"] = c;
        j["omit_dip_width_mhz"] = mhz_from_rad_per_us(omit_dip_width(c, gm));
    }
    if (kappa > 0.0) {
        j["gamma_opt_mhz"] = mhz_from_rad_per_us(4.0 * g * g / kappa);
        const RetrievalRate r = adiabatic_retrieval_rate(g, p);
        j["retrieval_rate_mhz"] = mhz_from_rad_per_us(r.rate);
    }
    return j;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << text;
}

struct ScenarioOutput {
    json summary;
    std::vector<std::function<void(const std::string&)>> writers;  // take dir
    std::vector<std::string> files;
    std::string gnuplot;
};

GateConfig make_gate(const DetectionSettings& d, double start_default,
                     double length_default, double rbw_default,
                     double center_mhz) {
    GateConfig g;
    g.gate_start = d.gate_start.value_or(start_default);
    g.gate_length = d.gate_length.value_or(length_default);
    g.rbw_mhz = d.rbw_mhz.value_or(rbw_default);
    g.center_mhz = center_mhz;
    g.filter = d.filter;
    return g;
}

ScenarioOutput run_fig3(const RunConfig& cfg, const CliOptions& opt) {
    const SystemParams& p = cfg.params;
    const PulseSequence seq =
        standard_sequence(SequenceKind::Fig3, p, cfg.sequence);
    const GateConfig gate =
        make_gate(cfg.detection, 0.0, 0.1, 30.0,
                  mhz_from_rad_per_us(p.mechanical.omega_m));
    StorageRunOptions ro;
    ro.dt = cfg.grid.dt;
    ro.t_end = cfg.grid.t_end;
    ro.lo_amp = cfg.detection.lo_amp;
    ro.samples_per_period = cfg.detection.samples_per_period;
    ro.scan_step = cfg.detection.scan_step.value_or(0.05);

    auto res = std::make_shared<StorageResult>(
        run_light_storage(p, seq, gate, ro));

    ScenarioOutput out;
    out.summary["sequence"] = sequence_json(seq);
    out.summary["detection"] = gate_json(gate);
    out.summary["detection"]["scan_step_us"] = ro.scan_step;
    out.summary["derived"] = derived_json(p, seq.writing.envelope.peak);
    out.summary["derived"]["grid_dt_us"] = res->trajectory.dt;
    out.summary["derived"]["grid_t_end_us"] = res->trajectory.times.back();
    out.summary["results"]["stored_phonons_at_readout_phonons"] =
        res->stored_phonons_at_readout;
    out.summary["results"]["retrieved_energy_photons"] = res->retrieved_energy;
    out.summary["results"]["readout_window_begin_us"] =
        res->readout_window_begin;
    out.summary["results"]["readout_window_end_us"] = res->readout_window_end;

    out.files = {"trajectory.csv", "beat.csv", "gated_scan.csv"};
    out.writers.push_back([res](const std::string& dir) {
        trajectory_to_csv(res->trajectory, dir + "/trajectory.csv");
        beat_to_csv(res->beats, dir + "/beat.csv");
        scan_to_csv(res->scan, dir + "/gated_scan.csv");
    });
    out.gnuplot =
        "set datafile separator ','\n"
        "set xlabel 't (us)'\n"
        "set ylabel 'gated power (arb)'\n"
        "plot 'gated_scan.csv' using 1:2 with lines title 'gated scan'\n";
    (void)opt;
    return out;
}

ScenarioOutput run_fig4(const RunConfig& cfg, const CliOptions& opt) {
    const SystemParams& p = cfg.params;
    std::vector<double> gs = cfg.readout_g_list;
    if (gs.empty()) {
        gs = {rad_per_us_from_mhz(0.2), rad_per_us_from_mhz(0.45),
              rad_per_us_from_mhz(0.6)};
    }
    const auto traces = run_readout_series(p, gs, cfg.sequence, opt.threads);

    ScenarioOutput out;
    const PulseSequence seq =
        standard_sequence(SequenceKind::Fig4, p, cfg.sequence);
    out.summary["sequence"] = sequence_json(seq);
    json arr = json::array();
    for (std::size_t i = 0; i < traces.size(); ++i) {
        json t;
        t["readout_g_mhz"] = mhz_from_rad_per_us(traces[i].g);
        t["fitted_rate_mhz"] = mhz_from_rad_per_us(traces[i].fitted_rate);
        t["predicted_rate_mhz"] = mhz_from_rad_per_us(traces[i].predicted_rate);
        t["one_over_e_time_us"] = traces[i].fitted_rate > 0.0
                                      ? 1.0 / traces[i].fitted_rate
                                      : 0.0;
        t["adiabatic"] = traces[i].adiabatic;
        t["beats_file"] = "readout_beats_" + std::to_string(i + 1) + ".csv";
        arr.push_back(t);
        out.files.push_back("readout_beats_" + std::to_string(i + 1) + ".csv");
    }
    out.summary["results"]["traces"] = arr;
    auto shared = std::make_shared<std::vector<ReadoutTrace>>(traces);
    out.writers.push_back([shared](const std::string& dir) {
        for (std::size_t i = 0; i < shared->size(); ++i) {
            beat_to_csv((*shared)[i].beats,
                        dir + "/readout_beats_" + std::to_string(i + 1) +
                            ".csv");
        }
    });
    out.gnuplot =
        "set datafile separator ','\n"
        "set xlabel 't (us)'\n"
        "set ylabel 'beat voltage (arb)'\n"
        "plot 'readout_beats_1.csv' using 1:2 with lines title 'G 1', \\\n"
        "     'readout_beats_2.csv' using 1:2 with lines title 'G 2', \\\n"
        "     'readout_beats_3.csv' using 1:2 with lines title 'G 3'\n";
    return out;
}

std::vector<double> sweep_grid(const RunConfig& cfg, double control_g) {
    const double span =
        cfg.sweep.span_mhz ? rad_per_us_from_mhz(*cfg.sweep.span_mhz) : 0.0;
    return default_detuning_grid(cfg.params, control_g, span,
                                 cfg.sweep.points, cfg.sweep.refine_points);
}

ScenarioOutput run_fig5_omit(const RunConfig& cfg, const CliOptions& opt) {
    const SystemParams& p = cfg.params;
    const PulseSequence probe =
        standard_sequence(SequenceKind::Fig5Omit, p, cfg.sequence);
    const double control_g = probe.writing.envelope.peak;
    // the paper's gate: 6.5 us after the control turns on, 1 us long
    const GateConfig gate = make_gate(
        cfg.detection, probe.writing.envelope.t_start + 6.5, 1.0, 10.0, 0.0);
    const auto grid = sweep_grid(cfg, control_g);
    auto spec = std::make_shared<Spectrum>(run_omit_sweep(
        p, control_g, grid, gate, cfg.sequence, opt.threads));

    ScenarioOutput out;
    out.summary["sequence"] = sequence_json(probe);
    out.summary["detection"] = gate_json(gate);
    out.summary["detection"].erase("center_mhz");  // tracks the beat per point
    out.summary["derived"] = derived_json(p, control_g);
    out.summary["results"]["steady_state_warning"] = spec->steady_state_warning;

    const DipMeasurement dip = measure_omit_dip(*spec, p);
    out.summary["results"]["dip_position_mhz"] = dip.position_mhz;
    out.summary["results"]["dip_width_mhz"] = dip.width_mhz;
    out.summary["results"]["dip_depth_ratio_dimensionless"] = dip.depth_ratio;

    const CooperativityFit fit = fit_cooperativity(*spec, p);
    out.summary["results"]["fit_cooperativity_dimensionless"] = fit.c;
    out.summary["results"]["fit_dip_width_mhz"] = mhz_from_rad_per_us(
        omit_dip_width(fit.c, p.mechanical.gamma_m));
    out.summary["results"]["fit_residual_arb"] = fit.residual;
    out.summary["results"]["fit_iterations_count"] = fit.iterations;
    out.summary["results"]["fit_scale_arb"] = fit.scale;

    out.files = {"spectrum.csv"};
    out.writers.push_back([spec](const std::string& dir) {
        spectrum_to_csv(*spec, dir + "/spectrum.csv");
    });
    out.gnuplot =
        "set datafile separator ','\n"
        "set xlabel 'detuning (MHz)'\n"
        "set ylabel 'power (arb)'\n"
        "plot 'spectrum.csv' using 1:2 with linespoints title 'OMIT'\n";
    return out;
}

ScenarioOutput run_fig5_storage(const RunConfig& cfg, const CliOptions& opt) {
    const SystemParams& p = cfg.params;
    const PulseSequence seq =
        standard_sequence(SequenceKind::Fig5Storage, p, cfg.sequence);
    const auto& r = *seq.readout;
    const double gate_length = cfg.detection.gate_length.value_or(1.0);
    // gate centered on the readout pulse
    const double start_default =
        r.envelope.t_start + 0.5 * (r.envelope.duration - gate_length);
    const GateConfig gate =
        make_gate(cfg.detection, start_default, gate_length, 10.0,
                  mhz_from_rad_per_us(p.mechanical.omega_m));
    const auto grid = sweep_grid(cfg, seq.writing.envelope.peak);
    auto spec = std::make_shared<Spectrum>(
        run_storage_sweep(p, grid, gate, cfg.sequence, opt.threads));

    ScenarioOutput out;
    out.summary["sequence"] = sequence_json(seq);
    out.summary["detection"] = gate_json(gate);
    out.summary["derived"] = derived_json(p, seq.writing.envelope.peak);
    out.summary["results"]["peak_detuning_mhz"] = spectrum_peak_mhz(*spec);

    out.files = {"spectrum.csv"};
    out.writers.push_back([spec](const std::string& dir) {
        spectrum_to_csv(*spec, dir + "/spectrum.csv");
    });
    out.gnuplot =
        "set datafile separator ','\n"
        "set xlabel 'detuning (MHz)'\n"
        "set ylabel 'retrieved power (arb)'\n"
        "plot 'spectrum.csv' using 1:2 with linespoints title 'storage'\n";
    return out;
}

ScenarioOutput run_delay_sweep(const RunConfig& cfg, const CliOptions& opt) {
    const SystemParams& p = cfg.params;
    const PulseSequence base =
        standard_sequence(SequenceKind::Fig3, p, cfg.sequence);
    auto series = std::make_shared<DelaySeries>(
        storage_energy_vs_delay(p, base, cfg.delays_us, opt.threads));

    ScenarioOutput out;
    out.summary["sequence"] = sequence_json(base);
    out.summary["derived"] = derived_json(p, base.writing.envelope.peak);
    out.summary["results"]["fitted_decay_rate_mhz"] =
        mhz_from_rad_per_us(series->fitted_rate);
    out.summary["results"]["gamma_m_mhz"] =
        mhz_from_rad_per_us(p.mechanical.gamma_m);
    if (p.mechanical.gamma_m > 0.0) {
        out.summary["results"]["rate_over_gamma_m_ratio"] =
            series->fitted_rate / p.mechanical.gamma_m;
    }

    out.files = {"delay_series.csv"};
    out.writers.push_back([series](const std::string& dir) {
        const std::vector<std::string> names{"delay_us",
                                             "retrieved_energy_photons"};
        const std::vector<std::vector<double>> cols{series->delays,
                                                    series->retrieved_energy};
        write_csv(dir + "/delay_series.csv", names, cols);
    });
    out.gnuplot =
        "set datafile separator ','\n"
        "set xlabel 'delay (us)'\n"
        "set ylabel 'retrieved energy (photons)'\n"
        "set logscale y\n"
        "plot 'delay_series.csv' using 1:2 with linespoints title 'storage "
        "decay'\n";
    return out;
}

}  // namespace

int run_scenario(const RunConfig& cfg, const CliOptions& opt) {
    const std::string dir =
        opt.out_dir.empty() ? cfg.output_dir : opt.out_dir;

    ScenarioOutput out;
    switch (cfg.scenario) {
        case ScenarioKind::Fig3: out = run_fig3(cfg, opt); break;
        case ScenarioKind::Fig4: out = run_fig4(cfg, opt); break;
        case ScenarioKind::Fig5Omit: out = run_fig5_omit(cfg, opt); break;
        case ScenarioKind::Fig5Storage: out = run_fig5_storage(cfg, opt); break;
        case ScenarioKind::DelaySweep: out = run_delay_sweep(cfg, opt); break;
    }

    out.files.push_back("summary.json");
    if (opt.gnuplot) out.files.push_back("plot.gp");

    fs::create_directories(dir);
    for (const auto& f : out.files) {
        if (!opt.force && fs::exists(fs::path(dir) / f)) {
            throw ConfigError("output file already exists: " +
                              (fs::path(dir) / f).string() +
                              " (pass --force to overwrite)");
        }
    }

    json summary;
    summary["scenario"] = to_string(cfg.scenario);
    summary["sample"] = cfg.params.label;
    summary["params"] = params_json(cfg.params);
    for (auto& item : out.summary.items()) summary[item.key()] = item.value();

    for (const auto& w : out.writers) w(dir);
    write_text(dir + "/summary.json", summary.dump(2) + "\n");
    if (opt.gnuplot) write_text(dir + "/plot.gp", out.gnuplot);

    std::cout << "wrote " << out.files.size() << " files to " << dir << "\n";
    return 0;
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"coupled-mode simulator for optomechanical light storage "
                 "and induced transparency"};
    app.require_subcommand(1);

    std::string config_path;
    CliOptions opt;

    CLI::App* run =
        app.add_subcommand("run", "run a scenario from a configuration file");
    run->add_option("--config", config_path, "JSON configuration path")
        ->required();
    run->add_option("--out", opt.out_dir,
                    "output directory (overrides the config)");
    run->add_option("--threads", opt.threads,
                    "worker threads for sweeps (0 = hardware)");
    run->add_flag("--force", opt.force, "overwrite existing output files");
    run->add_flag("--gnuplot", opt.gnuplot, "also write a gnuplot stub");

    CLI::App* lp = app.add_subcommand(
        "list-presets", "list sample presets and scenario kinds");

    CLI::App* val =
        app.add_subcommand("validate", "parse and validate a configuration");
    val->add_option("--config", config_path, "JSON configuration path")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (lp->parsed()) {
            std::cout << list_presets_text();
            return 0;
        }
        if (val->parsed()) {
            const RunConfig cfg = load_config(config_path);
            std::cout << "scenario: " << to_string(cfg.scenario) << "\n"
                      << validate_params(cfg.params).to_string()
                      << "config ok\n";
            return 0;
        }
        const RunConfig cfg = load_config(config_path);
        return run_scenario(cfg, opt);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const DivergenceError& e) {
        std::cerr << "simulation diverged: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace omls
