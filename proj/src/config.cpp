#include "omls/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "omls/errors.hpp"
#include "omls/units.hpp"

namespace omls {

using json = nlohmann::ordered_json;

ScenarioKind scenario_from_name(const std::string& name) {
    if (name == "fig3") return ScenarioKind::Fig3;
    if (name == "fig4") return ScenarioKind::Fig4;
    if (name == "fig5-omit") return ScenarioKind::Fig5Omit;
    if (name == "fig5-storage") return ScenarioKind::Fig5Storage;
    if (name == "delay-sweep") return ScenarioKind::DelaySweep;
    throw ConfigError("unknown scenario: " + name);
}

std::string to_string(ScenarioKind k) {
    switch (k) {
        case ScenarioKind::Fig3: return "fig3";
        case ScenarioKind::Fig4: return "fig4";
        case ScenarioKind::Fig5Omit: return "fig5-omit";
        case ScenarioKind::Fig5Storage: return "fig5-storage";
        case ScenarioKind::DelaySweep: return "delay-sweep";
    }
    throw ConfigError("unknown scenario kind");
}

namespace {

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("unknown key \"" + item.key() + "\" in " + where);
        }
    }
}

double get_number(const json& obj, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) {
        throw ConfigError("\"" + key + "\" must be a number");
    }
    return obj[key].get<double>();
}

std::optional<double> get_opt(const json& obj, const std::string& key) {
    if (!obj.contains(key)) return std::nullopt;
    if (!obj[key].is_number()) {
        throw ConfigError("\"" + key + "\" must be a number");
    }
    return obj[key].get<double>();
}

std::optional<double> get_opt_mhz(const json& obj, const std::string& key) {
    auto v = get_opt(obj, key);
    if (v) return rad_per_us_from_mhz(*v);
    return std::nullopt;
}

SystemParams parse_params(const json& root) {
    SystemParams base = sample_a();
    if (root.contains("sample")) {
        if (!root["sample"].is_string()) {
            throw ConfigError("\"sample\" must be a preset name string");
        }
        try {
            base = preset_by_label(root["sample"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    if (!root.contains("params")) return base;

    const json& pj = root["params"];
    if (!pj.is_object()) throw ConfigError("\"params\" must be an object");
    check_keys(pj, "params",
               {"omega_m_mhz", "gamma_m_mhz", "kappa_mhz", "kappa_ext_mhz",
                "p_ref_mw", "g_ref_mhz", "wavelength_nm"});

    const double kappa_mhz =
        get_number(pj, "kappa_mhz", mhz_from_rad_per_us(base.optical.kappa));
    // kappa_ext defaults to critical coupling, kappa/2
    const double kext_mhz = get_number(
        pj, "kappa_ext_mhz",
        pj.contains("kappa_mhz") ? 0.5 * kappa_mhz
                                 : mhz_from_rad_per_us(base.optical.kappa_ext));
    const double wm_mhz = get_number(
        pj, "omega_m_mhz", mhz_from_rad_per_us(base.mechanical.omega_m));
    const double gm_mhz = get_number(
        pj, "gamma_m_mhz", mhz_from_rad_per_us(base.mechanical.gamma_m));
    const double p_ref = get_number(pj, "p_ref_mw", base.calibration.p_ref_mw);
    const double g_ref_mhz =
        get_number(pj, "g_ref_mhz", mhz_from_rad_per_us(base.calibration.g_ref));

    try {
        SystemParams p{
            OpticalMode(rad_per_us_from_mhz(kappa_mhz),
                        rad_per_us_from_mhz(kext_mhz)),
            MechanicalMode(rad_per_us_from_mhz(wm_mhz),
                           rad_per_us_from_mhz(gm_mhz)),
            CouplingCalibration::from_reference(p_ref,
                                                rad_per_us_from_mhz(g_ref_mhz)),
            base.label,
            get_number(pj, "wavelength_nm", base.wavelength_nm)};
        return p;
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("params: ") + e.what());
    }
}

SequenceOverrides parse_sequence(const json& root, const SystemParams& p) {
    SequenceOverrides o;
    if (!root.contains("sequence")) return o;
    const json& sj = root["sequence"];
    if (!sj.is_object()) throw ConfigError("\"sequence\" must be an object");
    check_keys(sj, "sequence",
               {"write_g_mhz", "write_power_mw", "write_duration_us",
                "readout_g_mhz", "readout_power_mw", "readout_duration_us",
                "delay_us", "signal_power_mw", "signal_detuning_mhz",
                "signal_phase_rad", "edge_time_us", "drive_detuning_mhz",
                "lead_time_us"});

    if (sj.contains("write_g_mhz") && sj.contains("write_power_mw")) {
        throw ConfigError(
            "sequence: give write_g_mhz or write_power_mw, not both");
    }
    if (sj.contains("readout_g_mhz") && sj.contains("readout_power_mw")) {
        throw ConfigError(
            "sequence: give readout_g_mhz or readout_power_mw, not both");
    }
    o.write_g = get_opt_mhz(sj, "write_g_mhz");
    if (auto pw = get_opt(sj, "write_power_mw")) {
        o.write_g = coupling_rate_from_power(*pw, p.calibration);
    }
    o.readout_g = get_opt_mhz(sj, "readout_g_mhz");
    if (auto pr = get_opt(sj, "readout_power_mw")) {
        o.readout_g = coupling_rate_from_power(*pr, p.calibration);
    }
    o.write_duration = get_opt(sj, "write_duration_us");
    o.readout_duration = get_opt(sj, "readout_duration_us");
    o.delay = get_opt(sj, "delay_us");
    if (auto ps = get_opt(sj, "signal_power_mw")) {
        o.signal_amp = signal_amplitude_from_power(*ps, p);
    }
    o.signal_detuning = get_opt_mhz(sj, "signal_detuning_mhz");
    o.signal_phase = get_opt(sj, "signal_phase_rad");
    o.edge_time = get_opt(sj, "edge_time_us");
    o.drive_detuning = get_opt_mhz(sj, "drive_detuning_mhz");
    o.lead_time = get_opt(sj, "lead_time_us");
    return o;
}

std::vector<double> parse_number_list(const json& arr, const std::string& key) {
    if (!arr.is_array()) throw ConfigError("\"" + key + "\" must be an array");
    std::vector<double> out;
    for (const auto& v : arr) {
        if (!v.is_number()) {
            throw ConfigError("\"" + key + "\" must hold numbers only");
        }
        out.push_back(v.get<double>());
    }
    return out;
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be an object");
    check_keys(root, "config",
               {"sample", "params", "scenario", "sequence", "grid",
                "detection", "sweep", "delays_us", "readout_g_mhz_list",
                "output_dir"});

    RunConfig cfg;
    cfg.params = parse_params(root);

    const ValidationReport report = validate_params(cfg.params);
    if (report.hard_failure()) {
        throw ConfigError("invalid parameters:\n" + report.to_string());
    }

    if (root.contains("scenario")) {
        if (!root["scenario"].is_string()) {
            throw ConfigError("\"scenario\" must be a string");
        }
        cfg.scenario = scenario_from_name(root["scenario"].get<std::string>());
    }
    cfg.sequence = parse_sequence(root, cfg.params);

    if (root.contains("grid")) {
        const json& gj = root["grid"];
        if (!gj.is_object()) throw ConfigError("\"grid\" must be an object");
        check_keys(gj, "grid", {"dt_us", "t_end_us"});
        cfg.grid.dt = get_opt(gj, "dt_us");
        cfg.grid.t_end = get_opt(gj, "t_end_us");
        if (cfg.grid.dt && *cfg.grid.dt <= 0.0) {
            throw ConfigError("grid: dt_us must be positive");
        }
    }

    if (root.contains("detection")) {
        const json& dj = root["detection"];
        if (!dj.is_object()) throw ConfigError("\"detection\" must be an object");
        check_keys(dj, "detection",
                   {"rbw_mhz", "gate_start_us", "gate_length_us",
                    "scan_step_us", "samples_per_period", "filter",
                    "lo_amplitude"});
        cfg.detection.rbw_mhz = get_opt(dj, "rbw_mhz");
        cfg.detection.gate_start = get_opt(dj, "gate_start_us");
        cfg.detection.gate_length = get_opt(dj, "gate_length_us");
        cfg.detection.scan_step = get_opt(dj, "scan_step_us");
        cfg.detection.samples_per_period = static_cast<int>(
            get_number(dj, "samples_per_period", 16));
        if (dj.contains("filter")) {
            if (!dj["filter"].is_string()) {
                throw ConfigError("detection: \"filter\" must be a string");
            }
            try {
                cfg.detection.filter =
                    rbw_filter_from_name(dj["filter"].get<std::string>());
            } catch (const std::invalid_argument& e) {
                throw ConfigError(e.what());
            }
        }
        cfg.detection.lo_amp = get_number(dj, "lo_amplitude", 1.0);
    }

    if (root.contains("sweep")) {
        const json& wj = root["sweep"];
        if (!wj.is_object()) throw ConfigError("\"sweep\" must be an object");
        check_keys(wj, "sweep", {"span_mhz", "points", "refine_points"});
        cfg.sweep.span_mhz = get_opt(wj, "span_mhz");
        cfg.sweep.points = static_cast<int>(get_number(wj, "points", 201));
        cfg.sweep.refine_points =
            static_cast<int>(get_number(wj, "refine_points", 41));
        if (cfg.sweep.points < 2) {
            throw ConfigError("sweep: points must be >= 2");
        }
    }

    if (root.contains("delays_us")) {
        cfg.delays_us = parse_number_list(root["delays_us"], "delays_us");
        for (double d : cfg.delays_us) {
            if (d < 0.0) throw ConfigError("delays_us must be >= 0");
        }
    }
    if (root.contains("readout_g_mhz_list")) {
        cfg.readout_g_list =
            parse_number_list(root["readout_g_mhz_list"], "readout_g_mhz_list");
        for (double& g : cfg.readout_g_list) g = rad_per_us_from_mhz(g);
    }
    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string()) {
            throw ConfigError("\"output_dir\" must be a string");
        }
        cfg.output_dir = root["output_dir"].get<std::string>();
    }
    return cfg;
}

namespace {

std::string fmt_g(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

}  // namespace

std::string list_presets_text() {
    std::ostringstream os;
    os << "samples:\n";
    for (const auto& label : preset_labels()) {
        const SystemParams p = preset_by_label(label);
        os << "  " << label << ": ("
           << fmt_g(mhz_from_rad_per_us(p.mechanical.omega_m)) << ", "
           << fmt_g(mhz_from_rad_per_us(p.mechanical.gamma_m)) << ", "
           << fmt_g(mhz_from_rad_per_us(p.optical.kappa))
           << ") MHz  [(omega_m, gamma_m, kappa)/2pi; kappa_ext = kappa/2; "
           << "G calibration " << fmt_g(p.calibration.p_ref_mw) << " mW -> "
           << fmt_g(mhz_from_rad_per_us(p.calibration.g_ref)) << " MHz]\n";
    }
    os << "scenarios:\n"
       << "  fig3          1 us write + signal, 8 us delay, 1 us readout "
          "(pairs with sample-a)\n"
       << "  fig4          readout-power series: 1 us write, 6 us readout at "
          "G/2pi = {0.2, 0.45, 0.6} MHz (sample-b)\n"
       << "  fig5-omit     8 us control, steady-state transparency sweep "
          "(sample-b)\n"
       << "  fig5-storage  8 us write, 3 us readout at 1 mW, storage "
          "spectral sweep (sample-b)\n"
       << "  delay-sweep   fig3 timing with the write-readout delay swept\n";
    return os.str();
}

}  // namespace omls
