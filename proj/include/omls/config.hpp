#pragma once

#include <optional>
#include <string>
#include <vector>

#include "omls/detection.hpp"
#include "omls/model.hpp"
#include "omls/scenarios.hpp"
#include "omls/sequence.hpp"

namespace omls {

enum class ScenarioKind { Fig3, Fig4, Fig5Omit, Fig5Storage, DelaySweep };

ScenarioKind scenario_from_name(const std::string& name);
std::string to_string(ScenarioKind k);

struct DetectionSettings {
    std::optional<double> rbw_mhz;
    std::optional<double> gate_start;   // us
    std::optional<double> gate_length;  // us
    std::optional<double> scan_step;    // us
    int samples_per_period = 16;
    RbwFilter filter = RbwFilter::SinglePole;
    double lo_amp = 1.0;
};

struct GridSettings {
    std::optional<double> dt;     // us
    std::optional<double> t_end;  // us
};

struct SweepRanges {
    std::optional<double> span_mhz;
    int points = 201;
    int refine_points = 41;
};

// A fully resolved run: sample parameters, scenario, and every override.
// Unknown configuration keys are a hard error; every field here has a
// documented default.
struct RunConfig {
    SystemParams params = sample_a();
    ScenarioKind scenario = ScenarioKind::Fig3;
    SequenceOverrides sequence;
    GridSettings grid;
    DetectionSettings detection;
    SweepRanges sweep;
    std::vector<double> delays_us{0.0, 8.0, 16.0, 24.0, 32.0};
    std::vector<double> readout_g_list;  // rad/us; empty = fig4 defaults
    std::string output_dir = "out";
};

// Parses and validates a JSON configuration. Throws ConfigError with a
// field-level message on any problem, including hard parameter-validation
// failures.
RunConfig load_config(const std::string& path);

std::string list_presets_text();

struct CliOptions {
    std::string out_dir;  // overrides config output_dir when non-empty
    unsigned threads = 0;
    bool force = false;
    bool gnuplot = false;
};

// Runs the configured scenario and writes its CSV artifacts plus
// summary.json. Computation happens before any file is created, so failed
// runs leave no partial outputs.
int run_scenario(const RunConfig& cfg, const CliOptions& opt);

// Exit codes: 0 ok, 1 configuration error, 2 runtime/divergence error.
int cli_main(int argc, const char* const* argv);

}  // namespace omls
