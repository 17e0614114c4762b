#pragma once

#include <span>
#include <string>
#include <vector>

#include "omls/analytic.hpp"
#include "omls/detection.hpp"
#include "omls/dynamics.hpp"

namespace omls {

enum class SpectrumKind { Omit, Storage };

struct Spectrum {
    std::vector<double> detuning_mhz;  // signal minus control, strictly increasing
    std::vector<double> power;         // arb. units
    SpectrumKind kind = SpectrumKind::Omit;
    bool steady_state_warning = false;
};

// detuning_mhz, power
void spectrum_to_csv(const Spectrum& spec, const std::string& path);

struct StorageResult {
    Trajectory trajectory;
    BeatRecord beats;
    GateScan scan;
    double retrieved_energy = 0.0;  // photons out the ext port, readout window
    double stored_phonons_at_readout = 0.0;  // |beta|^2 at nominal readout start
    double readout_window_begin = 0.0;       // us
    double readout_window_end = 0.0;         // us
};

struct StorageRunOptions {
    std::optional<double> dt;     // us; default recommended_dt
    std::optional<double> t_end;  // us; default suggested_t_end
    double lo_amp = 1.0;
    int samples_per_period = 16;
    double scan_step = 0.05;  // us
};

// Full storage pipeline: integrate, synthesize the heterodyne beat, scan the
// gate across the record.
StorageResult run_light_storage(const SystemParams& p, const PulseSequence& s,
                                const GateConfig& gate,
                                const StorageRunOptions& opt = {});

struct DelaySeries {
    std::vector<double> delays;            // us
    std::vector<double> retrieved_energy;  // photons
    double fitted_rate = 0.0;  // rad/us, single-exponential energy decay
};

// Re-times the readout of `base` for each delay and integrates the retrieved
// energy. The fitted rate tracks the free mechanical energy decay gamma_m.
DelaySeries storage_energy_vs_delay(const SystemParams& p,
                                    const PulseSequence& base,
                                    std::span<const double> delays,
                                    unsigned threads = 0);

struct ReadoutTrace {
    double g = 0.0;              // rad/us
    BeatRecord beats;            // readout window
    double fitted_rate = 0.0;    // rad/us, retrieved amplitude decay
    double predicted_rate = 0.0; // gamma_m/2 + 2 G^2/kappa
    bool adiabatic = true;
};

// One storage-and-long-readout run per coupling rate (the readout-power
// series): the stored excitation is read out over 6 us and the retrieved
// envelope decay is fitted.
std::vector<ReadoutTrace> run_readout_series(const SystemParams& p,
                                             std::span<const double> g_values,
                                             const SequenceOverrides& o = {},
                                             unsigned threads = 0);

// 201 points across +/- span (default 3 kappa) merged with a 41-point dense
// segment across the transparency dip. rad/us, strictly increasing.
std::vector<double> default_detuning_grid(const SystemParams& p,
                                          double control_g, double span = 0.0,
                                          int points = 201,
                                          int refine_points = 41);

// Steady-state emission vs signal detuning under a long control pulse. The
// gate's center frequency is retuned per point to the actual beat frequency,
// the way a swept analyzer follows the tone. Sets steady_state_warning when
// the gate opens before 5/gamma_eff of settling.
Spectrum run_omit_sweep(const SystemParams& p, double control_g,
                        std::span<const double> detunings,
                        const GateConfig& gate, const SequenceOverrides& o = {},
                        unsigned threads = 0);

// Retrieved-pulse power vs signal detuning for the storage timeline. The
// retrieved beat sits at omega_m for every detuning, so the gate center is
// used as given.
Spectrum run_storage_sweep(const SystemParams& p,
                           std::span<const double> detunings,
                           const GateConfig& gate,
                           const SequenceOverrides& o = {},
                           unsigned threads = 0);

struct DipMeasurement {
    double position_mhz = 0.0;  // detuning at maximum depth
    double width_mhz = 0.0;     // full width at half depth
    double depth_ratio = 0.0;   // dip floor / local envelope
};

// Measures the transparency dip against the bare-cavity envelope shape,
// amplitude-matched away from the dip.
DipMeasurement measure_omit_dip(const Spectrum& spec, const SystemParams& p);

// Detuning of the maximum spectrum point.
double spectrum_peak_mhz(const Spectrum& spec);

struct CooperativityFit {
    double c = 0.0;
    double residual = 0.0;
    int iterations = 0;
    double scale = 0.0;  // amplitude match factor (not a fit parameter)
};

// One-parameter least squares of the steady-state response against the
// spectrum; the overall amplitude is pinned to the off-dip envelope median,
// leaving the cooperativity as the only adjustable parameter.
CooperativityFit fit_cooperativity(const Spectrum& spec, const SystemParams& p);

}  // namespace omls
