#pragma once

#include <complex>
#include <optional>
#include <string>

#include "omls/model.hpp"

namespace omls {

// Rectangular pulse with raised-cosine edges. Each edge ramp has total
// width edge_time and is centered on the nominal switch instant, so the
// envelope is C^1, its area equals peak * duration exactly, and its support
// is [t_start - edge_time/2, t_start + duration + edge_time/2].
struct PulseEnvelope {
    double t_start = 0.0;    // us
    double duration = 1.0;   // us, > 0
    double peak = 0.0;       // rad/us for drives, sqrt(photons/us) for signals
    double edge_time = 0.02; // us; 0 gives a sharp rectangle

    double value(double t) const;
    double support_begin() const { return t_start - 0.5 * edge_time; }
    double support_end() const { return t_start + duration + 0.5 * edge_time; }
};

double envelope_value(const PulseEnvelope& e, double t);

struct SignalInput {
    PulseEnvelope envelope;  // peak in sqrt(photons/us)
    double detuning = 0.0;   // delta = omega_in - omega0, rad/us
    double phase = 0.0;      // rad
};

struct DriveTone {
    PulseEnvelope envelope;  // peak is G at full power, rad/us
    double detuning = 0.0;   // Delta = omega_drive - omega0, rad/us
};

// Instantaneous equation-of-motion inputs.
struct DriveState {
    double g = 0.0;                        // rad/us
    double drive_detuning = 0.0;           // Delta, rad/us
    std::complex<double> a_in{0.0, 0.0};   // sqrt(photons/us)
};

// The experiment script: a writing tone, the signal it stores, and an
// optional readout tone. The writing and signal pulses share timing by
// default (built that way by standard_sequence).
struct PulseSequence {
    DriveTone writing;
    SignalInput signal;
    std::optional<DriveTone> readout;

    // End of the nominal writing pulse to start of the nominal readout.
    double delay() const;
    double peak_g() const;
    double last_support_end() const;
    // Throws std::invalid_argument if the writing and readout envelopes
    // overlap while carrying different drive detunings.
    void validate() const;
};

DriveState sequence_at(const PulseSequence& s, double t);

enum class SequenceKind { Fig3, Fig4, Fig5Omit, Fig5Storage };

SequenceKind sequence_kind_from_name(const std::string& name);
std::string to_string(SequenceKind k);

struct SequenceOverrides {
    std::optional<double> write_g;           // rad/us
    std::optional<double> write_duration;    // us
    std::optional<double> readout_g;         // rad/us
    std::optional<double> readout_duration;  // us
    std::optional<double> delay;             // us
    std::optional<double> signal_amp;        // sqrt(photons/us)
    std::optional<double> signal_detuning;   // rad/us
    std::optional<double> signal_phase;      // rad
    std::optional<double> edge_time;         // us
    std::optional<double> drive_detuning;    // rad/us; default -omega_m
    std::optional<double> lead_time;         // us before the writing pulse
};

// Standard experiment timelines. Drives sit on the red sideband
// (Delta = -omega_m) and the signal is resonant unless overridden.
//   Fig3       1 us write, 8 us delay, 1 us readout, G/2pi = 0.77 MHz
//   Fig4       1 us write (G/2pi = 0.45), 1 us delay, 6 us readout
//   Fig5Omit   8 us control (G/2pi = 0.38), no readout
//   Fig5Storage8 us write (G/2pi = 0.38), then a 3 us readout at 1 mW
// Timeline instants land on a 0.01 us lattice so integrator grids can align
// with the envelope edge breakpoints.
PulseSequence standard_sequence(SequenceKind kind, const SystemParams& p,
                                const SequenceOverrides& o = {});

// Simulation window covering the last pulse plus ring-down.
double suggested_t_end(const PulseSequence& s);

}  // namespace omls
