#include "omls/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "omls/units.hpp"

namespace omls {

double PulseEnvelope::value(double t) const {
    if (!(duration > 0.0)) {
        throw std::invalid_argument("pulse duration must be positive");
    }
    const double t_end = t_start + duration;
    if (edge_time <= 0.0) {
        return (t >= t_start && t < t_end) ? peak : 0.0;
    }
    const double half = 0.5 * edge_time;
    if (t <= t_start - half || t >= t_end + half) return 0.0;
    if (t < t_start + half) {
        // rising raised-cosine ramp centered on t_start
        const double x = (t - (t_start - half)) / edge_time;
        return peak * 0.5 * (1.0 - std::cos(std::numbers::pi * x));
    }
    if (t > t_end - half) {
        const double x = ((t_end + half) - t) / edge_time;
        return peak * 0.5 * (1.0 - std::cos(std::numbers::pi * x));
    }
    return peak;
}

double envelope_value(const PulseEnvelope& e, double t) { return e.value(t); }

double PulseSequence::delay() const {
    if (!readout) return 0.0;
    return readout->envelope.t_start -
           (writing.envelope.t_start + writing.envelope.duration);
}

double PulseSequence::peak_g() const {
    double g = writing.envelope.peak;
    if (readout) g = std::max(g, readout->envelope.peak);
    return g;
}

double PulseSequence::last_support_end() const {
    double e = std::max(writing.envelope.support_end(),
                        signal.envelope.support_end());
    if (readout) e = std::max(e, readout->envelope.support_end());
    return e;
}

void PulseSequence::validate() const {
    if (!(writing.envelope.duration > 0.0) ||
        !(signal.envelope.duration > 0.0)) {
        throw std::invalid_argument("pulse duration must be positive");
    }
    if (!readout) return;
    if (!(readout->envelope.duration > 0.0)) {
        throw std::invalid_argument("pulse duration must be positive");
    }
    const bool overlap =
        writing.envelope.support_end() > readout->envelope.support_begin() &&
        readout->envelope.support_end() > writing.envelope.support_begin();
    if (overlap && writing.detuning != readout->detuning) {
        throw std::invalid_argument(
            "writing and readout envelopes overlap with different drive "
            "detunings");
    }
}

DriveState sequence_at(const PulseSequence& s, double t) {
    DriveState d;
    const double gw = s.writing.envelope.value(t);
    double gr = 0.0;
    if (s.readout) gr = s.readout->envelope.value(t);
    if (gw > 0.0 && gr > 0.0 && s.writing.detuning != s.readout->detuning) {
        throw std::invalid_argument(
            "writing and readout envelopes overlap with different drive "
            "detunings");
    }
    d.g = gw + gr;
    // The frame detuning follows the active tone; in the dark interval it
    // keeps the nearer tone's value (both tones agree on all presets).
    d.drive_detuning =
        (s.readout && t >= s.readout->envelope.support_begin())
            ? s.readout->detuning
            : s.writing.detuning;
    const double a = s.signal.envelope.value(t);
    d.a_in = a * std::complex<double>(std::cos(s.signal.phase),
                                      std::sin(s.signal.phase));
    return d;
}

SequenceKind sequence_kind_from_name(const std::string& name) {
    if (name == "fig3") return SequenceKind::Fig3;
    if (name == "fig4") return SequenceKind::Fig4;
    if (name == "fig5-omit") return SequenceKind::Fig5Omit;
    if (name == "fig5-storage") return SequenceKind::Fig5Storage;
    throw std::invalid_argument("unknown sequence preset: " + name);
}

std::string to_string(SequenceKind k) {
    switch (k) {
        case SequenceKind::Fig3: return "fig3";
        case SequenceKind::Fig4: return "fig4";
        case SequenceKind::Fig5Omit: return "fig5-omit";
        case SequenceKind::Fig5Storage: return "fig5-storage";
    }
    throw std::invalid_argument("unknown sequence kind");
}

PulseSequence standard_sequence(SequenceKind kind, const SystemParams& p,
                                const SequenceOverrides& o) {
    const double lead = o.lead_time.value_or(0.5);
    const double edge = o.edge_time.value_or(0.02);
    const double delta_drive =
        o.drive_detuning.value_or(-p.mechanical.omega_m);

    double write_g = 0.0, write_dur = 1.0;
    std::optional<double> read_g;
    double read_dur = 1.0, delay = 0.0;
    switch (kind) {
        case SequenceKind::Fig3:
            write_g = rad_per_us_from_mhz(0.77);
            write_dur = 1.0;
            read_g = write_g;
            read_dur = 1.0;
            delay = 8.0;
            break;
        case SequenceKind::Fig4:
            write_g = rad_per_us_from_mhz(0.45);
            write_dur = 1.0;
            read_g = rad_per_us_from_mhz(0.45);
            read_dur = 6.0;
            delay = 1.0;  // not stated for this run; kept short
            break;
        case SequenceKind::Fig5Omit:
            write_g = rad_per_us_from_mhz(0.38);
            write_dur = 8.0;
            break;
        case SequenceKind::Fig5Storage:
            write_g = rad_per_us_from_mhz(0.38);
            write_dur = 8.0;
            // Readout at 1 mW via the sample calibration, back to back with
            // the end of the writing pulse.
            read_g = coupling_rate_from_power(1.0, p.calibration);
            read_dur = 3.0;
            delay = 0.0;
            break;
    }

    write_g = o.write_g.value_or(write_g);
    write_dur = o.write_duration.value_or(write_dur);
    if (o.readout_g) read_g = *o.readout_g;
    read_dur = o.readout_duration.value_or(read_dur);
    delay = o.delay.value_or(delay);

    const double signal_amp = o.signal_amp.value_or(
        signal_amplitude_from_power(0.1, p));  // P_sig = 0.1 mW everywhere

    PulseSequence s;
    s.writing.envelope = {lead, write_dur, write_g, edge};
    s.writing.detuning = delta_drive;
    // The signal shares the writing pulse timing and duration.
    s.signal.envelope = {lead, write_dur, signal_amp, edge};
    s.signal.detuning = o.signal_detuning.value_or(0.0);
    s.signal.phase = o.signal_phase.value_or(0.0);
    if (read_g) {
        DriveTone r;
        r.envelope = {lead + write_dur + delay, read_dur, *read_g, edge};
        r.detuning = delta_drive;
        s.readout = r;
    }
    s.validate();
    return s;
}

double suggested_t_end(const PulseSequence& s) {
    const double t = s.last_support_end() + 2.0;
    return std::ceil(t * 10.0) / 10.0;
}

}  // namespace omls
