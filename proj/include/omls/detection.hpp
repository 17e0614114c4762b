#pragma once

#include <string>
#include <vector>

#include "omls/dynamics.hpp"

namespace omls {

// Real heterodyne voltage on a fine uniform grid that resolves the
// mechanical-frequency beat (>= 8 samples per period).
//
// Phase convention: a component written v(t) = Re[A exp(-i 2pi f t)] has
// complex envelope A; gated demodulation and estimate_beat both report the
// phase of A, so an input-signal phase shift theta moves the reported beat
// phase by exactly +theta.
struct BeatRecord {
    std::vector<double> times;    // us
    std::vector<double> voltage;  // arb. units
    std::string lo_reference;     // which drive served as local oscillator

    double dt() const;
};

enum class RbwFilter { SinglePole, Gaussian };

RbwFilter rbw_filter_from_name(const std::string& name);
std::string to_string(RbwFilter f);

// Gated spectrum-analyzer settings. rbw_mhz is the full -3 dB width of the
// post-demodulation filter; together with gate_length it sets the time
// resolution of a gated trace.
struct GateConfig {
    double gate_start = 0.0;   // us
    double gate_length = 0.1;  // us, > 0
    double rbw_mhz = 30.0;     // > 0
    double center_mhz = 0.0;   // demodulation frequency, usually omega_m/2pi
    RbwFilter filter = RbwFilter::SinglePole;
};

// Beat of the cavity emission against the drive tone serving as local
// oscillator: v(t) = 2 lo(t) sqrt(kappa_ext) Re[alpha(t) exp(-i (delta -
// Delta) t)]. The carrier is the actual frame offset delta - Delta, which is
// exactly omega_m for every standard timeline (resonant signal, red-sideband
// drive). lo(t) follows the active drive envelope, normalized to its peak
// and scaled by lo_amp.
BeatRecord synthesize_beat(const Trajectory& traj, const SystemParams& p,
                           double lo_amp, int samples_per_period = 16);

// Demodulate at center_mhz, low-pass at the RBW, and average the squared
// envelope magnitude over the gate window. Throws if the gate does not
// overlap the record.
double gated_power(const BeatRecord& rec, const GateConfig& g);

struct GateScan {
    std::vector<double> gate_starts;  // us
    std::vector<double> power;        // arb. units
};

// gated_power evaluated at gate_start + k*step for every gate that fits in
// the record.
GateScan gated_power_scan(const BeatRecord& rec, const GateConfig& g,
                          double step);

struct BeatFit {
    double frequency_mhz = 0.0;
    double phase = 0.0;      // rad, of the complex envelope (see above)
    double amplitude = 0.0;  // arb. units
};

// Least-squares sinusoid fit over [t0, t1]. Errors if the window holds
// fewer than 5 beat periods or the signal is at the numeric floor.
BeatFit estimate_beat(const BeatRecord& rec, double t0, double t1);

}  // namespace omls
