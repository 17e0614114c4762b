#include "omls/detection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "omls/numeric.hpp"
#include "omls/units.hpp"

namespace omls {

double BeatRecord::dt() const {
    if (times.size() < 2) return 0.0;
    return times[1] - times[0];
}

RbwFilter rbw_filter_from_name(const std::string& name) {
    if (name == "single-pole") return RbwFilter::SinglePole;
    if (name == "gaussian") return RbwFilter::Gaussian;
    throw std::invalid_argument("unknown RBW filter shape: " + name);
}

std::string to_string(RbwFilter f) {
    return f == RbwFilter::SinglePole ? "single-pole" : "gaussian";
}

BeatRecord synthesize_beat(const Trajectory& traj, const SystemParams& p,
                           double lo_amp, int samples_per_period) {
    if (samples_per_period < 8) {
        throw std::invalid_argument(
            "beat grid undersampled: need >= 8 samples per mechanical period");
    }
    if (traj.times.size() < 2) {
        throw std::invalid_argument("trajectory too short for beat synthesis");
    }
    const double f_m = mhz_from_rad_per_us(p.mechanical.omega_m);  // cycles/us
    const double dt = 1.0 / (samples_per_period * f_m);
    const double t_end = traj.times.back();
    const auto n = static_cast<std::size_t>(std::floor(t_end / dt)) + 1;

    const PulseSequence& seq = traj.sequence;
    const double g_peak = seq.peak_g();
    const double delta = seq.signal.detuning;
    const double sqrt_kext = std::sqrt(p.optical.kappa_ext);

    BeatRecord rec;
    rec.lo_reference = seq.readout ? "writing+readout" : "writing";
    rec.times.resize(n);
    rec.voltage.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        rec.times[i] = t;
        const DriveState d = sequence_at(seq, t);
        const double lo =
            g_peak > 0.0 ? lo_amp * d.g / g_peak : 0.0;
        if (lo == 0.0) {
            rec.voltage[i] = 0.0;
            continue;
        }
        // Carrier at the actual frame offset; omega_m on the standard
        // red-sideband timelines.
        const double w_beat = delta - d.drive_detuning;
        const cplx carrier{std::cos(w_beat * t), -std::sin(w_beat * t)};
        rec.voltage[i] =
            2.0 * lo * sqrt_kext * (traj.alpha_at(t) * carrier).real();
    }
    return rec;
}

namespace {

// |envelope/2|^2 after demodulation at center_mhz and RBW low-passing; for
// a tone v = Re[A exp(-i w t)] at the center this settles to |A|^2 / 4.
//
// A fixed image-reject stage (four cascaded poles at half the center
// frequency) runs ahead of the RBW filter: real mixing leaves an image of
// the tone at twice the center frequency whose |H(2 f_c)|^2 would otherwise
// bias wide-RBW gated powers.
std::vector<double> demodulated_power(const BeatRecord& rec,
                                      const GateConfig& g) {
    if (!(g.rbw_mhz > 0.0)) {
        throw std::invalid_argument("RBW must be positive");
    }
    const double wc = rad_per_us_from_mhz(g.center_mhz);
    const std::size_t n = rec.voltage.size();
    std::vector<cplx> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = rec.times[i];
        z[i] = rec.voltage[i] * cplx{std::cos(wc * t), std::sin(wc * t)};
    }
    const double dt = rec.dt();
    if (g.center_mhz > 0.0) {
        const double w_ir = std::numbers::pi * g.center_mhz;  // f_c / 2
        const double a_ir = 1.0 - std::exp(-w_ir * dt);
        for (int stage = 0; stage < 4; ++stage) {
            cplx y{0.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                y += a_ir * (z[i] - y);
                z[i] = y;
            }
        }
    }
    std::vector<double> out(n);
    if (g.filter == RbwFilter::SinglePole) {
        // one real pole whose -3 dB full width (two-sided) equals the RBW
        const double w3 = std::numbers::pi * g.rbw_mhz;
        const double a = 1.0 - std::exp(-w3 * dt);
        cplx y{0.0, 0.0};
        for (std::size_t i = 0; i < n; ++i) {
            y += a * (z[i] - y);
            out[i] = std::norm(y);
        }
    } else {
        // Gaussian FIR with the same -3 dB full width
        const double sigma =
            std::sqrt(std::numbers::ln2_v<double>) /
            (std::numbers::pi * g.rbw_mhz);
        const auto half = static_cast<long>(std::ceil(4.0 * sigma / dt));
        std::vector<double> kernel(2 * half + 1);
        double norm = 0.0;
        for (long k = -half; k <= half; ++k) {
            const double u = static_cast<double>(k) * dt / sigma;
            kernel[k + half] = std::exp(-0.5 * u * u);
            norm += kernel[k + half];
        }
        for (auto& k : kernel) k /= norm;
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc{0.0, 0.0};
            for (long k = -half; k <= half; ++k) {
                const long j = static_cast<long>(i) + k;
                if (j < 0 || j >= static_cast<long>(n)) continue;
                acc += kernel[k + half] * z[j];
            }
            out[i] = std::norm(acc);
        }
    }
    return out;
}

struct GateWindow {
    std::size_t begin;
    std::size_t end;  // one past last
};

GateWindow gate_indices(const BeatRecord& rec, double start, double length) {
    if (!(length > 0.0)) {
        throw std::invalid_argument("gate length must be positive");
    }
    const auto lo = std::lower_bound(rec.times.begin(), rec.times.end(), start);
    const auto hi =
        std::lower_bound(rec.times.begin(), rec.times.end(), start + length);
    if (lo == hi) {
        throw std::runtime_error("gate does not overlap the beat record");
    }
    return {static_cast<std::size_t>(lo - rec.times.begin()),
            static_cast<std::size_t>(hi - rec.times.begin())};
}

double window_mean(const std::vector<double>& p, GateWindow w) {
    double sum = 0.0;
    for (std::size_t i = w.begin; i < w.end; ++i) sum += p[i];
    return sum / static_cast<double>(w.end - w.begin);
}

}  // namespace

double gated_power(const BeatRecord& rec, const GateConfig& g) {
    const auto power = demodulated_power(rec, g);
    return window_mean(power, gate_indices(rec, g.gate_start, g.gate_length));
}

GateScan gated_power_scan(const BeatRecord& rec, const GateConfig& g,
                          double step) {
    if (!(step > 0.0)) {
        throw std::invalid_argument("scan step must be positive");
    }
    const auto power = demodulated_power(rec, g);
    GateScan scan;
    const double t_last = rec.times.back();
    for (std::size_t k = 0;; ++k) {
        const double start = g.gate_start + static_cast<double>(k) * step;
        if (start + g.gate_length > t_last) break;
        scan.gate_starts.push_back(start);
        scan.power.push_back(
            window_mean(power, gate_indices(rec, start, g.gate_length)));
    }
    return scan;
}

BeatFit estimate_beat(const BeatRecord& rec, double t0, double t1) {
    if (!(t1 > t0)) throw std::invalid_argument("empty beat-fit window");
    const auto lo = std::lower_bound(rec.times.begin(), rec.times.end(), t0);
    const auto hi = std::lower_bound(rec.times.begin(), rec.times.end(), t1);
    const auto i0 = static_cast<std::size_t>(lo - rec.times.begin());
    const auto i1 = static_cast<std::size_t>(hi - rec.times.begin());
    if (i1 - i0 < 16) {
        throw std::invalid_argument("beat-fit window holds too few samples");
    }

    double v_max = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        v_max = std::max(v_max, std::abs(rec.voltage[i]));
    }
    double rec_max = 0.0;
    for (double v : rec.voltage) rec_max = std::max(rec_max, std::abs(v));
    if (v_max <= 1e-12 * std::max(1.0, rec_max)) {
        throw std::runtime_error("beat amplitude below numeric floor");
    }

    // zero-crossing seed for the frequency; good to about one spectral bin
    std::size_t crossings = 0;
    for (std::size_t i = i0 + 1; i < i1; ++i) {
        if ((rec.voltage[i - 1] < 0.0) != (rec.voltage[i] < 0.0)) ++crossings;
    }
    const double span = rec.times[i1 - 1] - rec.times[i0];
    const double f0 = static_cast<double>(crossings) / (2.0 * span);
    if (f0 * span < 5.0) {
        throw std::invalid_argument(
            "beat-fit window holds fewer than 5 beat periods");
    }
    const double bin = 1.0 / span;

    auto residual = [&](double f) {
        const double w = rad_per_us_from_mhz(f);
        double scc = 0.0, sss = 0.0, scs = 0.0, rc = 0.0, rs = 0.0, vv = 0.0;
        for (std::size_t i = i0; i < i1; ++i) {
            const double c = std::cos(w * rec.times[i]);
            const double s = std::sin(w * rec.times[i]);
            const double v = rec.voltage[i];
            scc += c * c;
            sss += s * s;
            scs += c * s;
            rc += v * c;
            rs += v * s;
            vv += v * v;
        }
        const double det = scc * sss - scs * scs;
        if (det == 0.0) return vv;
        const double a = (rc * sss - rs * scs) / det;
        const double b = (rs * scc - rc * scs) / det;
        return vv - a * rc - b * rs;
    };

    // The residual oscillates in f with lobes one bin apart, so scan the
    // seed's neighborhood first and only then polish inside the main lobe.
    double f_best = f0;
    double r_best = residual(f0);
    for (int k = -24; k <= 24; ++k) {
        const double f = f0 + k * bin / 8.0;
        if (f <= 0.0) continue;
        const double r = residual(f);
        if (r < r_best) {
            r_best = r;
            f_best = f;
        }
    }
    const MinResult m = golden_section_min(residual, f_best - bin / 8.0,
                                           f_best + bin / 8.0, 1e-10);
    const double f = m.x;

    // final linear solve at the fitted frequency
    const double w = rad_per_us_from_mhz(f);
    double scc = 0.0, sss = 0.0, scs = 0.0, rc = 0.0, rs = 0.0;
    for (std::size_t i = i0; i < i1; ++i) {
        const double c = std::cos(w * rec.times[i]);
        const double s = std::sin(w * rec.times[i]);
        scc += c * c;
        sss += s * s;
        scs += c * s;
        rc += rec.voltage[i] * c;
        rs += rec.voltage[i] * s;
    }
    const double det = scc * sss - scs * scs;
    const double a = (rc * sss - rs * scs) / det;
    const double b = (rs * scc - rc * scs) / det;

    BeatFit fit;
    fit.frequency_mhz = f;
    fit.phase = std::atan2(b, a);  // v = Re[(a + i b) exp(-i w t)]
    fit.amplitude = std::hypot(a, b);
    return fit;
}

}  // namespace omls
