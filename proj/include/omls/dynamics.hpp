#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "omls/model.hpp"
#include "omls/sequence.hpp"

namespace omls {

using cplx = std::complex<double>;

// Intracavity signal amplitude (sqrt photons) and mechanical amplitude
// (sqrt phonons), both in the co-rotating frame of the coupled-mode
// equations: at Delta = -omega_m and a resonant signal the dynamics are
// slow (rates kappa, gamma_m, G) and the omega_m carrier only reappears in
// the detection stage.
struct ModeState {
    cplx alpha{0.0, 0.0};
    cplx beta{0.0, 0.0};
};

struct ModeDerivative {
    cplx dalpha;
    cplx dbeta;
};

// Coupled-mode equations:
//   dalpha/dt = (i delta - kappa/2) alpha - i G beta + sqrt(kappa_ext) A_in
//   dbeta/dt  = (i (delta - Delta - omega_m) - gamma_m/2) beta - i G alpha
// with delta = omega_in - omega0 the signal detuning.
ModeDerivative eom_derivative(const ModeState& s, const DriveState& drive,
                              const SystemParams& p, double delta);

// Input-output convention: A_out = A_in - sqrt(kappa_ext) * alpha.
cplx output_field(cplx alpha, cplx a_in, double kappa_ext);

// kappa_ext |alpha|^2 in photons/us; the observable the gated-heterodyne
// measurement is proportional to.
double emitted_power(cplx alpha, double kappa_ext);

struct Grid {
    double t_end;  // us
    double dt;     // us
};

struct Trajectory {
    std::vector<double> times;  // uniform, times[i] = i * dt
    std::vector<cplx> alpha;
    std::vector<cplx> beta;
    std::vector<cplx> a_out;
    SystemParams params = sample_a();  // placeholder until integrate fills it
    PulseSequence sequence;
    double dt = 0.0;

    std::size_t size() const { return times.size(); }
    std::size_t index_at(double t) const;  // nearest grid index
    cplx alpha_at(double t) const;         // linear interpolation
    double emitted_power_at(std::size_t i) const;
    std::vector<double> emitted_power_series() const;
};

// Fixed-step classical RK4 over the pulse sequence; deterministic and
// reentrant. Throws DivergenceError naming the first bad time if the state
// leaves |alpha|, |beta| <= 1e12 or turns non-finite.
Trajectory integrate(const PulseSequence& s, const SystemParams& p,
                     const Grid& grid, const ModeState& initial = {});

// dt <= safety / max(kappa, G_peak, |delta|, gamma_m), then snapped so an
// integer number of steps spans 0.01 us. The standard timelines put every
// envelope breakpoint on that lattice, which keeps each RK4 step inside one
// smooth envelope piece and preserves fourth-order convergence.
double recommended_dt(const PulseSequence& s, const SystemParams& p,
                      double safety = 0.02);

}  // namespace omls
