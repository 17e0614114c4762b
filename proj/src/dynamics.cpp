#include "omls/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "omls/errors.hpp"

namespace omls {

namespace {
constexpr cplx kImag{0.0, 1.0};
constexpr double kDivergenceBound = 1e12;
}  // namespace

ModeDerivative eom_derivative(const ModeState& s, const DriveState& drive,
                              const SystemParams& p, double delta) {
    const double kappa = p.optical.kappa;
    const double kext = p.optical.kappa_ext;
    const double gm = p.mechanical.gamma_m;
    const double wm = p.mechanical.omega_m;

    ModeDerivative d;
    d.dalpha = (kImag * delta - 0.5 * kappa) * s.alpha -
               kImag * drive.g * s.beta + std::sqrt(kext) * drive.a_in;
    d.dbeta = (kImag * (delta - drive.drive_detuning - wm) - 0.5 * gm) *
                  s.beta -
              kImag * drive.g * s.alpha;
    return d;
}

cplx output_field(cplx alpha, cplx a_in, double kappa_ext) {
    return a_in - std::sqrt(kappa_ext) * alpha;
}

double emitted_power(cplx alpha, double kappa_ext) {
    return kappa_ext * std::norm(alpha);
}

std::size_t Trajectory::index_at(double t) const {
    if (times.empty()) return 0;
    const double i = t / dt;
    const long long n = std::llround(i);
    if (n < 0) return 0;
    if (n >= static_cast<long long>(times.size()))
        return times.size() - 1;
    return static_cast<std::size_t>(n);
}

cplx Trajectory::alpha_at(double t) const {
    if (times.empty()) return {0.0, 0.0};
    const double pos = t / dt;
    if (pos <= 0.0) return alpha.front();
    const auto lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= alpha.size()) return alpha.back();
    const double w = pos - static_cast<double>(lo);
    return alpha[lo] * (1.0 - w) + alpha[lo + 1] * w;
}

double Trajectory::emitted_power_at(std::size_t i) const {
    return emitted_power(alpha.at(i), params.optical.kappa_ext);
}

std::vector<double> Trajectory::emitted_power_series() const {
    std::vector<double> out(alpha.size());
    for (std::size_t i = 0; i < alpha.size(); ++i) out[i] = emitted_power_at(i);
    return out;
}

namespace {

void check_state(const ModeState& y, double t) {
    const bool finite = std::isfinite(y.alpha.real()) &&
                        std::isfinite(y.alpha.imag()) &&
                        std::isfinite(y.beta.real()) &&
                        std::isfinite(y.beta.imag());
    if (!finite || std::abs(y.alpha) > kDivergenceBound ||
        std::abs(y.beta) > kDivergenceBound) {
        std::ostringstream os;
        os << "integration diverged at t = " << t
           << " us (check units and dt)";
        throw DivergenceError(t, os.str());
    }
}

}  // namespace

Trajectory integrate(const PulseSequence& s, const SystemParams& p,
                     const Grid& grid, const ModeState& initial) {
    if (!(grid.dt > 0.0) || !(grid.t_end > 0.0)) {
        throw std::invalid_argument("grid requires positive dt and t_end");
    }
    s.validate();
    const double delta = s.signal.detuning;
    const auto n_steps = static_cast<std::size_t>(
        std::llround(grid.t_end / grid.dt));

    Trajectory traj;
    traj.params = p;
    traj.sequence = s;
    traj.dt = grid.dt;
    traj.times.resize(n_steps + 1);
    traj.alpha.resize(n_steps + 1);
    traj.beta.resize(n_steps + 1);
    traj.a_out.resize(n_steps + 1);

    auto rhs = [&](const ModeState& y, double t) {
        return eom_derivative(y, sequence_at(s, t), p, delta);
    };

    ModeState y = initial;
    const double dt = grid.dt;
    const double kext = p.optical.kappa_ext;
    for (std::size_t i = 0; i <= n_steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        traj.times[i] = t;
        traj.alpha[i] = y.alpha;
        traj.beta[i] = y.beta;
        traj.a_out[i] = output_field(y.alpha, sequence_at(s, t).a_in, kext);
        if (i == n_steps) break;

        const ModeDerivative k1 = rhs(y, t);
        const ModeState y2{y.alpha + 0.5 * dt * k1.dalpha,
                           y.beta + 0.5 * dt * k1.dbeta};
        const ModeDerivative k2 = rhs(y2, t + 0.5 * dt);
        const ModeState y3{y.alpha + 0.5 * dt * k2.dalpha,
                           y.beta + 0.5 * dt * k2.dbeta};
        const ModeDerivative k3 = rhs(y3, t + 0.5 * dt);
        const ModeState y4{y.alpha + dt * k3.dalpha, y.beta + dt * k3.dbeta};
        const ModeDerivative k4 = rhs(y4, t + dt);

        y.alpha += dt / 6.0 *
                   (k1.dalpha + 2.0 * k2.dalpha + 2.0 * k3.dalpha + k4.dalpha);
        y.beta += dt / 6.0 *
                  (k1.dbeta + 2.0 * k2.dbeta + 2.0 * k3.dbeta + k4.dbeta);
        check_state(y, t + dt);
    }
    return traj;
}

double recommended_dt(const PulseSequence& s, const SystemParams& p,
                      double safety) {
    double max_rate = std::max(
        {p.optical.kappa, p.mechanical.gamma_m, s.peak_g(),
         std::abs(s.signal.detuning),
         std::abs(s.signal.detuning - s.writing.detuning -
                  p.mechanical.omega_m)});
    max_rate = std::max(max_rate, 1.0);
    double dt = safety / max_rate;
    const double edge = s.writing.envelope.edge_time;
    if (edge > 0.0) dt = std::min(dt, 0.25 * edge);
    dt = std::min(dt, 0.01);
    // snap: an integer number of steps per 0.01 us
    const double m = std::ceil(0.01 / dt);
    return 0.01 / m;
}

}  // namespace omls
