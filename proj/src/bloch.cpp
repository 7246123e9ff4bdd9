#include "qwb/bloch.hpp"
#include "qwb/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qwb {

// Rotating-frame Bloch equations, sign convention fixed so the fixed point
// reproduces the closed-form reflection coefficient:
//   ds/dt  = -(i*delta + gamma) s - i (Omega/2) sz
//   dsz/dt = -Gamma (sz + 1) + 2 Omega Im(s)

namespace {

struct Derivs {
    std::complex<double> ds;
    double dsz;
};

inline Derivs bloch_rhs(const BlochState& x, double delta, double rabi,
                        double gamma, double Gamma) {
    Derivs d;
    d.ds = -(std::complex<double>(gamma, delta)) * x.coherence -
           std::complex<double>(0.0, 0.5 * rabi) * x.inversion;
    d.dsz = -Gamma * (x.inversion + 1.0) + 2.0 * rabi * x.coherence.imag();
    return d;
}

inline BlochState advance(const BlochState& x, const Derivs& d, double h) {
    return BlochState{x.coherence + h * d.ds, x.inversion + h * d.dsz};
}

} // namespace

BlochState bloch_steady_state(const QubitParams& params, const DriveCondition& drive) {
    params.validate();
    if (drive.rabi < 0.0 || !std::isfinite(drive.rabi) || !std::isfinite(drive.omega_p))
        throw DomainError("invalid drive");
    if (drive.rabi == 0.0) return BlochState{};  // undriven ground state

    const double g = params.gamma();
    const double d = drive.detuning(params);
    const double l2 = g * g + d * d;
    const double sz = -params.Gamma * l2 / (params.Gamma * l2 + drive.rabi * drive.rabi * g);
    const std::complex<double> s =
        -(0.5 * drive.rabi) * std::complex<double>(d, g) * sz / l2;
    return BlochState{s, sz};
}

std::complex<double> reflection_from_state(const QubitParams& params,
                                           const BlochState& state, double rabi) {
    if (!(rabi > 0.0))
        throw UsageError("reflection_from_state requires a nonzero drive");
    const std::complex<double> phase(std::cos(params.phi), std::sin(params.phi));
    return std::complex<double>(0.0, 1.0) * phase * (params.Gamma / rabi) *
           state.coherence;
}

TransientResult integrate_bloch(const QubitParams& params, double omega_p,
                                std::span<const double> rabi,
                                std::span<const double> omega_traj, double dt,
                                BlochState initial,
                                std::complex<double> vin_per_rabi) {
    params.validate();
    if (rabi.size() != omega_traj.size())
        throw UsageError("envelope and frequency trajectory grids differ");
    if (rabi.size() < 2)
        throw UsageError("need at least 2 samples to integrate");
    if (!(dt > 0.0))
        throw UsageError("dt must be positive");

    const double g = params.gamma();
    double scale = params.Gamma;
    for (std::size_t i = 0; i < rabi.size(); ++i) {
        scale = std::max(scale, std::fabs(omega_p - omega_traj[i]));
        scale = std::max(scale, rabi[i]);
    }
    if (dt > 0.05 / scale)
        throw UsageError("dt violates stability contract; need dt <= " +
                         std::to_string(0.05 / scale) + " s");

    const std::size_t n = rabi.size();
    TransientResult out;
    out.dt = dt;
    out.time.resize(n);
    out.coherence.resize(n);
    out.inversion.resize(n);
    out.v3.resize(n);
    out.v4.resize(n);
    out.T.resize(n);
    out.R.resize(n);

    const std::complex<double> phase(std::cos(params.phi), std::sin(params.phi));
    const std::complex<double> i_unit(0.0, 1.0);

    auto record = [&](std::size_t k, const BlochState& x) {
        out.time[k] = static_cast<double>(k) * dt;
        out.coherence[k] = x.coherence;
        out.inversion[k] = x.inversion;
        const std::complex<double> v4 =
            i_unit * phase * params.Gamma * x.coherence * vin_per_rabi;
        const std::complex<double> vin = vin_per_rabi * rabi[k];
        out.v4[k] = v4;
        out.v3[k] = vin + v4;
        if (rabi[k] > 0.0) {
            const std::complex<double> r = reflection_from_state(params, x, rabi[k]);
            out.R[k] = std::norm(r);
            out.T[k] = std::norm(1.0 + r);
        } else {
            out.T[k] = 1.0;
            out.R[k] = 0.0;
        }
    };

    BlochState x = initial;
    record(0, x);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double d0 = omega_p - omega_traj[k];
        const double d1 = omega_p - omega_traj[k + 1];
        const double dm = 0.5 * (d0 + d1);  // linear interpolation at half step
        const double w0 = rabi[k];
        const double w1 = rabi[k + 1];
        const double wm = 0.5 * (w0 + w1);

        const Derivs k1 = bloch_rhs(x, d0, w0, g, params.Gamma);
        const Derivs k2 = bloch_rhs(advance(x, k1, 0.5 * dt), dm, wm, g, params.Gamma);
        const Derivs k3 = bloch_rhs(advance(x, k2, 0.5 * dt), dm, wm, g, params.Gamma);
        const Derivs k4 = bloch_rhs(advance(x, k3, dt), d1, w1, g, params.Gamma);

        x.coherence += (dt / 6.0) * (k1.ds + 2.0 * k2.ds + 2.0 * k3.ds + k4.ds);
        x.inversion += (dt / 6.0) * (k1.dsz + 2.0 * k2.dsz + 2.0 * k3.dsz + k4.dsz);
        record(k + 1, x);
    }
    return out;
}

} // namespace qwb
