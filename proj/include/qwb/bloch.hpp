#ifndef QWB_BLOCH_HPP
#define QWB_BLOCH_HPP

#include "qwb/scattering.hpp"

#include <complex>
#include <span>
#include <vector>

namespace qwb {

// Expectation values in the probe rotating frame.
struct BlochState {
    std::complex<double> coherence{0.0, 0.0};  // <sigma_minus>
    double inversion{-1.0};                    // <sigma_z>
};

struct TransientResult {
    double dt = 0.0;
    std::vector<double> time;                        // s
    std::vector<std::complex<double>> coherence;
    std::vector<double> inversion;
    std::vector<std::complex<double>> v3, v4;        // output fields, V
    std::vector<double> T, R;
};

// Unique fixed point of the Bloch equations; reproduces the closed-form
// reflection coefficient in the weak-drive limit and beyond. Omega = 0
// returns the ground state.
BlochState bloch_steady_state(const QubitParams& params, const DriveCondition& drive);

// Reflection coefficient reconstructed from a state at drive strength
// rabi > 0: r = i e^{i phi} (Gamma/Omega) <sigma_minus>.
std::complex<double> reflection_from_state(const QubitParams& params,
                                           const BlochState& state, double rabi);

// Fixed-step classical RK4 integration of the Bloch equations with
// time-dependent drive envelope (rad/s) and qubit frequency trajectory
// (rad/s), both sampled on a uniform grid with spacing dt. The incident
// field is v_in(t) = vin_per_rabi * rabi(t); outputs are
// v4 = i e^{i phi} Gamma <sigma_minus> vin_per_rabi and v3 = v_in + v4,
// which avoids any division by the envelope at pulse edges.
TransientResult integrate_bloch(const QubitParams& params, double omega_p,
                                std::span<const double> rabi,
                                std::span<const double> omega_traj, double dt,
                                BlochState initial,
                                std::complex<double> vin_per_rabi);

} // namespace qwb

#endif
