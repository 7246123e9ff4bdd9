#ifndef QWB_TRANSMON_HPP
#define QWB_TRANSMON_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace qwb {

// SQUID-tunable transmon energies and the flux-line calibration.
// Energies are stored as E/h in Hz.
struct TransmonSpec {
    double ej_hz;          // Josephson energy E_J/h
    double ec_hz;          // charging energy E_C/h
    double flux_per_volt;  // flux-line conversion, Phi0 per volt
    double flux_offset;    // flux at zero control voltage, Phi0

    void validate() const;  // throws DomainError
};

// Flux-pulse voltage samples on a uniform time grid.
struct FluxPulse {
    std::vector<double> volts;
    double dt;  // s
};

// Transition frequency omega/2pi in Hz at the given flux (Phi0 units):
// sqrt(8 E_J E_C |cos(pi*flux)|) - E_C. Throws DomainError when the flux
// sits too close to a half-integer for the dispersion to stay positive.
double freq_at_flux(const TransmonSpec& spec, double flux);

// Principal-branch inverse on [0, 0.5), bisection to 1 Hz.
double flux_for_freq(const TransmonSpec& spec, double freq_hz);

// Sample-wise frequency trajectory (Hz) for base_flux + flux_per_volt*V(t).
std::vector<double> pulse_to_freq_trajectory(const TransmonSpec& spec,
                                             double base_flux,
                                             const FluxPulse& pulse);

// Flat-top pulse with Gaussian (erf) edges; returns voltage samples covering
// [0, pre + plateau + post], edges centered at pre and pre + plateau.
std::vector<double> gaussian_square_pulse(double amp_v, double pre_s,
                                          double plateau_s, double rise_sigma_s,
                                          double post_s, double dt);

} // namespace qwb

#endif
