#ifndef QWB_SCATTERING_HPP
#define QWB_SCATTERING_HPP

#include <complex>
#include <span>
#include <vector>

namespace qwb {

inline constexpr double two_pi = 6.283185307179586476925287;

// Parameters of the artificial atom. All rates are angular (rad/s);
// conversion to/from the Hz values used in configs happens at the
// serialization boundary only.
struct QubitParams {
    double omega;    // transition frequency, rad/s
    double Gamma;    // radiative relaxation rate, rad/s
    double Gamma_n;  // non-radiative decoherence rate, rad/s
    double phi;      // impedance-mismatch angle, rad
    double k_rabi;   // Rabi conversion: Omega = sqrt(k_rabi * P), (rad/s)^2 / W

    // Total decoherence rate; always derived, never stored.
    double gamma() const { return 0.5 * Gamma + Gamma_n; }

    void validate() const;  // throws DomainError on violation

    // Construct from the units used in configs (GHz, MHz). phi is wrapped
    // into (-pi, pi].
    static QubitParams from_table(double omega_ghz, double gamma_mhz,
                                  double gamma_n_mhz, double phi_rad,
                                  double k_rabi);
};

struct DriveCondition {
    double omega_p;  // probe frequency, rad/s
    double rabi;     // Rabi frequency Omega, rad/s

    double detuning(const QubitParams& q) const { return omega_p - q.omega; }
};

struct Coefficients {
    std::complex<double> r;  // reflection
    std::complex<double> t;  // transmission, t = 1 + r
    double T;                // |t|^2
    double R;                // |r|^2
    double S;                // T + R, reported unclamped
};

// Steady-state reflection/transmission of the driven atom.
Coefficients reflection(const QubitParams& params, const DriveCondition& drive);

// Omega = sqrt(k_rabi * power); power in on-chip watts.
double rabi_from_power(const QubitParams& params, double power_w);

// One Coefficients entry per qubit frequency in omega_grid (rad/s),
// at fixed probe frequency and drive strength.
std::vector<Coefficients> detuning_sweep(const QubitParams& params,
                                         double omega_p, double rabi,
                                         std::span<const double> omega_grid);

} // namespace qwb

#endif
