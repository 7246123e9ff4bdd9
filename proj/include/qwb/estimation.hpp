#ifndef QWB_ESTIMATION_HPP
#define QWB_ESTIMATION_HPP

#include <complex>
#include <span>
#include <vector>

namespace qwb {

struct CircleFitResult {
    std::complex<double> center;
    double radius = 0.0;
    double rms_residual = 0.0;  // perpendicular-distance RMS
};

// Algebraic (Kasa) circle fit followed by geometric refinement.
// Throws DegenerateGeometryError for < 3 or collinear points.
CircleFitResult circle_fit(std::span<const std::complex<double>> points);

struct QubitFitReport {
    double omega = 0.0;    // rad/s
    double Gamma = 0.0;    // rad/s
    double gamma = 0.0;    // rad/s
    double Gamma_n = 0.0;  // derived, gamma - Gamma/2
    double phi = 0.0;
    double rms_residual = 0.0;
    double sigma_omega = 0.0, sigma_Gamma = 0.0, sigma_gamma = 0.0, sigma_phi = 0.0;
    double sigma_Gamma_n = 0.0;
    bool gamma_n_negative = false;  // Gamma_n < -3 sigma; flagged, never clamped
    bool span_warning = false;      // trace narrower than +-3 gamma
    bool converged = false;
};

// Circle-fit-seeded refinement of the weak-probe transmission model on a
// frequency trace (Hz, strictly monotone).
QubitFitReport extract_qubit_params(std::span<const double> freq_hz,
                                    std::span<const std::complex<double>> t);

struct SaturationFitReport {
    double Gamma = 0.0;  // rad/s
    double gamma = 0.0;  // rad/s, held fixed at the supplied value
    double phi = 0.0;
    double k_rabi = 0.0;  // (rad/s)^2 / W
    double rms_residual = 0.0;
    bool bracketing_warning = false;  // powers do not bracket Omega^2 = gamma*Gamma
    bool converged = false;
};

// Fit of |t|(P) on resonance. gamma comes from the circle fit and is held
// fixed; only (Gamma/2gamma, phi, k/(gamma*Gamma)) are identifiable from
// this curve.
SaturationFitReport fit_saturation(std::span<const double> power_w,
                                   std::span<const double> t_abs,
                                   double gamma_init);

// |<V_on>/<V_off>| over the steady-state window [win_lo, win_hi] (s).
double calibrate_transmission(std::span<const double> time_s,
                              std::span<const std::complex<double>> v_on,
                              std::span<const std::complex<double>> v_off,
                              double win_lo_s, double win_hi_s);

struct LineBudget {
    double attenuation_db = 0.0;  // on-chip power / source power
    double gain_db = 0.0;         // digitizer power / on-chip output power
    double consistency_db = 0.0;  // |A + G - independent end-to-end scale|
};

// Splits the measured chain into attenuation and gain. k_source is the
// source-referred Rabi conversion from a saturation fit, k_chip the on-chip
// one; their ratio is the input attenuation. end_to_end_db, when finite, is
// an independent source-to-digitizer scale used as a consistency check
// (mismatch above 1 dB is an error).
LineBudget solve_line_budget(double k_source, double k_chip,
                             double source_power_w, double digitizer_power_w,
                             double end_to_end_db);

} // namespace qwb

#endif
