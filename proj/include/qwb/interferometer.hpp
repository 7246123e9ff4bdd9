#ifndef QWB_INTERFEROMETER_HPP
#define QWB_INTERFEROMETER_HPP

#include "qwb/scattering.hpp"

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace qwb {

// One coherent input port. The field at scan phase theta is
// amplitude * e^{i(theta + theta0)}; the carrier factor is dropped
// (rotating frame).
struct PortField {
    std::complex<double> amplitude;  // bare on-chip amplitude, V
    double theta0 = 0.0;             // initial phase offset, rad
    std::complex<double> at(double theta) const {
        return amplitude * std::polar(1.0, theta + theta0);
    }
};

// Calibrated 2x2 scattering elements; line phases/gains are embedded, so
// t = 1 + r does not hold element-wise.
struct ScatterMatrix2 {
    std::complex<double> t_l, r_r, r_l, t_r;
};

// Per-path factors multiplying the intrinsic (t, r) to produce the
// calibrated matrix elements.
struct LineCalibration {
    std::complex<double> c_tl, c_rr, c_rl, c_tr;
    void validate() const;  // all factors nonzero
    ScatterMatrix2 apply(const Coefficients& intrinsic) const;
};

// (V3, V4) = M (V1, V2).
std::pair<std::complex<double>, std::complex<double>>
combine(const ScatterMatrix2& m, std::complex<double> v1, std::complex<double> v2);

struct FringeTrace {
    std::vector<double> theta;
    std::vector<std::complex<double>> v3, v4;
    std::vector<double> p3, p4;  // |v3|^2, |v4|^2
};

// Point-wise combine over a phase grid; v2 is held fixed.
FringeTrace fringe_scan(const ScatterMatrix2& m, const PortField& v1,
                        std::complex<double> v2, std::span<const double> theta);

// (max - min) / (max + min); all-zero trace gives 0.
double visibility(std::span<const double> power);

// Recover per-path line factors from a calibrated fixture and the intrinsic
// coefficients at the fixture's operating point.
LineCalibration fit_line_calibration(const ScatterMatrix2& fixture,
                                     const Coefficients& intrinsic);

// Saturation-aware fringe scan: at each theta the atom sees the coherent sum
// of both Rabi drives, Omega_tot = |Omega1 e^{i(theta+theta0+arg V1)} +
// Omega2 e^{i arg V2}|; (t, r) are re-evaluated at Omega_tot and pushed
// through the line calibration before combining. Reduces to fringe_scan as
// both powers go to zero.
FringeTrace nonlinear_fringe_scan(const QubitParams& params,
                                  const LineCalibration& cal,
                                  const PortField& v1, std::complex<double> v2,
                                  double power1_w, double power2_w,
                                  double omega_p, std::span<const double> theta);

} // namespace qwb

#endif
