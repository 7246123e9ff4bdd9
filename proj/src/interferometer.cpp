#include "qwb/interferometer.hpp"
#include "qwb/errors.hpp"

#include <algorithm>
#include <cmath>

namespace qwb {

void LineCalibration::validate() const {
    if (c_tl == 0.0 || c_rr == 0.0 || c_rl == 0.0 || c_tr == 0.0)
        throw DomainError("line-calibration factors must be nonzero");
}

ScatterMatrix2 LineCalibration::apply(const Coefficients& x) const {
    return ScatterMatrix2{c_tl * x.t, c_rr * x.r, c_rl * x.r, c_tr * x.t};
}

std::pair<std::complex<double>, std::complex<double>>
combine(const ScatterMatrix2& m, std::complex<double> v1, std::complex<double> v2) {
    return {m.t_l * v1 + m.r_r * v2, m.r_l * v1 + m.t_r * v2};
}

FringeTrace fringe_scan(const ScatterMatrix2& m, const PortField& v1,
                        std::complex<double> v2, std::span<const double> theta) {
    if (theta.empty())
        throw UsageError("fringe_scan: empty theta grid");
    FringeTrace tr;
    tr.theta.assign(theta.begin(), theta.end());
    tr.v3.reserve(theta.size());
    tr.v4.reserve(theta.size());
    tr.p3.reserve(theta.size());
    tr.p4.reserve(theta.size());
    for (double th : theta) {
        auto [a, b] = combine(m, v1.at(th), v2);
        tr.v3.push_back(a);
        tr.v4.push_back(b);
        tr.p3.push_back(std::norm(a));
        tr.p4.push_back(std::norm(b));
    }
    return tr;
}

double visibility(std::span<const double> power) {
    if (power.empty())
        throw UsageError("visibility: empty trace");
    const auto [lo, hi] = std::minmax_element(power.begin(), power.end());
    const double sum = *hi + *lo;
    if (sum == 0.0) return 0.0;
    return (*hi - *lo) / sum;
}

LineCalibration fit_line_calibration(const ScatterMatrix2& fixture,
                                     const Coefficients& intrinsic) {
    if (intrinsic.t == 0.0 || intrinsic.r == 0.0)
        throw DomainError("intrinsic coefficients must be nonzero to calibrate");
    LineCalibration cal{fixture.t_l / intrinsic.t, fixture.r_r / intrinsic.r,
                        fixture.r_l / intrinsic.r, fixture.t_r / intrinsic.t};
    cal.validate();
    return cal;
}

FringeTrace nonlinear_fringe_scan(const QubitParams& params,
                                  const LineCalibration& cal,
                                  const PortField& v1, std::complex<double> v2,
                                  double power1_w, double power2_w,
                                  double omega_p, std::span<const double> theta) {
    if (theta.empty())
        throw UsageError("nonlinear_fringe_scan: empty theta grid");
    cal.validate();
    const double w1 = rabi_from_power(params, power1_w);
    const double w2 = rabi_from_power(params, power2_w);
    const double a1 = std::arg(v1.amplitude);
    const double a2 = std::arg(v2);

    FringeTrace tr;
    tr.theta.assign(theta.begin(), theta.end());
    for (double th : theta) {
        const std::complex<double> omega_sum =
            w1 * std::polar(1.0, th + v1.theta0 + a1) + w2 * std::polar(1.0, a2);
        const Coefficients c =
            reflection(params, DriveCondition{omega_p, std::abs(omega_sum)});
        auto [a, b] = combine(cal.apply(c), v1.at(th), v2);
        tr.v3.push_back(a);
        tr.v4.push_back(b);
        tr.p3.push_back(std::norm(a));
        tr.p4.push_back(std::norm(b));
    }
    return tr;
}

} // namespace qwb
