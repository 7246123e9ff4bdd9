#include "qwb/scattering.hpp"
#include "qwb/errors.hpp"

#include <cmath>

namespace qwb {

void QubitParams::validate() const {
    if (!(std::isfinite(omega) && std::isfinite(Gamma) && std::isfinite(Gamma_n) &&
          std::isfinite(phi) && std::isfinite(k_rabi)))
        throw DomainError("qubit parameters must be finite");
    if (!(Gamma > 0.0))
        throw DomainError("Gamma must be positive");
    if (Gamma_n < 0.0)
        throw DomainError("Gamma_n must be non-negative");
    if (!(phi > -two_pi / 2.0 && phi <= two_pi / 2.0))
        throw DomainError("phi must lie in (-pi, pi]");
    if (!(k_rabi > 0.0))
        throw DomainError("k_rabi must be positive");
}

QubitParams QubitParams::from_table(double omega_ghz, double gamma_mhz,
                                    double gamma_n_mhz, double phi_rad,
                                    double k_rabi) {
    const double pi = two_pi / 2.0;
    double phi = std::remainder(phi_rad, two_pi);
    if (phi <= -pi) phi += two_pi;
    QubitParams q{omega_ghz * 1e9 * two_pi, gamma_mhz * 1e6 * two_pi,
                  gamma_n_mhz * 1e6 * two_pi, phi, k_rabi};
    q.validate();
    return q;
}

Coefficients reflection(const QubitParams& params, const DriveCondition& drive) {
    params.validate();
    if (!std::isfinite(drive.omega_p) || !std::isfinite(drive.rabi))
        throw DomainError("drive must be finite");
    if (drive.rabi < 0.0)
        throw DomainError("Rabi frequency must be non-negative");

    const double g = params.gamma();
    const double d = drive.detuning(params);
    const double u = d / g;
    const double sat = drive.rabi * drive.rabi / (g * params.Gamma);

    const std::complex<double> phase(std::cos(params.phi), std::sin(params.phi));
    const std::complex<double> num(1.0, -u);
    const double denom = 1.0 + u * u + sat;

    Coefficients c;
    c.r = -phase * (params.Gamma / (2.0 * g)) * num / denom;
    c.t = 1.0 + c.r;
    c.T = std::norm(c.t);
    c.R = std::norm(c.r);
    c.S = c.T + c.R;
    return c;
}

double rabi_from_power(const QubitParams& params, double power_w) {
    params.validate();
    if (!(power_w >= 0.0) || !std::isfinite(power_w))
        throw DomainError("power must be non-negative and finite");
    return std::sqrt(params.k_rabi * power_w);
}

std::vector<Coefficients> detuning_sweep(const QubitParams& params,
                                         double omega_p, double rabi,
                                         std::span<const double> omega_grid) {
    if (omega_grid.empty())
        throw UsageError("detuning_sweep: empty frequency grid");
    std::vector<Coefficients> out;
    out.reserve(omega_grid.size());
    QubitParams q = params;
    for (double w : omega_grid) {
        q.omega = w;
        out.push_back(reflection(q, DriveCondition{omega_p, rabi}));
    }
    return out;
}

} // namespace qwb
