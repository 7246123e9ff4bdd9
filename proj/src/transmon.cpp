#include "qwb/transmon.hpp"
#include "qwb/errors.hpp"
#include "qwb/scattering.hpp"  // two_pi

#include <cmath>
#include <string>

namespace qwb {

void TransmonSpec::validate() const {
    if (!(ej_hz > 0.0) || !(ec_hz > 0.0))
        throw DomainError("E_J and E_C must be positive");
    if (!(ej_hz / ec_hz > 20.0))
        throw DomainError("E_J/E_C outside the transmon regime (need > 20)");
    if (!std::isfinite(flux_per_volt) || flux_per_volt == 0.0)
        throw DomainError("flux_per_volt must be finite and nonzero");
    if (!std::isfinite(flux_offset))
        throw DomainError("flux_offset must be finite");
}

double freq_at_flux(const TransmonSpec& spec, double flux) {
    spec.validate();
    if (!std::isfinite(flux))
        throw DomainError("flux must be finite");
    const double pi = two_pi / 2.0;
    const double c = std::fabs(std::cos(pi * flux));
    const double f = std::sqrt(8.0 * spec.ej_hz * spec.ec_hz * c) - spec.ec_hz;
    if (!(f > 0.0))
        throw DomainError("frequency out of transmon-dispersion validity at flux " +
                          std::to_string(flux));
    return f;
}

double flux_for_freq(const TransmonSpec& spec, double freq_hz) {
    spec.validate();
    const double f_max = freq_at_flux(spec, 0.0);
    if (!(freq_hz > 0.0) || freq_hz > f_max)
        throw DomainError("target frequency unreachable; achievable range is (0, " +
                          std::to_string(f_max * 1e-9) + "] GHz");

    // freq_at_flux is strictly decreasing on [0, 0.5) until the validity
    // edge |cos(pi*flux)| = E_C/(8 E_J); bisect just inside it.
    const double pi = two_pi / 2.0;
    const double edge = std::acos(spec.ec_hz / (8.0 * spec.ej_hz)) / pi;
    double lo = 0.0, hi = edge * (1.0 - 1e-12);

    for (int i = 0; i < 200 && hi - lo > 1e-16; ++i) {
        double mid = 0.5 * (lo + hi);
        double f = freq_at_flux(spec, mid);
        if (std::fabs(f - freq_hz) < 1.0) return mid;
        if (f > freq_hz)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<double> pulse_to_freq_trajectory(const TransmonSpec& spec,
                                             double base_flux,
                                             const FluxPulse& pulse) {
    spec.validate();
    if (!(pulse.dt > 0.0))
        throw DomainError("pulse dt must be positive");
    if (pulse.volts.size() < 2)
        throw DomainError("pulse must have at least 2 samples");

    std::vector<double> freq(pulse.volts.size());
    for (std::size_t i = 0; i < pulse.volts.size(); ++i) {
        try {
            freq[i] = freq_at_flux(spec, base_flux + spec.flux_per_volt * pulse.volts[i]);
        } catch (const DomainError&) {
            throw DomainError("flux pulse leaves dispersion validity at sample " +
                              std::to_string(i));
        }
    }
    return freq;
}

std::vector<double> gaussian_square_pulse(double amp_v, double pre_s,
                                          double plateau_s, double rise_sigma_s,
                                          double post_s, double dt) {
    if (!(dt > 0.0) || !(plateau_s > 0.0) || pre_s < 0.0 || post_s < 0.0 ||
        !(rise_sigma_s > 0.0))
        throw UsageError("gaussian_square_pulse: bad shape parameters");
    const double total = pre_s + plateau_s + post_s;
    // tolerant floor so ns-vs-seconds roundoff cannot change the count
    const auto n = static_cast<std::size_t>(std::floor(total / dt + 1e-6)) + 1;
    const double s = rise_sigma_s * std::sqrt(2.0);
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        v[i] = amp_v * 0.5 * (std::erf((t - pre_s) / s) - std::erf((t - pre_s - plateau_s) / s));
    }
    return v;
}

} // namespace qwb
