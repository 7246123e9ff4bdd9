#include "qwb/estimation.hpp"
#include "qwb/errors.hpp"
#include "qwb/levmar.hpp"
#include "qwb/scattering.hpp"

#include <algorithm>
#include <cmath>

namespace qwb {

namespace {

using cd = std::complex<double>;

// Weak-probe transmission model: t(f) = 1 - e^{i phi} a (1 - iu)/(1 + u^2)
// with a = Gamma/2gamma, u = 2pi(f - f0)/gamma.
cd weak_probe_t(double f_hz, double f0_hz, double Gamma, double gamma, double phi) {
    const double u = two_pi * (f_hz - f0_hz) / gamma;
    const cd phase(std::cos(phi), std::sin(phi));
    return 1.0 - phase * (Gamma / (2.0 * gamma)) * cd(1.0, -u) / (1.0 + u * u);
}

} // namespace

CircleFitResult circle_fit(std::span<const cd> points) {
    const std::size_t n = points.size();
    if (n < 3)
        throw DegenerateGeometryError("circle fit needs at least 3 points");

    // collinearity check via max triangle area relative to span
    double span2 = 0.0, max_cross = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const cd d = points[i] - points[0];
        span2 = std::max(span2, std::norm(d));
        if (i >= 2) {
            const cd e = points[1] - points[0];
            max_cross = std::max(max_cross,
                                 std::fabs(e.real() * d.imag() - e.imag() * d.real()));
        }
    }
    if (span2 == 0.0 || max_cross < 1e-12 * span2)
        throw DegenerateGeometryError("circle fit: points are collinear");

    // Kasa: minimize sum (x^2 + y^2 + D x + E y + F)^2
    std::vector<double> a(9, 0.0), b(3, 0.0);
    for (const cd& p : points) {
        const double x = p.real(), y = p.imag(), z = x * x + y * y;
        a[0] += x * x; a[1] += x * y; a[2] += x;
        a[4] += y * y; a[5] += y;
        b[0] -= z * x; b[1] -= z * y; b[2] -= z;
    }
    a[3] = a[1]; a[6] = a[2]; a[7] = a[5]; a[8] = static_cast<double>(n);
    std::vector<double> def(3);
    if (!solve_dense(a, b, def))
        throw DegenerateGeometryError("circle fit: singular normal equations");
    cd center(-def[0] / 2.0, -def[1] / 2.0);
    const double rad2 = std::norm(center) - def[2];
    if (!(rad2 > 0.0))
        throw DegenerateGeometryError("circle fit: non-positive radius");
    double radius = std::sqrt(rad2);

    // geometric refinement on (cx, cy, R)
    auto fn = [&](std::span<const double> p, std::span<double> r) {
        const cd c(p[0], p[1]);
        for (std::size_t i = 0; i < n; ++i)
            r[i] = std::abs(points[i] - c) - p[2];
    };
    LevMarOptions opts;
    opts.scale = {radius, radius, radius};
    auto fit = levmar(fn, {center.real(), center.imag(), radius}, n, opts);

    CircleFitResult res;
    res.center = cd(fit.p[0], fit.p[1]);
    res.radius = fit.p[2];
    res.rms_residual = fit.rms;
    return res;
}

QubitFitReport extract_qubit_params(std::span<const double> freq_hz,
                                    std::span<const cd> t) {
    const std::size_t n = freq_hz.size();
    if (n != t.size())
        throw UsageError("frequency and value arrays differ in length");
    if (n < 7)
        throw UsageError("trace too short for parameter extraction");
    for (std::size_t i = 1; i < n; ++i)
        if (!(freq_hz[i] > freq_hz[i - 1]))
            throw UsageError("frequency axis must be strictly increasing");

    const CircleFitResult circ = circle_fit(t);

    // resonant point: the circle point farthest from t = 1
    const cd away = circ.center - 1.0;
    const cd t_res = circ.center + circ.radius * away / std::abs(away);
    const double phi0 = std::arg(1.0 - t_res);
    const double a0 = 2.0 * circ.radius;  // Gamma / 2gamma

    // omega init: extremum of |t - 1|^2 with parabolic refinement
    std::size_t imax = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::norm(t[i] - 1.0);
        if (v > best) { best = v; imax = i; }
    }
    double f0 = freq_hz[imax];
    if (imax > 0 && imax + 1 < n) {
        const double ym = std::norm(t[imax - 1] - 1.0);
        const double y0 = best;
        const double yp = std::norm(t[imax + 1] - 1.0);
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0)
            f0 += 0.5 * (ym - yp) / denom * (freq_hz[imax + 1] - freq_hz[imax]);
    }

    // gamma init from the half width of |t - 1|^2 (Lorentzian of HWHM gamma)
    const double half = 0.5 * best;
    double f_left = freq_hz.front(), f_right = freq_hz.back();
    for (std::size_t i = imax; i-- > 0;) {
        const double v = std::norm(t[i] - 1.0);
        if (v < half) {
            const double v1 = std::norm(t[i + 1] - 1.0);
            f_left = freq_hz[i] + (half - v) / (v1 - v) * (freq_hz[i + 1] - freq_hz[i]);
            break;
        }
    }
    for (std::size_t i = imax + 1; i < n; ++i) {
        const double v = std::norm(t[i] - 1.0);
        if (v < half) {
            const double v0 = std::norm(t[i - 1] - 1.0);
            f_right = freq_hz[i - 1] +
                      (v0 - half) / (v0 - v) * (freq_hz[i] - freq_hz[i - 1]);
            break;
        }
    }
    double gamma0 = two_pi * 0.5 * (f_right - f_left);
    if (!(gamma0 > 0.0)) gamma0 = two_pi * 0.05 * (freq_hz.back() - freq_hz.front());
    double Gamma0 = std::clamp(a0, 1e-3, 1.0) * 2.0 * gamma0;

    auto fn = [&](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < n; ++i) {
            const cd m = weak_probe_t(freq_hz[i], p[0], p[1], p[2], p[3]);
            r[2 * i] = m.real() - t[i].real();
            r[2 * i + 1] = m.imag() - t[i].imag();
        }
    };
    LevMarOptions opts;
    opts.scale = {std::fabs(f0), Gamma0, gamma0, 0.1};
    auto fit = levmar(fn, {f0, Gamma0, gamma0, phi0}, 2 * n, opts);

    QubitFitReport rep;
    rep.omega = two_pi * fit.p[0];
    rep.Gamma = fit.p[1];
    rep.gamma = fit.p[2];
    rep.phi = fit.p[3];
    rep.Gamma_n = rep.gamma - 0.5 * rep.Gamma;
    rep.rms_residual = fit.rms;
    rep.converged = fit.converged && rep.Gamma > 0.0 && rep.gamma > 0.0;
    rep.sigma_omega = two_pi * std::sqrt(std::max(fit.covariance[0], 0.0));
    rep.sigma_Gamma = std::sqrt(std::max(fit.covariance[5], 0.0));
    rep.sigma_gamma = std::sqrt(std::max(fit.covariance[10], 0.0));
    rep.sigma_phi = std::sqrt(std::max(fit.covariance[15], 0.0));
    const double var_n = std::max(
        fit.covariance[10] + 0.25 * fit.covariance[5] - fit.covariance[6], 0.0);
    rep.sigma_Gamma_n = std::sqrt(var_n);
    rep.gamma_n_negative = rep.Gamma_n < -3.0 * rep.sigma_Gamma_n && rep.Gamma_n < 0.0;
    const double half_span_hz =
        0.5 * (freq_hz.back() - freq_hz.front());
    rep.span_warning = two_pi * half_span_hz < 3.0 * rep.gamma;
    return rep;
}

SaturationFitReport fit_saturation(std::span<const double> power_w,
                                   std::span<const double> t_abs,
                                   double gamma_init) {
    const std::size_t n = power_w.size();
    if (n != t_abs.size())
        throw UsageError("power and |t| arrays differ in length");
    if (n < 4)
        throw UsageError("saturation trace too short");
    if (!(gamma_init > 0.0))
        throw DomainError("gamma_init must be positive");
    for (double p : power_w)
        if (!(p > 0.0)) throw DomainError("powers must be positive");

    const double tmin = *std::min_element(t_abs.begin(), t_abs.end());
    const double a0 = std::clamp(1.0 - tmin, 1e-3, 0.999);
    double Gamma0 = 2.0 * gamma_init * a0;

    // k init: power where |t| is halfway between its floor and 1 has
    // k P / (gamma Gamma) ~ 1
    const double mid = 0.5 * (tmin + 1.0);
    double p_half = power_w[n / 2];
    for (std::size_t i = 0; i + 1 < n; ++i)
        if (t_abs[i] <= mid && t_abs[i + 1] > mid) { p_half = power_w[i]; break; }
    double k0 = gamma_init * Gamma0 / p_half;

    // fit in log10(k) to keep the scale sane
    auto fn = [&](std::span<const double> p, std::span<double> r) {
        const double Gamma = p[0], phi = p[1], k = std::pow(10.0, p[2]);
        const cd phase(std::cos(phi), std::sin(phi));
        for (std::size_t i = 0; i < n; ++i) {
            const double sat = k * power_w[i] / (gamma_init * Gamma);
            const cd t = 1.0 - phase * (Gamma / (2.0 * gamma_init)) / (1.0 + sat);
            r[i] = std::abs(t) - t_abs[i];
        }
    };
    LevMarOptions opts;
    opts.scale = {Gamma0, 0.1, 1.0};
    auto fit = levmar(fn, {Gamma0, 0.0, std::log10(k0)}, n, opts);

    SaturationFitReport rep;
    rep.Gamma = fit.p[0];
    rep.gamma = gamma_init;
    rep.phi = fit.p[1];
    rep.k_rabi = std::pow(10.0, fit.p[2]);
    rep.rms_residual = fit.rms;
    rep.converged = fit.converged && rep.Gamma > 0.0;

    const double p_star = gamma_init * rep.Gamma / rep.k_rabi;
    const auto [pmin, pmax] = std::minmax_element(power_w.begin(), power_w.end());
    rep.bracketing_warning =
        !(p_star > *pmin && p_star < *pmax) || *pmax / *pmin < 1e3;
    return rep;
}

double calibrate_transmission(std::span<const double> time_s,
                              std::span<const cd> v_on, std::span<const cd> v_off,
                              double win_lo_s, double win_hi_s) {
    const std::size_t n = time_s.size();
    if (v_on.size() != n || v_off.size() != n)
        throw UsageError("calibration traces must share one time grid");
    if (!(win_hi_s > win_lo_s))
        throw UsageError("empty steady-state window");

    cd mean_on = 0.0, mean_off = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (time_s[i] < win_lo_s || time_s[i] > win_hi_s) continue;
        mean_on += v_on[i];
        mean_off += v_off[i];
        ++count;
    }
    if (count == 0)
        throw UsageError("no samples inside the steady-state window");
    if (mean_off == 0.0)
        throw DomainError("degenerate reference: off-resonance mean is zero");
    return std::abs(mean_on / mean_off);
}

LineBudget solve_line_budget(double k_source, double k_chip,
                             double source_power_w, double digitizer_power_w,
                             double end_to_end_db) {
    if (!(source_power_w > 0.0) || !(digitizer_power_w > 0.0))
        throw DomainError("powers must be positive");
    if (!(k_source > 0.0) || !(k_chip > 0.0))
        throw DomainError("Rabi conversions must be positive");

    LineBudget lb;
    const double a_lin = k_source / k_chip;  // on-chip power per source power
    lb.attenuation_db = 10.0 * std::log10(a_lin);
    lb.gain_db = 10.0 * std::log10(digitizer_power_w / (a_lin * source_power_w));
    if (std::isfinite(end_to_end_db)) {
        lb.consistency_db =
            std::fabs(lb.attenuation_db + lb.gain_db - end_to_end_db);
        if (lb.consistency_db > 1.0)
            throw DomainError("calibration inconsistency: chain budget off by " +
                              std::to_string(lb.consistency_db) + " dB");
    }
    return lb;
}

} // namespace qwb
