#include "qwb.h"

#include "qwb/bloch.hpp"
#include "qwb/config.hpp"
#include "qwb/errors.hpp"
#include "qwb/estimation.hpp"
#include "qwb/interferometer.hpp"
#include "qwb/scattering.hpp"
#include "qwb/transmon.hpp"

#include <cmath>
#include <complex>
#include <cstring>
#include <string>
#include <vector>

using qwb::two_pi;
using cd = std::complex<double>;

struct qwb_device {
    qwb::DeviceConfig cfg;
};

namespace {

thread_local std::string g_last_error;

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return QWB_OK;
    } catch (const qwb::UsageError& e) {
        g_last_error = e.what();
        return QWB_ERR_USAGE;
    } catch (const qwb::ParseError& e) {
        g_last_error = std::string(e.what()) +
                       (e.line > 0 ? " (line " + std::to_string(e.line) + ")" : "");
        return QWB_ERR_PARSE;
    } catch (const qwb::FitError& e) {
        g_last_error = e.what();
        return QWB_ERR_FIT;
    } catch (const qwb::DomainError& e) {
        g_last_error = e.what();
        return QWB_ERR_DOMAIN;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return QWB_ERR_USAGE;
    }
}

qwb_complex to_c(cd z) { return {z.real(), z.imag()}; }
cd from_c(qwb_complex z) { return {z.re, z.im}; }

qwb_coeffs to_c(const qwb::Coefficients& c) {
    return {to_c(c.r), to_c(c.t), c.T, c.R, c.S};
}

int check_ptr(const void* p) {
    if (p) return QWB_OK;
    g_last_error = "null pointer argument";
    return QWB_ERR_USAGE;
}

} // namespace

extern "C" {

const char* qwb_version(void) { return "0.1.0"; }

const char* qwb_last_error(void) { return g_last_error.c_str(); }

qwb_device* qwb_device_default(void) {
    try {
        return new qwb_device{qwb::DeviceConfig::defaults()};
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

qwb_device* qwb_device_from_file(const char* path) {
    try {
        if (!path) throw qwb::UsageError("null config path");
        return new qwb_device{qwb::DeviceConfig::from_file(path)};
    } catch (const qwb::ParseError& e) {
        g_last_error = std::string(e.what()) + " (line " + std::to_string(e.line) + ")";
        return nullptr;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return nullptr;
    }
}

void qwb_device_free(qwb_device* dev) { delete dev; }

uint64_t qwb_device_config_hash(const qwb_device* dev) {
    return dev ? dev->cfg.config_hash : 0;
}

int qwb_device_qubit(const qwb_device* dev, qwb_qubit_view* out) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    const qwb::QubitParams& q = dev->cfg.qubit;
    out->omega_ghz = q.omega / two_pi / 1e9;
    out->gamma_mhz = q.Gamma / two_pi / 1e6;
    out->gamma_n_mhz = q.Gamma_n / two_pi / 1e6;
    out->gamma_total_mhz = q.gamma() / two_pi / 1e6;
    out->phi_rad = q.phi;
    out->k_rabi = q.k_rabi;
    return QWB_OK;
}

int qwb_device_lines(const qwb_device* dev, qwb_lines_view* out) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    const auto& c = dev->cfg;
    out->matrix = {to_c(c.lines.t_l), to_c(c.lines.r_r), to_c(c.lines.r_l),
                   to_c(c.lines.t_r)};
    out->v1_off_nv = to_c(c.v1_off);
    out->v2_off_nv = to_c(c.v2_off);
    out->theta0_rad = c.theta0;
    out->omega_ghz = c.lines_omega_ghz;
    return QWB_OK;
}

int qwb_rabi_from_power(const qwb_device* dev, double power_w, double* rabi) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(rabi); rc) return rc;
    return guarded([&] { *rabi = qwb::rabi_from_power(dev->cfg.qubit, power_w); });
}

int qwb_reflection(const qwb_device* dev, double omega_ghz, double omega_p_ghz,
                   double power_w, qwb_coeffs* out) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] {
        qwb::QubitParams q = dev->cfg.qubit;
        q.omega = omega_ghz * 1e9 * two_pi;
        const double rabi = qwb::rabi_from_power(q, power_w);
        *out = to_c(qwb::reflection(q, {omega_p_ghz * 1e9 * two_pi, rabi}));
    });
}

int qwb_spectrum(const qwb_device* dev, double omega_p_ghz, double power_w,
                 const double* omega_ghz, size_t n, qwb_coeffs* out) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(omega_ghz); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] {
        std::vector<double> grid(n);
        for (size_t i = 0; i < n; ++i) grid[i] = omega_ghz[i] * 1e9 * two_pi;
        const double rabi = qwb::rabi_from_power(dev->cfg.qubit, power_w);
        auto res = qwb::detuning_sweep(dev->cfg.qubit, omega_p_ghz * 1e9 * two_pi,
                                       rabi, grid);
        for (size_t i = 0; i < n; ++i) out[i] = to_c(res[i]);
    });
}

int qwb_freq_at_flux(const qwb_device* dev, double flux, double* freq_ghz) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(freq_ghz); rc) return rc;
    return guarded([&] { *freq_ghz = qwb::freq_at_flux(dev->cfg.transmon, flux) / 1e9; });
}

int qwb_flux_for_freq(const qwb_device* dev, double freq_ghz, double* flux) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(flux); rc) return rc;
    return guarded(
        [&] { *flux = qwb::flux_for_freq(dev->cfg.transmon, freq_ghz * 1e9); });
}

int qwb_switch_sample_count(const qwb_switch_config* cfg, size_t* n) {
    if (int rc = check_ptr(cfg); rc) return rc;
    if (int rc = check_ptr(n); rc) return rc;
    return guarded([&] {
        if (!(cfg->dt_ns > 0.0)) throw qwb::UsageError("dt must be positive");
        const double total = cfg->pre_ns + cfg->plateau_ns + cfg->post_ns;
        *n = static_cast<size_t>(std::floor(total / cfg->dt_ns + 1e-6)) + 1;
    });
}

int qwb_switch_sim(const qwb_device* dev, const qwb_switch_config* cfg,
                   qwb_transient_sample* out, size_t n) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(cfg); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] {
        const double dt = cfg->dt_ns * 1e-9;
        auto volts = qwb::gaussian_square_pulse(
            cfg->pulse_amp_v, cfg->pre_ns * 1e-9, cfg->plateau_ns * 1e-9,
            cfg->rise_sigma_ns * 1e-9, cfg->post_ns * 1e-9, dt);
        if (volts.size() != n)
            throw qwb::UsageError("output buffer size does not match sample count");

        auto freq_hz = qwb::pulse_to_freq_trajectory(
            dev->cfg.transmon, dev->cfg.transmon.flux_offset,
            qwb::FluxPulse{volts, dt});
        std::vector<double> omega_traj(freq_hz.size());
        for (size_t i = 0; i < freq_hz.size(); ++i) omega_traj[i] = freq_hz[i] * two_pi;

        const double rabi = qwb::rabi_from_power(dev->cfg.qubit, cfg->power_w);
        std::vector<double> envelope(freq_hz.size(), rabi);
        const cd vin_per_rabi = rabi > 0.0 ? cd(1.0 / rabi, 0.0) : cd(0.0, 0.0);

        auto tr = qwb::integrate_bloch(dev->cfg.qubit, cfg->omega_p_ghz * 1e9 * two_pi,
                                       envelope, omega_traj, dt, qwb::BlochState{},
                                       vin_per_rabi);
        for (size_t i = 0; i < n; ++i) {
            out[i].time_ns = tr.time[i] * 1e9;
            out[i].coherence = to_c(tr.coherence[i]);
            out[i].sz = tr.inversion[i];
            out[i].T = tr.T[i];
            out[i].R = tr.R[i];
            out[i].v3 = to_c(tr.v3[i]);
            out[i].v4 = to_c(tr.v4[i]);
        }
    });
}

int qwb_combine(const qwb_smatrix* m, qwb_complex v1, qwb_complex v2,
                qwb_complex* v3, qwb_complex* v4) {
    if (int rc = check_ptr(m); rc) return rc;
    if (int rc = check_ptr(v3); rc) return rc;
    if (int rc = check_ptr(v4); rc) return rc;
    return guarded([&] {
        qwb::ScatterMatrix2 sm{from_c(m->t_l), from_c(m->r_r), from_c(m->r_l),
                               from_c(m->t_r)};
        auto [a, b] = qwb::combine(sm, from_c(v1), from_c(v2));
        *v3 = to_c(a);
        *v4 = to_c(b);
    });
}

int qwb_fringe_scan(const qwb_device* dev, const double* theta_rad, size_t n,
                    qwb_complex* v3, qwb_complex* v4) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(theta_rad); rc) return rc;
    if (int rc = check_ptr(v3); rc) return rc;
    if (int rc = check_ptr(v4); rc) return rc;
    return guarded([&] {
        const auto& c = dev->cfg;
        auto tr = qwb::fringe_scan(c.lines, qwb::PortField{c.v1_off, c.theta0},
                                   c.v2_off, std::span(theta_rad, n));
        for (size_t i = 0; i < n; ++i) {
            v3[i] = to_c(tr.v3[i] + c.leak3);
            v4[i] = to_c(tr.v4[i] + c.leak4);
        }
    });
}

int qwb_nonlinear_fringe_scan(const qwb_device* dev, double omega_p_ghz,
                              double power1_w, double power2_w,
                              const double* theta_rad, size_t n,
                              qwb_complex* v3, qwb_complex* v4) {
    if (int rc = check_ptr(dev); rc) return rc;
    if (int rc = check_ptr(theta_rad); rc) return rc;
    if (int rc = check_ptr(v3); rc) return rc;
    if (int rc = check_ptr(v4); rc) return rc;
    return guarded([&] {
        const auto& c = dev->cfg;
        qwb::QubitParams q = c.qubit;
        q.omega = c.lines_omega_ghz * 1e9 * two_pi;
        const auto cal =
            qwb::fit_line_calibration(c.lines, c.lines_intrinsic(omega_p_ghz));
        auto tr = qwb::nonlinear_fringe_scan(
            q, cal, qwb::PortField{c.v1_off, c.theta0}, c.v2_off, power1_w,
            power2_w, omega_p_ghz * 1e9 * two_pi, std::span(theta_rad, n));
        for (size_t i = 0; i < n; ++i) {
            v3[i] = to_c(tr.v3[i] + c.leak3);
            v4[i] = to_c(tr.v4[i] + c.leak4);
        }
    });
}

int qwb_visibility(const double* power, size_t n, double* out) {
    if (int rc = check_ptr(power); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] { *out = qwb::visibility(std::span(power, n)); });
}

int qwb_circle_fit(const qwb_complex* points, size_t n, qwb_circle_fit_result* out) {
    if (int rc = check_ptr(points); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] {
        std::vector<cd> pts(n);
        for (size_t i = 0; i < n; ++i) pts[i] = from_c(points[i]);
        auto res = qwb::circle_fit(pts);
        out->center = to_c(res.center);
        out->radius = res.radius;
        out->rms_residual = res.rms_residual;
    });
}

int qwb_fit_qubit(const double* freq_ghz, const qwb_complex* t, size_t n,
                  qwb_qubit_fit_report* out) {
    if (int rc = check_ptr(freq_ghz); rc) return rc;
    if (int rc = check_ptr(t); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] {
        std::vector<double> f(n);
        std::vector<cd> tv(n);
        for (size_t i = 0; i < n; ++i) {
            f[i] = freq_ghz[i] * 1e9;
            tv[i] = from_c(t[i]);
        }
        auto rep = qwb::extract_qubit_params(f, tv);
        out->omega_ghz = rep.omega / two_pi / 1e9;
        out->gamma_mhz = rep.Gamma / two_pi / 1e6;
        out->gamma_total_mhz = rep.gamma / two_pi / 1e6;
        out->gamma_n_mhz = rep.Gamma_n / two_pi / 1e6;
        out->phi_rad = rep.phi;
        out->rms_residual = rep.rms_residual;
        out->sigma_omega_ghz = rep.sigma_omega / two_pi / 1e9;
        out->sigma_gamma_mhz = rep.sigma_Gamma / two_pi / 1e6;
        out->sigma_gamma_total_mhz = rep.sigma_gamma / two_pi / 1e6;
        out->sigma_phi_rad = rep.sigma_phi;
        out->gamma_n_negative = rep.gamma_n_negative ? 1 : 0;
        out->span_warning = rep.span_warning ? 1 : 0;
        out->converged = rep.converged ? 1 : 0;
        if (!rep.converged) throw qwb::FitError("qubit parameter fit diverged");
    });
}

int qwb_fit_saturation(const double* power_w, const double* t_abs, size_t n,
                       double gamma_total_mhz_init, qwb_saturation_fit_report* out) {
    if (int rc = check_ptr(power_w); rc) return rc;
    if (int rc = check_ptr(t_abs); rc) return rc;
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] {
        auto rep = qwb::fit_saturation(std::span(power_w, n), std::span(t_abs, n),
                                       gamma_total_mhz_init * 1e6 * two_pi);
        out->gamma_mhz = rep.Gamma / two_pi / 1e6;
        out->gamma_total_mhz = rep.gamma / two_pi / 1e6;
        out->phi_rad = rep.phi;
        out->k_rabi = rep.k_rabi;
        out->rms_residual = rep.rms_residual;
        out->bracketing_warning = rep.bracketing_warning ? 1 : 0;
        out->converged = rep.converged ? 1 : 0;
        if (!rep.converged) throw qwb::FitError("saturation fit diverged");
    });
}

int qwb_calibrate_transmission(const double* time_s, const qwb_complex* v_on,
                               const qwb_complex* v_off, size_t n,
                               double win_lo_s, double win_hi_s, double* t_abs) {
    if (int rc = check_ptr(time_s); rc) return rc;
    if (int rc = check_ptr(v_on); rc) return rc;
    if (int rc = check_ptr(v_off); rc) return rc;
    if (int rc = check_ptr(t_abs); rc) return rc;
    return guarded([&] {
        std::vector<cd> on(n), off(n);
        for (size_t i = 0; i < n; ++i) {
            on[i] = from_c(v_on[i]);
            off[i] = from_c(v_off[i]);
        }
        *t_abs = qwb::calibrate_transmission(std::span(time_s, n), on, off,
                                             win_lo_s, win_hi_s);
    });
}

int qwb_solve_line_budget(double k_source, double k_chip, double source_power_w,
                          double digitizer_power_w, double end_to_end_db,
                          qwb_line_budget* out) {
    if (int rc = check_ptr(out); rc) return rc;
    return guarded([&] {
        auto lb = qwb::solve_line_budget(k_source, k_chip, source_power_w,
                                         digitizer_power_w, end_to_end_db);
        out->attenuation_db = lb.attenuation_db;
        out->gain_db = lb.gain_db;
        out->consistency_db = lb.consistency_db;
    });
}

} // extern "C"
