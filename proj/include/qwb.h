/* C API for the waveguide beam-splitter workbench core.
 *
 * All functions return QWB_OK (0) on success or a nonzero error code;
 * qwb_last_error() gives a message for the most recent failure on the
 * calling thread. Frequencies cross this boundary in the units used by the
 * configs (GHz for frequencies, MHz for rates); powers are on-chip watts.
 */
#ifndef QWB_H
#define QWB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum qwb_status {
    QWB_OK = 0,
    QWB_ERR_USAGE = 2,
    QWB_ERR_DOMAIN = 3,
    QWB_ERR_FIT = 4,
    QWB_ERR_PARSE = 5
};

typedef struct qwb_device qwb_device; /* opaque */

typedef struct { double re, im; } qwb_complex;

const char* qwb_version(void);
const char* qwb_last_error(void);

/* ---- device handle ------------------------------------------------- */

qwb_device* qwb_device_default(void);
qwb_device* qwb_device_from_file(const char* path); /* NULL on error */
void qwb_device_free(qwb_device* dev);
uint64_t qwb_device_config_hash(const qwb_device* dev);

typedef struct {
    double omega_ghz;
    double gamma_mhz;       /* Gamma */
    double gamma_n_mhz;
    double gamma_total_mhz; /* derived Gamma/2 + Gamma_n */
    double phi_rad;
    double k_rabi;          /* (rad/s)^2 per W */
} qwb_qubit_view;

int qwb_device_qubit(const qwb_device* dev, qwb_qubit_view* out);

typedef struct {
    qwb_complex t_l, r_r, r_l, t_r;
} qwb_smatrix;

typedef struct {
    qwb_smatrix matrix;
    qwb_complex v1_off_nv, v2_off_nv;
    double theta0_rad;
    double omega_ghz; /* qubit frequency at which the fixture holds */
} qwb_lines_view;

int qwb_device_lines(const qwb_device* dev, qwb_lines_view* out);

/* ---- scattering ----------------------------------------------------- */

typedef struct {
    qwb_complex r, t;
    double T, R, S;
} qwb_coeffs;

int qwb_rabi_from_power(const qwb_device* dev, double power_w, double* rabi);
int qwb_reflection(const qwb_device* dev, double omega_ghz, double omega_p_ghz,
                   double power_w, qwb_coeffs* out);
int qwb_spectrum(const qwb_device* dev, double omega_p_ghz, double power_w,
                 const double* omega_ghz, size_t n, qwb_coeffs* out);

/* ---- transmon flux map ---------------------------------------------- */

int qwb_freq_at_flux(const qwb_device* dev, double flux, double* freq_ghz);
int qwb_flux_for_freq(const qwb_device* dev, double freq_ghz, double* flux);

/* ---- flux-pulse switching simulation --------------------------------- */

typedef struct {
    double pulse_amp_v;
    double plateau_ns;
    double rise_sigma_ns;
    double pre_ns;   /* flat lead-in before the pulse */
    double post_ns;  /* flat tail after the pulse */
    double dt_ns;
    double power_w;
    double omega_p_ghz;
} qwb_switch_config;

typedef struct {
    double time_ns;
    qwb_complex coherence;
    double sz;
    double T, R;
    qwb_complex v3, v4; /* input-normalized output fields */
} qwb_transient_sample;

int qwb_switch_sample_count(const qwb_switch_config* cfg, size_t* n);
int qwb_switch_sim(const qwb_device* dev, const qwb_switch_config* cfg,
                   qwb_transient_sample* out, size_t n);

/* ---- beam combining -------------------------------------------------- */

int qwb_combine(const qwb_smatrix* m, qwb_complex v1, qwb_complex v2,
                qwb_complex* v3, qwb_complex* v4);
/* fringe scans use the device's fixture, input amplitudes, and leakage */
int qwb_fringe_scan(const qwb_device* dev, const double* theta_rad, size_t n,
                    qwb_complex* v3, qwb_complex* v4);
int qwb_nonlinear_fringe_scan(const qwb_device* dev, double omega_p_ghz,
                              double power1_w, double power2_w,
                              const double* theta_rad, size_t n,
                              qwb_complex* v3, qwb_complex* v4);
int qwb_visibility(const double* power, size_t n, double* out);

/* ---- estimation ------------------------------------------------------ */

typedef struct {
    qwb_complex center;
    double radius;
    double rms_residual;
} qwb_circle_fit_result;

int qwb_circle_fit(const qwb_complex* points, size_t n, qwb_circle_fit_result* out);

typedef struct {
    double omega_ghz;
    double gamma_mhz;
    double gamma_total_mhz;
    double gamma_n_mhz;
    double phi_rad;
    double rms_residual;
    double sigma_omega_ghz, sigma_gamma_mhz, sigma_gamma_total_mhz, sigma_phi_rad;
    int gamma_n_negative;
    int span_warning;
    int converged;
} qwb_qubit_fit_report;

int qwb_fit_qubit(const double* freq_ghz, const qwb_complex* t, size_t n,
                  qwb_qubit_fit_report* out);

typedef struct {
    double gamma_mhz;
    double gamma_total_mhz;
    double phi_rad;
    double k_rabi;
    double rms_residual;
    int bracketing_warning;
    int converged;
} qwb_saturation_fit_report;

int qwb_fit_saturation(const double* power_w, const double* t_abs, size_t n,
                       double gamma_total_mhz_init, qwb_saturation_fit_report* out);

int qwb_calibrate_transmission(const double* time_s, const qwb_complex* v_on,
                               const qwb_complex* v_off, size_t n,
                               double win_lo_s, double win_hi_s, double* t_abs);

typedef struct {
    double attenuation_db;
    double gain_db;
    double consistency_db;
} qwb_line_budget;

/* pass NAN as end_to_end_db to skip the consistency check */
int qwb_solve_line_budget(double k_source, double k_chip, double source_power_w,
                          double digitizer_power_w, double end_to_end_db,
                          qwb_line_budget* out);

#ifdef __cplusplus
}
#endif

#endif /* QWB_H */
