// Workbench CLI for the tunable beam-splitter model. Talks to the core
// exclusively through the C API in qwb.h; datasets go out as CSV with a
// one-line manifest comment, fit results as JSON with stable key order.

#include "qwb.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double two_pi = 6.283185307179586476925287;

struct CliError {
    int code;
    std::string msg;
};

[[noreturn]] void fail(int code, const std::string& msg) { throw CliError{code, msg}; }

void check(int rc) {
    if (rc != QWB_OK) fail(rc, qwb_last_error());
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string hex64(uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct DevicePtr {
    qwb_device* dev = nullptr;
    ~DevicePtr() { qwb_device_free(dev); }
};

struct Manifest {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;

    std::string timestamp() const {
        const char* env = std::getenv("QWB_TIMESTAMP");
        return env ? env : "unset";
    }
    std::string csv_line() const {
        return "# qwb " + std::string(qwb_version()) + " cmd=" + command +
               " config=" + config_hash + " seed=" + std::to_string(seed) +
               " timestamp=" + timestamp();
    }
    ordered_json json() const {
        ordered_json m;
        m["tool"] = "qwb";
        m["version"] = qwb_version();
        m["command"] = command;
        m["config"] = config_hash;
        m["seed"] = seed;
        m["timestamp"] = timestamp();
        return m;
    }
};

// whole-file write at command end
void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fputs(content.c_str(), stdout);
        return;
    }
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) fail(2, "cannot write " + tmp);
        f << content;
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        fail(2, "cannot move output into place: " + path);
}

qwb_device* load_device(const std::string& config_path) {
    std::string path = config_path;
    if (path.empty()) {
        const char* env = std::getenv("QWB_CONFIG");
        if (env) path = env;
    }
    qwb_device* dev = path.empty() ? qwb_device_default() : qwb_device_from_file(path.c_str());
    if (!dev) fail(path.empty() ? 3 : 5, qwb_last_error());
    return dev;
}

// ---- CSV input parsing -------------------------------------------------

struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
    std::string input_manifest;  // first '#' line, if any
};

CsvData read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail(5, "cannot open input file '" + path + "'");
    CsvData d;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            if (d.input_manifest.empty()) d.input_manifest = line;
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (d.header.empty()) {
            d.header = cells;
            continue;
        }
        if (cells.size() != d.header.size())
            fail(5, "line " + std::to_string(lineno) + ": expected " +
                        std::to_string(d.header.size()) + " columns, got " +
                        std::to_string(cells.size()));
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(c, &pos));
                if (pos != c.size()) throw std::invalid_argument(c);
            } catch (const std::exception&) {
                fail(5, "line " + std::to_string(lineno) + ": bad number '" + c + "'");
            }
        }
        d.rows.push_back(std::move(row));
    }
    if (d.header.empty()) fail(5, "input file '" + path + "' has no data");
    return d;
}

std::size_t column(const CsvData& d, const std::string& name) {
    for (std::size_t i = 0; i < d.header.size(); ++i)
        if (d.header[i] == name) return i;
    fail(5, "missing column '" + name + "'");
}

// ---- subcommands -------------------------------------------------------

int cmd_spectrum(const std::string& config, const Manifest& man, double omega_min,
                 double omega_max, int points, double power, double probe_ghz,
                 const std::string& out_path) {
    if (points < 1 || !(omega_max >= omega_min))
        fail(2, "invalid sweep range");
    DevicePtr d{load_device(config)};

    std::vector<double> omega(points);
    for (int i = 0; i < points; ++i)
        omega[i] = points == 1 ? omega_min
                               : omega_min + (omega_max - omega_min) * i / (points - 1);
    std::vector<qwb_coeffs> c(points);
    check(qwb_spectrum(d.dev, probe_ghz, power, omega.data(), omega.size(), c.data()));

    std::ostringstream out;
    out << man.csv_line() << "\n";
    out << "omega_ghz,T,R,S\n";
    for (int i = 0; i < points; ++i)
        out << fmt(omega[i]) << ',' << fmt(c[i].T) << ',' << fmt(c[i].R) << ','
            << fmt(c[i].S) << "\n";
    write_output(out_path, out.str());
    return 0;
}

void append_switch_rows(std::ostringstream& out, const qwb_transient_sample* s,
                        std::size_t n, const std::string& prefix) {
    for (std::size_t i = 0; i < n; ++i)
        out << prefix << fmt(s[i].time_ns) << ',' << fmt(s[i].coherence.re) << ','
            << fmt(s[i].coherence.im) << ',' << fmt(s[i].sz) << ',' << fmt(s[i].T)
            << ',' << fmt(s[i].R) << ',' << fmt(s[i].v3.re) << ',' << fmt(s[i].v3.im)
            << ',' << fmt(s[i].v4.re) << ',' << fmt(s[i].v4.im) << "\n";
}

int cmd_switch(const std::string& config, const Manifest& man,
               qwb_switch_config scfg, int amp_points, double amp_min,
               double amp_max, const std::string& out_path) {
    DevicePtr d{load_device(config)};
    std::size_t n = 0;
    check(qwb_switch_sample_count(&scfg, &n));
    std::vector<qwb_transient_sample> s(n);

    std::ostringstream out;
    out << man.csv_line() << "\n";
    if (amp_points <= 0) {
        check(qwb_switch_sim(d.dev, &scfg, s.data(), n));
        out << "time_ns,re_sm,im_sm,sz,T,R,re_V3,im_V3,re_V4,im_V4\n";
        append_switch_rows(out, s.data(), n, "");
    } else {
        // long-form amplitude scan
        out << "amp_v,time_ns,re_sm,im_sm,sz,T,R,re_V3,im_V3,re_V4,im_V4\n";
        for (int a = 0; a < amp_points; ++a) {
            const double amp =
                amp_points == 1 ? amp_min
                                : amp_min + (amp_max - amp_min) * a / (amp_points - 1);
            scfg.pulse_amp_v = amp;
            check(qwb_switch_sim(d.dev, &scfg, s.data(), n));
            append_switch_rows(out, s.data(), n, fmt(amp) + ",");
        }
    }
    write_output(out_path, out.str());
    return 0;
}

int cmd_combine(const std::string& config, const Manifest& man, int theta_points,
                double theta_max, bool nonlinear, double power1, double power2,
                double probe_ghz, const std::string& out_path,
                const std::string& report_path) {
    if (theta_points < 2) fail(2, "need at least 2 theta points");
    DevicePtr d{load_device(config)};

    std::vector<double> theta(theta_points);
    for (int i = 0; i < theta_points; ++i)
        theta[i] = theta_max * i / (theta_points - 1);
    std::vector<qwb_complex> v3(theta_points), v4(theta_points);
    if (nonlinear)
        check(qwb_nonlinear_fringe_scan(d.dev, probe_ghz, power1, power2,
                                        theta.data(), theta.size(), v3.data(),
                                        v4.data()));
    else
        check(qwb_fringe_scan(d.dev, theta.data(), theta.size(), v3.data(), v4.data()));

    std::vector<double> p3(theta_points), p4(theta_points);
    for (int i = 0; i < theta_points; ++i) {
        p3[i] = v3[i].re * v3[i].re + v3[i].im * v3[i].im;
        p4[i] = v4[i].re * v4[i].re + v4[i].im * v4[i].im;
    }
    double vis3 = 0.0, vis4 = 0.0;
    check(qwb_visibility(p3.data(), p3.size(), &vis3));
    check(qwb_visibility(p4.data(), p4.size(), &vis4));

    std::ostringstream out;
    out << man.csv_line() << "\n";
    out << "theta_rad,re_V3,im_V3,re_V4,im_V4,P3,P4\n";
    for (int i = 0; i < theta_points; ++i)
        out << fmt(theta[i]) << ',' << fmt(v3[i].re) << ',' << fmt(v3[i].im) << ','
            << fmt(v4[i].re) << ',' << fmt(v4[i].im) << ',' << fmt(p3[i]) << ','
            << fmt(p4[i]) << "\n";
    write_output(out_path, out.str());

    ordered_json rep;
    rep["manifest"] = man.json();
    rep["nonlinear"] = nonlinear;
    rep["visibility_V3"] = vis3;
    rep["visibility_V4"] = vis4;
    write_output(report_path, rep.dump(2) + "\n");
    return 0;
}

int cmd_fit_circle(const Manifest& man, const std::string& input,
                   const std::string& out_path) {
    CsvData d = read_csv(input);
    const std::size_t cf = column(d, "freq_ghz");
    const std::size_t cr = column(d, "re_t");
    const std::size_t ci = column(d, "im_t");
    std::vector<double> freq;
    std::vector<qwb_complex> t;
    for (const auto& row : d.rows) {
        freq.push_back(row[cf]);
        t.push_back({row[cr], row[ci]});
    }

    qwb_circle_fit_result circ{};
    check(qwb_circle_fit(t.data(), t.size(), &circ));
    qwb_qubit_fit_report rep{};
    check(qwb_fit_qubit(freq.data(), t.data(), freq.size(), &rep));

    ordered_json j;
    j["manifest"] = man.json();
    if (!d.input_manifest.empty()) j["input_manifest"] = d.input_manifest;
    j["circle"] = {{"center_re", circ.center.re},
                   {"center_im", circ.center.im},
                   {"radius", circ.radius},
                   {"rms_residual", circ.rms_residual}};
    j["omega_ghz"] = rep.omega_ghz;
    j["gamma_mhz"] = rep.gamma_mhz;
    j["gamma_total_mhz"] = rep.gamma_total_mhz;
    j["gamma_n_mhz"] = rep.gamma_n_mhz;
    j["phi_rad"] = rep.phi_rad;
    j["rms_residual"] = rep.rms_residual;
    j["sigma"] = {{"omega_ghz", rep.sigma_omega_ghz},
                  {"gamma_mhz", rep.sigma_gamma_mhz},
                  {"gamma_total_mhz", rep.sigma_gamma_total_mhz},
                  {"phi_rad", rep.sigma_phi_rad}};
    j["flags"] = {{"gamma_n_negative", rep.gamma_n_negative != 0},
                  {"span_warning", rep.span_warning != 0},
                  {"converged", rep.converged != 0}};
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_fit_saturation(const Manifest& man, const std::string& input,
                       double gamma_init_mhz, const std::string& out_path) {
    CsvData d = read_csv(input);
    const std::size_t cp = column(d, "power_w");
    const std::size_t ct = column(d, "t_abs");
    std::vector<double> power, tabs;
    for (const auto& row : d.rows) {
        power.push_back(row[cp]);
        tabs.push_back(row[ct]);
    }
    qwb_saturation_fit_report rep{};
    check(qwb_fit_saturation(power.data(), tabs.data(), power.size(),
                             gamma_init_mhz, &rep));

    ordered_json j;
    j["manifest"] = man.json();
    if (!d.input_manifest.empty()) j["input_manifest"] = d.input_manifest;
    j["gamma_mhz"] = rep.gamma_mhz;
    j["gamma_total_mhz"] = rep.gamma_total_mhz;
    j["phi_rad"] = rep.phi_rad;
    j["k_rabi"] = rep.k_rabi;
    j["rms_residual"] = rep.rms_residual;
    j["flags"] = {{"bracketing_warning", rep.bracketing_warning != 0},
                  {"converged", rep.converged != 0}};
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

int cmd_fit_calibrate(const Manifest& man, const std::string& input,
                      double win_lo_ns, double win_hi_ns,
                      const std::string& out_path) {
    CsvData d = read_csv(input);
    const std::size_t ct = column(d, "time_ns");
    const std::size_t onr = column(d, "re_on");
    const std::size_t oni = column(d, "im_on");
    const std::size_t offr = column(d, "re_off");
    const std::size_t offi = column(d, "im_off");
    std::vector<double> time;
    std::vector<qwb_complex> on, off;
    for (const auto& row : d.rows) {
        time.push_back(row[ct] * 1e-9);
        on.push_back({row[onr], row[oni]});
        off.push_back({row[offr], row[offi]});
    }
    double t_abs = 0.0;
    check(qwb_calibrate_transmission(time.data(), on.data(), off.data(), time.size(),
                                     win_lo_ns * 1e-9, win_hi_ns * 1e-9, &t_abs));

    ordered_json j;
    j["manifest"] = man.json();
    if (!d.input_manifest.empty()) j["input_manifest"] = d.input_manifest;
    j["window_ns"] = {win_lo_ns, win_hi_ns};
    j["t_abs"] = t_abs;
    write_output(out_path, j.dump(2) + "\n");
    return 0;
}

std::string config_hash_string(const std::string& config) {
    DevicePtr d{load_device(config)};
    return hex64(qwb_device_config_hash(d.dev));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Tunable two-level-atom beam splitter / combiner workbench"};
    app.require_subcommand(1);

    std::string config, output = "-", report = "-", input;
    std::uint64_t seed = 0;
    app.add_option("--config", config, "device config file (default: $QWB_CONFIG or built-in)");
    app.add_option("--seed", seed, "seed recorded in the run manifest");

    // spectrum
    double omega_min = 4.05, omega_max = 4.25, power = 1e-22, probe = 4.1108;
    int points = 401;
    auto* spectrum = app.add_subcommand("spectrum", "T/R/S vs qubit frequency");
    spectrum->add_option("--omega-min", omega_min, "sweep start, GHz");
    spectrum->add_option("--omega-max", omega_max, "sweep end, GHz");
    spectrum->add_option("--points", points, "grid points");
    spectrum->add_option("--power", power, "on-chip probe power, W");
    spectrum->add_option("--probe-ghz", probe, "probe frequency, GHz");
    spectrum->add_option("-o,--output", output, "output CSV ('-' for stdout)");

    // switch
    qwb_switch_config scfg{0.220, 200.0, 5.0, 50.0, 100.0, 0.05, 1.3e-19, 4.1108};
    int amp_points = 0;
    double amp_min = 0.0, amp_max = 0.4;
    auto* sw = app.add_subcommand("switch", "time-resolved flux-pulse switching");
    sw->add_option("--pulse-amp", scfg.pulse_amp_v, "flux pulse amplitude, V");
    sw->add_option("--pulse-len", scfg.plateau_ns, "plateau length, ns");
    sw->add_option("--rise", scfg.rise_sigma_ns, "edge sigma, ns");
    sw->add_option("--pre", scfg.pre_ns, "lead-in before the pulse, ns");
    sw->add_option("--post", scfg.post_ns, "tail after the pulse, ns");
    sw->add_option("--dt", scfg.dt_ns, "integration step, ns");
    sw->add_option("--power", scfg.power_w, "on-chip probe power, W");
    sw->add_option("--probe-ghz", scfg.omega_p_ghz, "probe frequency, GHz");
    sw->add_option("--amp-points", amp_points, "amplitude scan points (0 = single trace)");
    sw->add_option("--amp-min", amp_min, "scan start, V");
    sw->add_option("--amp-max", amp_max, "scan end, V");
    sw->add_option("-o,--output", output, "output CSV");

    // combine
    int theta_points = 201;
    double theta_max = 2.0 * two_pi, power2 = 5.66e-20, power1 = 5.66e-20;
    bool nonlinear = false;
    auto* comb = app.add_subcommand("combine", "two-beam interference fringes");
    comb->add_option("--theta-points", theta_points, "phase grid points");
    comb->add_option("--theta-max", theta_max, "phase scan end, rad");
    comb->add_flag("--nonlinear", nonlinear, "saturation-aware combining");
    comb->add_option("--power", power1, "on-chip power of V1, W");
    comb->add_option("--power2", power2, "on-chip power of V2, W");
    comb->add_option("--probe-ghz", probe, "probe frequency, GHz");
    comb->add_option("-o,--output", output, "output CSV");
    comb->add_option("--report", report, "visibility JSON report");

    // fit
    auto* fit = app.add_subcommand("fit", "parameter extraction from CSV data");
    fit->require_subcommand(1);
    double gamma_init = 11.465, win_lo = 50.0, win_hi = 150.0;
    auto* fc = fit->add_subcommand("circle", "IQ circle fit of weak-probe transmission");
    fc->add_option("--input", input, "CSV with freq_ghz,re_t,im_t")->required();
    fc->add_option("-o,--output", output, "JSON report");
    auto* fs = fit->add_subcommand("saturation", "|t| vs power fit on resonance");
    fs->add_option("--input", input, "CSV with power_w,t_abs")->required();
    fs->add_option("--gamma-init", gamma_init, "decoherence rate from circle fit, MHz");
    fs->add_option("-o,--output", output, "JSON report");
    auto* fcal = fit->add_subcommand("calibrate", "steady-state window |t| from raw traces");
    fcal->add_option("--input", input, "CSV with time_ns,re_on,im_on,re_off,im_off")->required();
    fcal->add_option("--win-lo-ns", win_lo, "window start, ns");
    fcal->add_option("--win-hi-ns", win_hi, "window end, ns");
    fcal->add_option("-o,--output", output, "JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return 2;
    }

    try {
        Manifest man;
        man.seed = seed;
        man.config_hash = config_hash_string(config);
        if (spectrum->parsed()) {
            man.command = "spectrum";
            return cmd_spectrum(config, man, omega_min, omega_max, points, power,
                                probe, output);
        }
        if (sw->parsed()) {
            man.command = "switch";
            return cmd_switch(config, man, scfg, amp_points, amp_min, amp_max, output);
        }
        if (comb->parsed()) {
            man.command = "combine";
            return cmd_combine(config, man, theta_points, theta_max, nonlinear,
                               power1, power2, probe, output, report);
        }
        man.command = "fit";
        if (fc->parsed()) return cmd_fit_circle(man, input, output);
        if (fs->parsed()) return cmd_fit_saturation(man, input, gamma_init, output);
        if (fcal->parsed()) return cmd_fit_calibrate(man, input, win_lo, win_hi, output);
        fail(2, "no subcommand");
    } catch (const CliError& e) {
        std::fprintf(stderr, "qwb: %s\n", e.msg.c_str());
        return e.code;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "qwb: %s\n", e.what());
        return 2;
    }
    return 0;
}
