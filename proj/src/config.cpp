#include "qwb/config.hpp"
#include "qwb/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace qwb {

namespace {

constexpr double hbar = 1.054571817e-34;  // J s

double parse_real(const std::string& s, int line) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("invalid number '" + s + "'", line);
    }
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size())
        throw ParseError("trailing characters in number '" + s + "'", line);
    return v;
}

// "a+bi", "a-bi", "bi", or plain real
std::complex<double> parse_complex(const std::string& s, int line) {
    std::string v = s;
    if (!v.empty() && v.back() == 'i') {
        v.pop_back();
        // split at the last +/- that is not an exponent sign
        std::size_t split = std::string::npos;
        for (std::size_t i = v.size(); i-- > 1;) {
            if ((v[i] == '+' || v[i] == '-') && v[i - 1] != 'e' && v[i - 1] != 'E') {
                split = i;
                break;
            }
        }
        if (split == std::string::npos)
            return {0.0, parse_real(v, line)};
        const double re = parse_real(v.substr(0, split), line);
        std::string im_s = v.substr(split);
        if (im_s == "+" || im_s == "-") im_s += "1";
        return {re, parse_real(im_s, line)};
    }
    return {parse_real(v, line), 0.0};
}

std::string fmt_complex(std::complex<double> z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

} // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

DeviceConfig DeviceConfig::defaults() {
    DeviceConfig c;
    c.qubit = QubitParams::from_table(4.1108, 22.15, 0.39, 0.0526, 1.0);
    // default Rabi conversion from the radiative coupling: Omega^2 = 2 Gamma P / (hbar omega)
    c.qubit.k_rabi = 2.0 * c.qubit.Gamma / (hbar * c.qubit.omega);

    c.transmon.ej_hz = 25.57e9;
    c.transmon.ec_hz = 199.4e6;
    c.transmon.flux_per_volt = 1.0;  // placeholder; calibrated below
    c.transmon.flux_offset = 0.0;
    // flux line calibrated so zero voltage parks the qubit at 4.2108 GHz and
    // 220 mV reaches the 4.12 GHz half-transparency point
    const double base = flux_for_freq(c.transmon, 4.2108e9);
    const double target = flux_for_freq(c.transmon, 4.12e9);
    c.transmon.flux_offset = base;
    c.transmon.flux_per_volt = (target - base) / 0.220;

    c.lines = ScatterMatrix2{{0.674, 0.241}, {-0.387, 0.577}, {-0.707, 0.203}, {-0.010, 0.730}};
    c.v1_off = {4.261, 1.129};
    c.v2_off = {2.182, 3.634};
    c.theta0 = 1.152;
    c.lines_omega_ghz = 4.12;
    c.leak3 = 0.0;
    c.leak4 = 0.0;
    c.config_hash = fnv1a64(c.to_text());
    return c;
}

Coefficients DeviceConfig::lines_intrinsic(double omega_p_ghz) const {
    QubitParams q = qubit;
    q.omega = lines_omega_ghz * 1e9 * two_pi;
    return reflection(q, DriveCondition{omega_p_ghz * 1e9 * two_pi, 0.0});
}

DeviceConfig DeviceConfig::from_text(const std::string& text) {
    DeviceConfig c = defaults();
    double omega_ghz = 4.1108, gamma_mhz = 22.15, gamma_n_mhz = 0.39,
           phi_rad = 0.0526, k = c.qubit.k_rabi;

    std::istringstream in(text);
    std::string raw, section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string s = trim(raw);
        if (s.empty() || s[0] == '#' || s[0] == ';') continue;
        if (s.front() == '[') {
            if (s.back() != ']')
                throw ParseError("unterminated section header", line);
            section = s.substr(1, s.size() - 2);
            if (section != "qubit" && section != "transmon" && section != "lines" &&
                section != "leakage")
                throw ParseError("unknown section [" + section + "]", line);
            continue;
        }
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ParseError("expected key = value", line);
        const std::string key = trim(s.substr(0, eq));
        const std::string val = trim(s.substr(eq + 1));
        if (section.empty())
            throw ParseError("key outside any section", line);

        if (section == "qubit") {
            if (key == "omega_ghz") omega_ghz = parse_real(val, line);
            else if (key == "gamma_mhz") gamma_mhz = parse_real(val, line);
            else if (key == "gamma_n_mhz") gamma_n_mhz = parse_real(val, line);
            else if (key == "phi_rad") phi_rad = parse_real(val, line);
            else if (key == "k") k = parse_real(val, line);
            else throw ParseError("unknown key '" + key + "' in [qubit]", line);
        } else if (section == "transmon") {
            if (key == "ej_ghz") c.transmon.ej_hz = parse_real(val, line) * 1e9;
            else if (key == "ec_mhz") c.transmon.ec_hz = parse_real(val, line) * 1e6;
            else if (key == "flux_per_volt") c.transmon.flux_per_volt = parse_real(val, line);
            else if (key == "flux_offset") c.transmon.flux_offset = parse_real(val, line);
            else throw ParseError("unknown key '" + key + "' in [transmon]", line);
        } else if (section == "lines") {
            if (key == "omega_ghz") c.lines_omega_ghz = parse_real(val, line);
            else if (key == "t_l") c.lines.t_l = parse_complex(val, line);
            else if (key == "r_r") c.lines.r_r = parse_complex(val, line);
            else if (key == "r_l") c.lines.r_l = parse_complex(val, line);
            else if (key == "t_r") c.lines.t_r = parse_complex(val, line);
            else if (key == "v1_off_nv") c.v1_off = parse_complex(val, line);
            else if (key == "v2_off_nv") c.v2_off = parse_complex(val, line);
            else if (key == "theta0_rad") c.theta0 = parse_real(val, line);
            else throw ParseError("unknown key '" + key + "' in [lines]", line);
        } else {  // leakage
            if (key == "v3_nv") c.leak3 = parse_complex(val, line);
            else if (key == "v4_nv") c.leak4 = parse_complex(val, line);
            else throw ParseError("unknown key '" + key + "' in [leakage]", line);
        }
    }

    c.qubit = QubitParams::from_table(omega_ghz, gamma_mhz, gamma_n_mhz, phi_rad, k);
    c.transmon.validate();
    c.config_hash = fnv1a64(text);
    return c;
}

DeviceConfig DeviceConfig::from_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw ParseError("cannot open config file '" + path + "'", 0);
    std::ostringstream ss;
    ss << f.rdbuf();
    return from_text(ss.str());
}

std::string DeviceConfig::to_text() const {
    char buf[128];
    std::ostringstream out;
    auto real = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    out << "[qubit]\n";
    out << "omega_ghz = " << real(qubit.omega / two_pi / 1e9) << "\n";
    out << "gamma_mhz = " << real(qubit.Gamma / two_pi / 1e6) << "\n";
    out << "gamma_n_mhz = " << real(qubit.Gamma_n / two_pi / 1e6) << "\n";
    out << "phi_rad = " << real(qubit.phi) << "\n";
    out << "k = " << real(qubit.k_rabi) << "\n\n";
    out << "[transmon]\n";
    out << "ej_ghz = " << real(transmon.ej_hz / 1e9) << "\n";
    out << "ec_mhz = " << real(transmon.ec_hz / 1e6) << "\n";
    out << "flux_per_volt = " << real(transmon.flux_per_volt) << "\n";
    out << "flux_offset = " << real(transmon.flux_offset) << "\n\n";
    out << "[lines]\n";
    out << "omega_ghz = " << real(lines_omega_ghz) << "\n";
    out << "t_l = " << fmt_complex(lines.t_l) << "\n";
    out << "r_r = " << fmt_complex(lines.r_r) << "\n";
    out << "r_l = " << fmt_complex(lines.r_l) << "\n";
    out << "t_r = " << fmt_complex(lines.t_r) << "\n";
    out << "v1_off_nv = " << fmt_complex(v1_off) << "\n";
    out << "v2_off_nv = " << fmt_complex(v2_off) << "\n";
    out << "theta0_rad = " << real(theta0) << "\n\n";
    out << "[leakage]\n";
    out << "v3_nv = " << fmt_complex(leak3) << "\n";
    out << "v4_nv = " << fmt_complex(leak4) << "\n";
    return out.str();
}

} // namespace qwb
