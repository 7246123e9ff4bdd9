#ifndef QWB_CONFIG_HPP
#define QWB_CONFIG_HPP

#include "qwb/interferometer.hpp"
#include "qwb/scattering.hpp"
#include "qwb/transmon.hpp"

#include <complex>
#include <cstdint>
#include <string>

namespace qwb {

// One device: qubit, flux map, line fixture, leakage. Parsed from a flat
// sectioned key = value file; unknown keys are rejected.
struct DeviceConfig {
    QubitParams qubit;             // omega = spectroscopy bias point
    TransmonSpec transmon;
    ScatterMatrix2 lines;          // calibrated fixture elements
    std::complex<double> v1_off;   // bare on-chip input amplitudes, nV
    std::complex<double> v2_off;
    double theta0 = 0.0;
    double lines_omega_ghz = 0.0;  // qubit frequency at which the fixture holds
    std::complex<double> leak3;    // constant leakage per output port, nV
    std::complex<double> leak4;
    std::uint64_t config_hash = 0;

    static DeviceConfig defaults();
    static DeviceConfig from_file(const std::string& path);   // throws ParseError
    static DeviceConfig from_text(const std::string& text);   // throws ParseError
    std::string to_text() const;

    // Intrinsic coefficients at the fixture's operating point, weak drive.
    Coefficients lines_intrinsic(double omega_p_ghz) const;
};

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace qwb

#endif
