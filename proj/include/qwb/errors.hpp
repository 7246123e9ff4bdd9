#ifndef QWB_ERRORS_HPP
#define QWB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qwb {

// Invalid physical inputs (out-of-range parameters, non-finite values,
// flux outside the dispersion validity window).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller misuse: empty grids, mismatched lengths, unstable step sizes.
struct UsageError : std::runtime_error {
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fit did not converge or the geometry is degenerate.
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DegenerateGeometryError : FitError {
    explicit DegenerateGeometryError(const std::string& msg) : FitError(msg) {}
};

// Malformed config or data file.
struct ParseError : std::runtime_error {
    ParseError(const std::string& msg, int line_number)
        : std::runtime_error(msg), line(line_number) {}
    int line;
};

} // namespace qwb

#endif
