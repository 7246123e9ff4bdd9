#ifndef QWB_LEVMAR_HPP
#define QWB_LEVMAR_HPP

#include <functional>
#include <span>
#include <vector>

namespace qwb {

// Fills r (length m) with residuals at parameter vector p.
using ResidualFn = std::function<void(std::span<const double>, std::span<double>)>;

struct LevMarOptions {
    int max_iter = 200;
    double ftol = 1e-15;           // relative cost decrease
    double xtol = 1e-13;           // relative step size
    std::vector<double> scale;     // typical parameter magnitudes; defaults to |p0|
};

struct LevMarFit {
    std::vector<double> p;
    double rms = 0.0;              // sqrt(cost / m)
    bool converged = false;
    int iterations = 0;
    std::vector<double> covariance;  // n*n row-major, rms^2 * (J^T J)^-1
};

// Damped least squares with forward-difference Jacobians. Problems here are
// small (n <= 4), so normal equations with Gaussian elimination suffice.
LevMarFit levmar(const ResidualFn& fn, std::vector<double> p0, std::size_t m,
                 LevMarOptions opts = {});

// Finite-difference Jacobian, row-major m x n. central = true uses central
// differences (used in tests to cross-check the forward-difference ones).
std::vector<double> numeric_jacobian(const ResidualFn& fn, std::span<const double> p,
                                     std::size_t m, std::span<const double> scale,
                                     bool central = false);

// Solves A x = b in place for a dense n x n system; returns false if singular.
bool solve_dense(std::vector<double> a, std::vector<double> b,
                 std::span<double> x);

} // namespace qwb

#endif
