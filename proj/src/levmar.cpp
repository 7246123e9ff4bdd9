#include "qwb/levmar.hpp"
#include "qwb/errors.hpp"

#include <cmath>
#include <numeric>

namespace qwb {

bool solve_dense(std::vector<double> a, std::vector<double> b, std::span<double> x) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
        if (std::fabs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (std::size_t c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a[i * n + c] * x[c];
        x[i] = s / a[i * n + i];
    }
    return true;
}

std::vector<double> numeric_jacobian(const ResidualFn& fn, std::span<const double> p,
                                     std::size_t m, std::span<const double> scale,
                                     bool central) {
    const std::size_t n = p.size();
    std::vector<double> jac(m * n);
    std::vector<double> pw(p.begin(), p.end());
    std::vector<double> r0(m), rp(m), rm(m);
    if (!central) fn(pw, r0);
    for (std::size_t j = 0; j < n; ++j) {
        const double h = (central ? 1e-5 : 1e-7) *
                         std::max(std::fabs(scale[j]), std::fabs(p[j]));
        const double step = h > 0.0 ? h : 1e-10;
        pw[j] = p[j] + step;
        fn(pw, rp);
        if (central) {
            pw[j] = p[j] - step;
            fn(pw, rm);
        }
        pw[j] = p[j];
        const double inv = central ? 0.5 / step : 1.0 / step;
        for (std::size_t i = 0; i < m; ++i)
            jac[i * n + j] = (rp[i] - (central ? rm[i] : r0[i])) * inv;
    }
    return jac;
}

LevMarFit levmar(const ResidualFn& fn, std::vector<double> p0, std::size_t m,
                 LevMarOptions opts) {
    const std::size_t n = p0.size();
    if (n == 0 || m < n) throw UsageError("levmar: need at least as many residuals as parameters");
    if (opts.scale.empty()) {
        opts.scale.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            opts.scale[j] = std::max(std::fabs(p0[j]), 1e-8);
    }

    std::vector<double> r(m), r_try(m), p = p0, p_try(n), step(n);
    fn(p, r);
    double cost = std::inner_product(r.begin(), r.end(), r.begin(), 0.0);

    double lambda = 1e-3;
    LevMarFit fit;
    bool done = false;
    int it = 0;
    for (; it < opts.max_iter && !done; ++it) {
        auto jac = numeric_jacobian(fn, p, m, opts.scale, false);

        // normal equations J^T J + lambda diag(J^T J)
        std::vector<double> jtj(n * n, 0.0), jtr(n, 0.0);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t a = 0; a < n; ++a) {
                jtr[a] += jac[i * n + a] * r[i];
                for (std::size_t b = a; b < n; ++b)
                    jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
            }
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < a; ++b) jtj[a * n + b] = jtj[b * n + a];

        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            std::vector<double> a_damped = jtj;
            for (std::size_t d = 0; d < n; ++d)
                a_damped[d * n + d] += lambda * std::max(jtj[d * n + d], 1e-30);
            std::vector<double> rhs(n);
            for (std::size_t d = 0; d < n; ++d) rhs[d] = -jtr[d];
            if (!solve_dense(a_damped, rhs, step)) {
                lambda *= 10.0;
                continue;
            }
            for (std::size_t d = 0; d < n; ++d) p_try[d] = p[d] + step[d];
            fn(p_try, r_try);
            const double cost_try =
                std::inner_product(r_try.begin(), r_try.end(), r_try.begin(), 0.0);
            if (cost_try < cost) {
                double step_norm = 0.0;
                for (std::size_t d = 0; d < n; ++d)
                    step_norm = std::max(step_norm,
                                         std::fabs(step[d]) / std::max(opts.scale[d], 1e-30));
                const double drop = cost - cost_try;
                p = p_try;
                r = r_try;
                cost = cost_try;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (step_norm < opts.xtol || drop <= opts.ftol * std::max(cost, 1e-300))
                    done = true;
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            done = true;  // no descent direction left; already at the minimum
            break;
        }
    }

    fit.p = p;
    fit.rms = std::sqrt(cost / static_cast<double>(m));
    fit.iterations = it;
    fit.converged = done;

    // covariance = rms^2 * (J^T J)^-1, column by column
    auto jac = numeric_jacobian(fn, p, m, opts.scale, false);
    std::vector<double> jtj(n * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                jtj[a * n + b] += jac[i * n + a] * jac[i * n + b];
    const double var = m > n ? cost / static_cast<double>(m - n) : 0.0;
    fit.covariance.assign(n * n, 0.0);
    std::vector<double> col(n);
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<double> e(n, 0.0);
        e[c] = 1.0;
        if (!solve_dense(jtj, e, col)) {
            fit.covariance.assign(n * n, 0.0);
            break;
        }
        for (std::size_t rrow = 0; rrow < n; ++rrow)
            fit.covariance[rrow * n + c] = var * col[rrow];
    }
    return fit;
}

} // namespace qwb
