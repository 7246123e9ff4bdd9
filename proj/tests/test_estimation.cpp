#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qwb/errors.hpp"
#include "qwb/estimation.hpp"
#include "qwb/levmar.hpp"
#include "qwb/scattering.hpp"

#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace qwb;
using cd = std::complex<double>;

namespace {

constexpr double f0_hz = 4.1108e9;
constexpr double Gamma1 = two_pi * 22.15e6;
constexpr double gamma1 = two_pi * 11.465e6;
constexpr double phi1 = 0.0526;

// test-side generator for the weak-probe transmission trace
cd model_t(double f_hz, double f0, double Gamma, double gamma, double phi) {
    const double u = two_pi * (f_hz - f0) / gamma;
    return 1.0 - std::polar(1.0, phi) * (Gamma / (2.0 * gamma)) * cd(1.0, -u) /
                     (1.0 + u * u);
}

struct Trace {
    std::vector<double> f;
    std::vector<cd> t;
};

Trace make_trace(std::size_t n, double span_gammas, double sigma, unsigned seed,
                 double f0 = f0_hz, double Gamma = Gamma1, double gamma = gamma1,
                 double phi = phi1) {
    Trace tr;
    std::mt19937 rng(seed);
    std::normal_distribution<double> nrm(0.0, 1.0);
    const double half = span_gammas * gamma / two_pi;
    for (std::size_t i = 0; i < n; ++i) {
        const double f =
            f0 - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(n - 1);
        cd t = model_t(f, f0, Gamma, gamma, phi);
        if (sigma > 0.0) t += sigma * cd(nrm(rng), nrm(rng));
        tr.f.push_back(f);
        tr.t.push_back(t);
    }
    return tr;
}

} // namespace

TEST_CASE("circle fit on exact circles") {
    SUBCASE("three points on the unit circle") {
        std::vector<cd> pts{{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}};
        auto res = circle_fit(pts);
        CHECK(std::abs(res.center) < 1e-12);
        CHECK(res.radius == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(res.rms_residual < 1e-12);
    }
    SUBCASE("offset circle, partial arc") {
        const cd c0{3.0, -2.0};
        std::vector<cd> pts;
        for (int i = 0; i < 40; ++i)
            pts.push_back(c0 + 0.7 * std::polar(1.0, 0.1 + 0.05 * i));
        auto res = circle_fit(pts);
        CHECK(std::abs(res.center - c0) < 1e-9);
        CHECK(res.radius == doctest::Approx(0.7).epsilon(1e-10));
    }
}

TEST_CASE("weak-probe trace lies on the predicted circle") {
    auto tr = make_trace(401, 30.0, 0.0, 0);
    auto res = circle_fit(tr.t);
    // frozen: center 1 - e^{i phi} Gamma/(4 gamma), radius Gamma/(4 gamma)
    CHECK(res.center.real() == doctest::Approx(0.5176762931260475).epsilon(1e-6));
    CHECK(res.center.imag() == doctest::Approx(-0.025393650681414973).epsilon(1e-4));
    CHECK(res.radius == doctest::Approx(0.48299171391190576).epsilon(1e-6));
    CHECK(res.rms_residual < 1e-10);
}

TEST_CASE("circle fit under seeded noise") {
    auto tr = make_trace(401, 30.0, 0.01, 1234);
    auto res = circle_fit(tr.t);
    CHECK(std::fabs(res.radius - 0.48299171391190576) < 0.01 * 0.483);
    CHECK(std::abs(res.center - cd(0.5176762931260475, -0.025393650681414973)) < 0.01);
}

TEST_CASE("degenerate geometry") {
    std::vector<cd> two{{0.0, 0.0}, {1.0, 0.0}};
    CHECK_THROWS_AS(circle_fit(two), DegenerateGeometryError);
    std::vector<cd> line;
    for (int i = 0; i < 10; ++i) line.push_back(cd(0.1 * i, 0.2 * i));
    CHECK_THROWS_AS(circle_fit(line), DegenerateGeometryError);
    std::vector<cd> same(5, cd(1.0, 1.0));
    CHECK_THROWS_AS(circle_fit(same), DegenerateGeometryError);
}

TEST_CASE("circle-fit rotation equivariance") {
    auto tr = make_trace(101, 20.0, 0.005, 99);
    auto base = circle_fit(tr.t);
    const double alpha = 0.777;
    std::vector<cd> rot;
    for (const cd& p : tr.t) rot.push_back(p * std::polar(1.0, alpha));
    auto res = circle_fit(rot);
    CHECK(res.radius == doctest::Approx(base.radius).epsilon(1e-9));
    CHECK(std::abs(res.center - base.center * std::polar(1.0, alpha)) < 1e-9);
}

TEST_CASE("parameter extraction, noise-free") {
    auto tr = make_trace(401, 8.0, 0.0, 0);
    auto rep = extract_qubit_params(tr.f, tr.t);
    REQUIRE(rep.converged);
    CHECK(std::fabs(rep.omega / two_pi - f0_hz) <= 1e-3 * gamma1 / two_pi);
    CHECK(std::fabs(rep.Gamma - Gamma1) <= 1e-3 * Gamma1);
    CHECK(std::fabs(rep.gamma - gamma1) <= 1e-3 * gamma1);
    CHECK(std::fabs(rep.phi - phi1) <= 1e-3 * std::fabs(phi1));
    CHECK(std::fabs(rep.Gamma_n - (gamma1 - 0.5 * Gamma1)) <= 1e-3 * gamma1);
    CHECK(rep.rms_residual < 1e-10);
    CHECK_FALSE(rep.span_warning);
    CHECK_FALSE(rep.gamma_n_negative);
}

TEST_CASE("parameter extraction under sigma = 0.01 noise") {
    auto tr = make_trace(2001, 10.0, 0.01, 20240918);
    auto rep = extract_qubit_params(tr.f, tr.t);
    REQUIRE(rep.converged);
    CHECK(std::fabs(rep.omega / two_pi - f0_hz) <= 0.01 * gamma1 / two_pi);
    CHECK(std::fabs(rep.Gamma - Gamma1) <= 0.01 * Gamma1);
    CHECK(std::fabs(rep.gamma - gamma1) <= 0.01 * gamma1);
    CHECK(std::fabs(rep.phi - phi1) <= 0.01);
    // reported uncertainties are in the right ballpark
    CHECK(rep.sigma_Gamma > 0.0);
    CHECK(rep.sigma_Gamma < 0.05 * Gamma1);
}

TEST_CASE("noise scaling is linear in sigma") {
    // one fixed noise shape, scaled: first-order error must scale with sigma
    auto clean = make_trace(801, 10.0, 0.0, 0);
    std::mt19937 rng(5150);
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::vector<cd> shape;
    for (std::size_t i = 0; i < clean.t.size(); ++i) shape.push_back({nrm(rng), nrm(rng)});

    auto param_err = [&](double sigma) {
        std::vector<cd> noisy(clean.t);
        for (std::size_t i = 0; i < noisy.size(); ++i) noisy[i] += sigma * shape[i];
        auto rep = extract_qubit_params(clean.f, noisy);
        REQUIRE(rep.converged);
        const double dw = (rep.omega - two_pi * f0_hz) / gamma1;
        const double dG = (rep.Gamma - Gamma1) / Gamma1;
        const double dg = (rep.gamma - gamma1) / gamma1;
        const double dp = rep.phi - phi1;
        return std::sqrt(dw * dw + dG * dG + dg * dg + dp * dp);
    };
    const double e1 = param_err(0.005);
    const double e2 = param_err(0.01);
    const double e3 = param_err(0.02);
    CHECK(e2 / e1 == doctest::Approx(2.0).epsilon(0.25));
    CHECK(e3 / e2 == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("span warning and sideband flags") {
    auto narrow = make_trace(101, 1.0, 0.0, 0);
    auto rep = extract_qubit_params(narrow.f, narrow.t);
    CHECK(rep.span_warning);

    // gamma below Gamma/2 in the generator flags a negative dephasing rate
    auto odd = make_trace(401, 8.0, 0.0, 0, f0_hz, Gamma1, 0.48 * Gamma1, phi1);
    auto rep2 = extract_qubit_params(odd.f, odd.t);
    REQUIRE(rep2.converged);
    CHECK(rep2.Gamma_n < 0.0);
    CHECK(rep2.gamma_n_negative);
}

TEST_CASE("fit idempotence") {
    auto noisy = make_trace(401, 8.0, 0.01, 777);
    auto first = extract_qubit_params(noisy.f, noisy.t);
    REQUIRE(first.converged);
    auto regen = make_trace(401, 8.0, 0.0, 0, first.omega / two_pi, first.Gamma,
                            first.gamma, first.phi);
    auto second = extract_qubit_params(regen.f, regen.t);
    REQUIRE(second.converged);
    CHECK(std::fabs(second.omega - first.omega) <= 1e-6 * first.omega);
    CHECK(std::fabs(second.Gamma - first.Gamma) <= 1e-6 * first.Gamma);
    CHECK(std::fabs(second.gamma - first.gamma) <= 1e-6 * first.gamma);
    CHECK(std::fabs(second.phi - first.phi) <= 1e-6);
}

TEST_CASE("input validation for parameter extraction") {
    auto tr = make_trace(10, 8.0, 0.0, 0);
    std::vector<double> short_f(tr.f.begin(), tr.f.begin() + 9);
    CHECK_THROWS_AS(extract_qubit_params(short_f, tr.t), UsageError);
    std::vector<double> unsorted(tr.f);
    std::swap(unsorted[3], unsorted[4]);
    CHECK_THROWS_AS(extract_qubit_params(unsorted, tr.t), UsageError);
    std::vector<double> f5(tr.f.begin(), tr.f.begin() + 5);
    std::vector<cd> t5(tr.t.begin(), tr.t.begin() + 5);
    CHECK_THROWS_AS(extract_qubit_params(f5, t5), UsageError);
}

TEST_CASE("forward and central finite-difference Jacobians agree") {
    auto tr = make_trace(101, 8.0, 0.0, 0);
    const std::size_t m = 2 * tr.t.size();
    ResidualFn fn = [&](std::span<const double> p, std::span<double> r) {
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            const cd mt = model_t(tr.f[i], p[0], p[1], p[2], p[3]);
            r[2 * i] = mt.real() - tr.t[i].real();
            r[2 * i + 1] = mt.imag() - tr.t[i].imag();
        }
    };
    std::vector<double> p{f0_hz * 1.0001, Gamma1 * 1.05, gamma1 * 0.97, 0.06};
    std::vector<double> scale{f0_hz, Gamma1, gamma1, 0.1};
    auto jf = numeric_jacobian(fn, p, m, scale, false);
    auto jc = numeric_jacobian(fn, p, m, scale, true);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < jf.size(); ++i) {
        num += (jf[i] - jc[i]) * (jf[i] - jc[i]);
        den += jc[i] * jc[i];
    }
    CHECK(std::sqrt(num / den) <= 1e-6);
}

TEST_CASE("saturation fit recovers the power conversion") {
    const double k_true = 1e12;
    std::vector<double> power, tab;
    const double p_star = gamma1 * Gamma1 / k_true;
    for (double p = p_star * 1e-3; p <= p_star * 1e3 * 1.0001; p *= std::pow(10.0, 0.25)) {
        const double sat = k_true * p / (gamma1 * Gamma1);
        const cd t = 1.0 - std::polar(1.0, phi1) * (Gamma1 / (2.0 * gamma1)) / (1.0 + sat);
        power.push_back(p);
        tab.push_back(std::abs(t));
    }
    auto rep = fit_saturation(power, tab, gamma1);
    REQUIRE(rep.converged);
    CHECK(std::fabs(rep.Gamma - Gamma1) <= 5e-3 * Gamma1);
    CHECK(std::fabs(rep.phi - phi1) <= 5e-3);
    CHECK(std::fabs(rep.k_rabi - k_true) <= 5e-3 * k_true);
    CHECK(rep.gamma == gamma1);
    CHECK_FALSE(rep.bracketing_warning);

    SUBCASE("unbracketed powers raise the warning") {
        std::vector<double> weak_p, weak_t;
        for (std::size_t i = 0; i < power.size(); ++i) {
            if (power[i] < p_star * 0.01) {
                weak_p.push_back(power[i]);
                weak_t.push_back(tab[i]);
            }
        }
        auto rep2 = fit_saturation(weak_p, weak_t, gamma1);
        CHECK(rep2.bracketing_warning);
    }
    SUBCASE("bad inputs") {
        std::vector<double> neg{1.0, -1.0, 2.0, 3.0};
        std::vector<double> t4{0.1, 0.2, 0.3, 0.4};
        CHECK_THROWS_AS(fit_saturation(neg, t4, gamma1), DomainError);
        std::vector<double> p3{1.0, 2.0, 3.0};
        std::vector<double> t3{0.1, 0.2, 0.3};
        CHECK_THROWS_AS(fit_saturation(p3, t3, gamma1), UsageError);
        CHECK_THROWS_AS(fit_saturation(t4, t4, -1.0), DomainError);
    }
}

TEST_CASE("transmission calibration") {
    std::vector<double> t;
    std::vector<cd> on, off;
    for (int i = 0; i < 300; ++i) {
        t.push_back(i * 1e-9);
        const cd ref(3.0 + 0.01 * i, -1.0);
        off.push_back(ref);
        on.push_back(ref);
    }
    SUBCASE("identical traces give unity") {
        CHECK(std::fabs(calibrate_transmission(t, on, off, 50e-9, 150e-9) - 1.0) <=
              1e-12);
    }
    SUBCASE("scaling is recovered and window is respected") {
        std::vector<cd> scaled(off);
        for (std::size_t i = 0; i < scaled.size(); ++i) {
            scaled[i] *= cd(0.03, 0.04);          // |.| = 0.05
            if (t[i] < 50e-9 || t[i] > 150e-9) scaled[i] = cd(99.0, 99.0);
        }
        CHECK(calibrate_transmission(t, scaled, off, 50e-9, 150e-9) ==
              doctest::Approx(0.05).epsilon(1e-12));
    }
    SUBCASE("resonant extinction from constant steady-state fields") {
        const cd t0(0.03535258625209492, -0.05078730136282995);
        std::vector<cd> von(off);
        for (auto& v : von) v *= t0;
        CHECK(calibrate_transmission(t, von, off, 50e-9, 150e-9) ==
              doctest::Approx(0.061880169153216764).epsilon(1e-12));
    }
    SUBCASE("errors") {
        std::vector<cd> zeros(off.size(), cd(0.0, 0.0));
        CHECK_THROWS_AS(calibrate_transmission(t, on, zeros, 50e-9, 150e-9),
                        DomainError);
        CHECK_THROWS_AS(calibrate_transmission(t, on, off, 150e-9, 50e-9), UsageError);
        CHECK_THROWS_AS(calibrate_transmission(t, on, off, 1.0, 2.0), UsageError);
        std::vector<cd> short_on(on.begin(), on.end() - 1);
        CHECK_THROWS_AS(calibrate_transmission(t, short_on, off, 50e-9, 150e-9),
                        UsageError);
    }
}

TEST_CASE("line budget") {
    const double a_db = -132.06, g_db = 89.77;
    const double a_lin = std::pow(10.0, a_db / 10.0);
    const double k_chip = 1.0219e32;
    const double k_source = k_chip * a_lin;
    const double p_src = 1e-3;
    const double p_dig = a_lin * p_src * std::pow(10.0, g_db / 10.0);

    auto lb = solve_line_budget(k_source, k_chip, p_src, p_dig, NAN);
    CHECK(std::fabs(lb.attenuation_db - a_db) <= 0.01);
    CHECK(std::fabs(lb.gain_db - g_db) <= 0.01);

    // consistent end-to-end scale passes, inconsistent one throws
    auto lb2 = solve_line_budget(k_source, k_chip, p_src, p_dig, a_db + g_db + 0.5);
    CHECK(lb2.consistency_db == doctest::Approx(0.5).epsilon(1e-6));
    CHECK_THROWS_AS(solve_line_budget(k_source, k_chip, p_src, p_dig, a_db + g_db + 2.0),
                    DomainError);

    // invariant under a common power rescale
    auto lb3 = solve_line_budget(k_source, k_chip, 2.0 * p_src, 2.0 * p_dig, NAN);
    CHECK(lb3.gain_db == doctest::Approx(lb.gain_db).epsilon(1e-12));

    CHECK_THROWS_AS(solve_line_budget(-1.0, k_chip, p_src, p_dig, NAN), DomainError);
    CHECK_THROWS_AS(solve_line_budget(k_source, k_chip, 0.0, p_dig, NAN), DomainError);
}
