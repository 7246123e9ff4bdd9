#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qwb/errors.hpp"
#include "qwb/interferometer.hpp"

#include <cmath>
#include <complex>
#include <vector>

using namespace qwb;
using cd = std::complex<double>;

namespace {

ScatterMatrix2 table2() {
    return {{0.674, 0.241}, {-0.387, 0.577}, {-0.707, 0.203}, {-0.010, 0.730}};
}

const cd v1_off{4.261, 1.129};
const cd v2_off{2.182, 3.634};
const double theta0 = 1.152;

std::vector<double> theta_grid(std::size_t n, double lo, double hi) {
    std::vector<double> th(n);
    for (std::size_t i = 0; i < n; ++i)
        th[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return th;
}

// least-squares fit of p(theta) = A + B cos(theta) + C sin(theta); returns
// relative rms residual
double sinusoid_residual(const std::vector<double>& th, const std::vector<double>& p) {
    double s[3][3] = {};
    double b[3] = {};
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double x[3] = {1.0, std::cos(th[i]), std::sin(th[i])};
        for (int r = 0; r < 3; ++r) {
            b[r] += x[r] * p[i];
            for (int c = 0; c < 3; ++c) s[r][c] += x[r] * x[c];
        }
    }
    // 3x3 Cramer
    auto det3 = [](double m[3][3]) {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    };
    const double d = det3(s);
    double coef[3];
    for (int k = 0; k < 3; ++k) {
        double m[3][3];
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) m[r][c] = (c == k) ? b[r] : s[r][c];
        coef[k] = det3(m) / d;
    }
    double ss = 0.0, mean = 0.0;
    for (std::size_t i = 0; i < th.size(); ++i) {
        const double fit = coef[0] + coef[1] * std::cos(th[i]) + coef[2] * std::sin(th[i]);
        ss += (p[i] - fit) * (p[i] - fit);
        mean += p[i];
    }
    mean /= static_cast<double>(th.size());
    return std::sqrt(ss / static_cast<double>(th.size())) / mean;
}

} // namespace

TEST_CASE("combine is a plain matrix-vector product") {
    ScatterMatrix2 id{{1, 0}, {0, 0}, {0, 0}, {1, 0}};
    auto [a, b] = combine(id, {2.0, 1.0}, {-1.0, 0.5});
    CHECK(a == cd(2.0, 1.0));
    CHECK(b == cd(-1.0, 0.5));

    auto m = table2();
    auto [v3, v4] = combine(m, v1_off, cd(0.0, 0.0));
    CHECK(std::abs(v3 - m.t_l * v1_off) < 1e-15);
    CHECK(std::abs(v4 - m.r_l * v1_off) < 1e-15);
}

TEST_CASE("measured fixture at theta = 0") {
    auto m = table2();
    const cd v1 = v1_off * std::polar(1.0, theta0);
    auto [v3, v4] = combine(m, v1, v2_off);
    // independent expansion in real arithmetic
    const cd ora_v3(m.t_l.real() * v1.real() - m.t_l.imag() * v1.imag() +
                        m.r_r.real() * v2_off.real() - m.r_r.imag() * v2_off.imag(),
                    m.t_l.real() * v1.imag() + m.t_l.imag() * v1.real() +
                        m.r_r.real() * v2_off.imag() + m.r_r.imag() * v2_off.real());
    CHECK(std::abs(v3 - ora_v3) < 1e-12);
    // frozen value
    CHECK(v3.real() == doctest::Approx(-3.51734394650949).epsilon(1e-9));
    CHECK(v3.imag() == doctest::Approx(2.95484957797042).epsilon(1e-9));
    CHECK(std::abs(v3 - cd(-3.52, 2.95)) < 1e-2);
}

TEST_CASE("fringe scan is sinusoidal with period exactly 2 pi") {
    auto th = theta_grid(721, 0.0, 2.0 * two_pi);
    auto tr = fringe_scan(table2(), {v1_off, theta0}, v2_off, th);

    CHECK(sinusoid_residual(tr.theta, tr.p3) <= 1e-10);
    CHECK(sinusoid_residual(tr.theta, tr.p4) <= 1e-10);

    // grid repeats after one period: 721 points over two periods
    for (std::size_t i = 0; i + 360 < th.size(); ++i) {
        CHECK(tr.p3[i] == doctest::Approx(tr.p3[i + 360]).epsilon(1e-12));
        CHECK(tr.p4[i] == doctest::Approx(tr.p4[i + 360]).epsilon(1e-12));
    }
}

TEST_CASE("theta0 only shifts the fringe") {
    auto th = theta_grid(360, 0.0, two_pi);
    const double shift = 0.4321;
    auto base = fringe_scan(table2(), {v1_off, theta0}, v2_off, th);
    std::vector<double> th_shifted(th);
    for (double& x : th_shifted) x -= shift;
    auto moved = fringe_scan(table2(), {v1_off, theta0 + shift}, v2_off, th_shifted);
    for (std::size_t i = 0; i < th.size(); ++i)
        CHECK(moved.p3[i] == doctest::Approx(base.p3[i]).epsilon(1e-12));
}

TEST_CASE("linearity in the input amplitudes") {
    auto th = theta_grid(50, 0.0, two_pi);
    const cd scale{1.7, -0.6};
    auto base = fringe_scan(table2(), {v1_off, theta0}, v2_off, th);
    auto scaled = fringe_scan(table2(), {scale * v1_off, theta0}, scale * v2_off, th);
    for (std::size_t i = 0; i < th.size(); ++i)
        CHECK(std::abs(scaled.v3[i] - scale * base.v3[i]) <
              1e-12 * std::abs(scale * base.v3[i]) + 1e-15);
}

TEST_CASE("balanced inputs cancel completely at the right phase") {
    ScatterMatrix2 m{{1, 0}, {1, 0}, {1, 0}, {-1, 0}};
    auto th = theta_grid(3601, 0.0, two_pi);
    auto tr = fringe_scan(m, {cd(1.0, 0.0), 0.0}, cd(-1.0, 0.0), th);
    double lo = 1e300;
    for (double p : tr.p3) lo = std::min(lo, p);
    CHECK(lo < 1e-5);
    CHECK(visibility(tr.p3) > 0.999);
}

TEST_CASE("visibility edge cases") {
    std::vector<double> zeros(5, 0.0);
    CHECK(visibility(zeros) == 0.0);
    std::vector<double> flat(5, 2.0);
    CHECK(visibility(flat) == 0.0);
    std::vector<double> two{1.0, 3.0};
    CHECK(visibility(two) == doctest::Approx(0.5));
    std::vector<double> empty;
    CHECK_THROWS_AS(visibility(empty), UsageError);
}

TEST_CASE("line calibration round trip") {
    QubitParams q = QubitParams::from_table(4.12, 22.15, 0.39, 0.0526, 1e12);
    const Coefficients c0 = reflection(q, {4.1108e9 * two_pi, 0.0});
    auto cal = fit_line_calibration(table2(), c0);
    auto rebuilt = cal.apply(c0);
    CHECK(std::abs(rebuilt.t_l - table2().t_l) < 1e-14);
    CHECK(std::abs(rebuilt.r_r - table2().r_r) < 1e-14);
    CHECK(std::abs(rebuilt.r_l - table2().r_l) < 1e-14);
    CHECK(std::abs(rebuilt.t_r - table2().t_r) < 1e-14);
}

TEST_CASE("nonlinear scan limits") {
    QubitParams q = QubitParams::from_table(4.12, 22.15, 0.39, 0.0526, 1e12);
    const double wp = 4.1108e9 * two_pi;
    const Coefficients c0 = reflection(q, {wp, 0.0});
    auto cal = fit_line_calibration(table2(), c0);
    auto th = theta_grid(201, 0.0, 2.0 * two_pi);
    const PortField v1{v1_off, theta0};

    auto linear = fringe_scan(cal.apply(c0), v1, v2_off, th);

    SUBCASE("zero power reduces to the linear scan") {
        auto nl = nonlinear_fringe_scan(q, cal, v1, v2_off, 0.0, 0.0, wp, th);
        for (std::size_t i = 0; i < th.size(); ++i)
            CHECK(std::abs(nl.v3[i] - linear.v3[i]) <= 1e-9);
    }
    SUBCASE("visibility drops at high power but stays positive") {
        const double g = q.gamma();
        const double p_weak = (g / 30.0) * (g / 30.0) / q.k_rabi;
        const double p_strong = p_weak * std::pow(10.0, 4.5);  // +45 dB
        auto weak = nonlinear_fringe_scan(q, cal, v1, v2_off, p_weak, p_weak, wp, th);
        auto strong =
            nonlinear_fringe_scan(q, cal, v1, v2_off, p_strong, p_strong, wp, th);
        const double vw = visibility(weak.p3);
        const double vs = visibility(strong.p3);
        CHECK(vs < vw);
        CHECK(vs > 0.0);
        CHECK(visibility(strong.p4) < visibility(weak.p4));
        CHECK(visibility(strong.p4) > 0.0);
    }
    SUBCASE("approach to the linear limit is first order in power") {
        const double g = q.gamma();
        const double p = (g / 100.0) * (g / 100.0) / q.k_rabi;
        auto d_of = [&](double pw) {
            auto nl = nonlinear_fringe_scan(q, cal, v1, v2_off, pw, pw, wp, th);
            double d = 0.0;
            for (std::size_t i = 0; i < th.size(); ++i)
                d = std::max(d, std::abs(nl.v3[i] - linear.v3[i]));
            return d;
        };
        const double ratio = d_of(p) / d_of(0.5 * p);
        CHECK(ratio > 1.5);
        CHECK(ratio < 2.5);
    }
}

TEST_CASE("usage and domain errors") {
    std::vector<double> empty;
    CHECK_THROWS_AS(fringe_scan(table2(), {v1_off, 0.0}, v2_off, empty), UsageError);
    LineCalibration bad{0.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(bad.validate(), DomainError);
    Coefficients zero{};
    CHECK_THROWS_AS(fit_line_calibration(table2(), zero), DomainError);
}
