#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "critwork/cft_scaling.hpp"

using namespace critwork;
using namespace critwork::cft;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using specfun::pi;

namespace {

// Eq.-13-style evaluation through the incomplete beta function (the psi0
// implementation switches to the arccoth form at Delta = 1/2, so this is an
// independent route there).
double psi0_beta_route(double t, const CftParams& p) {
    const double a = pi * t * p.temperature;
    const double s = std::sinh(a);
    const double z = -1.0 / (s * s);
    const cxdbl b = specfun::incomplete_beta(z, p.delta, 0.5);
    const cxdbl val = std::pow(pi, 2.0 * p.delta - 1.0) *
                      std::pow(p.temperature, 2.0 * p.delta - 2.0) /
                      std::pow(p.cutoff, 2.0 * p.delta) *
                      std::exp(cxdbl(0.0, -pi * p.delta)) * std::sin(pi * p.delta) * b;
    return val.real();
}

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    while (std::abs(b - a) > tol * (std::abs(a) + std::abs(b))) {
        if (f(c) > f(d)) b = d; else a = c;
        c = b - gr * (b - a);
        d = a + gr * (b - a);
    }
    return 0.5 * (a + b);
}

}  // namespace

TEST_CASE("scaling dimension 2/(2+M)") {
    CHECK_THAT(scaling_dimension(2), WithinRel(0.5, 1e-15));
    CHECK_THAT(scaling_dimension(3), WithinRel(0.4, 1e-15));
    CHECK_THROWS_AS(scaling_dimension(1), DomainError);
}

TEST_CASE("psi0: beta-function and arccoth forms agree at Delta = 1/2") {
    const CftParams p(0.5, 1.0, 0.1);
    for (double a = 1e-3; a <= 10.0; a *= 1.5) {
        const double t = a / (pi * p.temperature);
        REQUIRE_THAT(psi0_beta_route(t, p), WithinRel(psi0(t, p), 1e-10));
    }
}

TEST_CASE("psi0 large-time decay bound at Delta = 1/2") {
    const CftParams p(0.5, 1.0, 1.0);
    const double t = 50.0 / pi;  // pi t T = 50
    const double v = psi0(t, p);
    CHECK(v > 0.0);
    CHECK(v <= 4.0 / (p.cutoff * p.temperature) * std::exp(-50.0));
}

TEST_CASE("psi0 scaling collapse in tT") {
    for (double d : {0.5, 0.4, 0.25}) {
        const CftParams p1(d, 1.0, 0.01);
        const CftParams p2(d, 1.0, 0.001);
        auto scaled = [d](double t, const CftParams& p) {
            return std::pow(p.cutoff, 2.0 * d) * std::pow(p.temperature, 2.0 - 2.0 * d) *
                   psi0(t, p);
        };
        REQUIRE_THAT(scaled(1.0, p1), WithinRel(scaled(10.0, p2), 1e-12));
    }
}

TEST_CASE("psi0 divergence error at t = 0 for Delta = 1/2") {
    const CftParams p(0.5, 1.0, 1.0);
    CHECK_THROWS_AS(psi0(0.0, p), DomainError);
}

TEST_CASE("psi0 short-time limit for Delta < 1/2") {
    for (double d : {0.1, 0.25, 0.4, 0.45}) {
        const CftParams p(d, 2.0, 0.3);
        const double expect = c1_tilde(d) * std::pow(p.temperature, 2.0 * d - 2.0) /
                              std::pow(p.cutoff, 2.0 * d);
        REQUIRE_THAT(psi0(0.0, p), WithinRel(expect, 1e-12));
        // the correction decays as (tT)^{1-2 Delta}; probe deep enough for
        // the slowest case Delta = 0.45, where it falls off only as a^{0.1}
        REQUIRE_THAT(psi0(1e-70, p), WithinRel(expect, 1e-6));
    }
}

TEST_CASE("psi0 short-time residual scales as (tT)^{3-2 Delta}") {
    const double d = 0.4;
    const CftParams p(d, 1.0, 1.0);
    // residual = psi0 - short_time ~ a^{3-2d}; fit the slope over two decades
    double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_xy = 0.0;
    int n = 0;
    for (double a = 1e-4; a <= 1.01e-2; a *= std::sqrt(10.0)) {
        const double t = a / (pi * p.temperature);
        const double r = std::abs(psi0(t, p) - psi0_short_time(t, p));
        const double x = std::log(a), y = std::log(r);
        sum_x += x; sum_y += y; sum_xx += x * x; sum_xy += x * y;
        ++n;
    }
    const double slope = (n * sum_xy - sum_x * sum_y) / (n * sum_xx - sum_x * sum_x);
    CHECK_THAT(slope, WithinRel(3.0 - 2.0 * d, 0.05));
}

TEST_CASE("short-time constants positive") {
    for (double d : {0.1, 0.25, 0.4}) {
        REQUIRE(c1_tilde(d) > 0.0);
        REQUIRE(c2_tilde(d) > 0.0);
    }
}

TEST_CASE("psi0 marginal short-time form: log plus bounded constant") {
    const CftParams p(0.5, 1.0, 1.0);
    // psi0 - (-2 ln a)/(Lambda T) -> 2 ln 2/(Lambda T) as a -> 0
    for (double a : {1e-3, 1e-4, 1e-5}) {
        const double t = a / (pi * p.temperature);
        const double diff = psi0(t, p) - psi0_short_time(t, p);
        REQUIRE_THAT(diff, WithinRel(2.0 * std::log(2.0) / (p.cutoff * p.temperature), 1e-5));
    }
}

TEST_CASE("psi0 reality and monotonicity") {
    for (double d : {0.1, 0.2, 0.3, 0.4, 0.45}) {
        const CftParams p(d, 1.0, 0.7);
        double prev = psi0(0.0, p);
        for (double a = 1e-4; a <= 20.0; a *= 2.0) {
            const double v = psi0(a / (pi * p.temperature), p);  // throws if Im residue large
            REQUIRE(v < prev);
            REQUIRE(v > 0.0);
            prev = v;
        }
    }
}

TEST_CASE("psi0 continuity across the marginal-case switch") {
    const double a = 0.1;
    const CftParams pm(0.5, 1.0, 1.0);
    const CftParams pn(0.5 - 1e-4, 1.0, 1.0);
    const double t = a / pi;
    CHECK_THAT(psi0(t, pn), WithinRel(psi0(t, pm), 1e-2));
}

TEST_CASE("kz_wdiss closed-form points") {
    const double A = 0.1;
    const CftParams p(0.5, 1.0, 1.0);
    const double tau = std::exp(-1.0) / (pi * p.temperature);  // pi tau T = 1/e
    CHECK_THAT(kz_wdiss(tau, p, A), WithinRel(A * A / p.cutoff, 1e-12));
    // c2 denominator at Delta = 2/5: (2-2d)(3-2d) = 1.2*2.2 = 2.64
    const double d = 0.4;
    CHECK_THAT(c2_tilde(d) / ((2.0 - 2.0 * d) * (3.0 - 2.0 * d)),
               WithinRel(c2_tilde(d) / 2.64, 1e-12));
}

TEST_CASE("kz_kappa3 vanishes at tau = tau0 (marginal) and matches time-domain form") {
    const CftParams pm(0.5, 1.0, 1e-3);
    CHECK_THAT(kz_kappa3(pm.tau0, pm, 0.1), WithinAbs(0.0, 1e-18));

    // Delta = 2/5 at pi tau T = 1e-3: prediction vs T A^2 tau^{-2} (psi0(0) - psi0(tau))
    const CftParams p(0.4, 1.0, 1e-2);
    const double A = 0.1;
    const double tau = 1e-3 / (pi * p.temperature);
    const double td = p.temperature * A * A / (tau * tau) * (psi0(0.0, p) - psi0(tau, p));
    CHECK_THAT(kz_kappa3(tau, p, A), WithinRel(td, 0.02));

    // log-log slope in tau equals -1-2 Delta exactly for the formula
    const double k1 = kz_kappa3(1e-4 / (pi * p.temperature), p, A);
    const double k2 = kz_kappa3(1e-2 / (pi * p.temperature), p, A);
    const double slope = std::log(k1 / k2) / std::log(1e-4 / 1e-2);
    CHECK_THAT(slope, WithinRel(-1.8, 1e-10));
}

TEST_CASE("dkappa3_dT_c2ck limits and peak scaling") {
    const double A = 1.0, L = 1.0;
    // tau T -> 0: value -> -A^2 (T/Lambda) pi^2/3
    const double T = 1.0, tau = 1e-4;
    CHECK_THAT(dkappa3_dT_c2ck(tau, T, L, A), WithinRel(-A * A * (T / L) * pi * pi / 3.0, 1e-6));
    // large tau T = 20: |value| <= 2 A^2 (T/Lambda)/(tau T)^2 (1 + tiny)
    const double v20 = dkappa3_dT_c2ck(20.0, 1.0, L, A);
    CHECK(std::abs(v20) <= 2.0 * A * A / (20.0 * 20.0) * (1.0 + 1e-6));

    // peak temperature T_p of |d kappa^3/dT| scales as 1/tau
    auto peak_T = [&](double tauv) {
        return golden_max([&](double lt) { return std::abs(dkappa3_dT_c2ck(tauv, std::exp(lt), L, A)); },
                          std::log(1e-3 / tauv), std::log(1e3 / tauv), 1e-10);
    };
    const double p1 = peak_T(1e2), p2 = peak_T(1e6);
    const double slope = (p1 - p2) / std::log(1e6 / 1e2);
    CHECK_THAT(slope, WithinRel(1.0, 0.01));  // T_p ~ 1/tau
}

TEST_CASE("adiabatic exponent records") {
    const auto e2 = adiabatic_scaling_exponents(CftParams(0.5, 1.0, 1.0));
    CHECK(e2.temperature == std::array<double, 3>{-1.0, 0.0, 0.0});
    CHECK(e2.tau == std::array<double, 3>{-1.0, -1.0, -2.0});
    const auto e3 = adiabatic_scaling_exponents(CftParams(0.4, 1.0, 1.0));
    CHECK_THAT(e3.temperature[0], WithinRel(-1.2, 1e-14));
    CHECK_THAT(e3.temperature[1], WithinRel(-0.2, 1e-14));
    CHECK_THAT(e3.temperature[2], WithinRel(-0.2, 1e-14));
}
