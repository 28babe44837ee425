#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "critwork/chi_models.hpp"
#include "critwork/ed_oracle.hpp"

using namespace critwork;
using namespace critwork::ed;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// closed forms of the SM two-level example
double two_level_gap(double w, double x) { return w * std::sqrt(4.0 + x * x); }

double two_level_cT(double w, double x, double beta) {
    const double g = two_level_gap(w, x);
    return beta * x * x / (2.0 * (4.0 + x * x) * (1.0 + std::cosh(beta * g)));
}

double two_level_chi_t(double w, double x, double beta, double t) {
    const double g = two_level_gap(w, x);
    return 2.0 * std::tanh(0.5 * beta * g) / (4.0 + x * x) * std::sin(g * t);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("builders: dimensions, conservation, validation") {
    const EdSystem sys = build_discretized_rlm(2, 0.1, 1.0, 2.0);
    CHECK(sys.dim == 8);
    CHECK_THROWS_AS(build_discretized_rlm(20, 0.1, 1.0, 2.0), DomainError);
    // non-Hermitian input rejected
    MatrixXd bad(2, 2);
    bad << 0.0, 1.0, 0.5, 0.0;
    CHECK_THROWS_AS(make_system(bad, MatrixXd::Identity(2, 2), MatrixXd::Zero(2, 2), 1.0),
                    DomainError);
}

TEST_CASE("two-level eigenvalues and c(T) closed forms") {
    const double w = 1.0, x = 1.0, beta = 2.0;
    const EdSystem sys = build_two_level(w, x, beta);
    const double g = two_level_gap(w, x);
    CHECK_THAT(sys.e0(0), WithinRel(0.5 * w * (x - std::sqrt(4.0 + x * x)), 1e-13));
    CHECK_THAT(sys.e0(1), WithinRel(0.5 * w * (x + std::sqrt(4.0 + x * x)), 1e-13));
    (void)g;

    // Lehmann c(T) vs the SM closed form
    const auto [psi, c_T] = relaxation_lehmann(sys, {0.0});
    (void)psi;
    CHECK_THAT(c_T, WithinAbs(two_level_cT(w, x, beta), 1e-12));
    // x = 0: c(T) vanishes
    const auto [psi0v, c0] = relaxation_lehmann(build_two_level(w, 0.0, beta), {0.0});
    (void)psi0v;
    CHECK_THAT(c0, WithinAbs(0.0, 1e-14));
}

TEST_CASE("two-level retarded correlator matches the closed form") {
    const double w = 1.0, x = 1.0, beta = 2.0;
    const EdSystem sys = build_two_level(w, x, beta);
    for (double t : {0.2, 0.7, 1.3, 2.9, 4.1}) {
        // chi(t) = i theta(t) Tr rho [N(t), N] = -f(t)
        const double chi_t = -commutator_expectation(sys, t);
        REQUIRE_THAT(chi_t, WithinAbs(two_level_chi_t(w, x, beta, t), 1e-13));
    }
}

TEST_CASE("discretized RLM occupation converges to the continuum closed form") {
    const double band = 1.0, beta = 2.0, gamma = 0.08, eps_d = 0.25;
    const double n_exact = rlm_occupation(eps_d, gamma, 1.0 / beta);
    double prev_err = 1.0;
    for (int sites : {6, 8, 10}) {
        const EdSystem sys = build_discretized_rlm(sites, gamma, band, beta, eps_d);
        const double n_ed = sys.thermal_average(sys.n_s);
        const double err = std::abs(n_ed - n_exact) / n_exact;
        REQUIRE(err < prev_err * 1.02);  // non-increasing error (2% slack)
        prev_err = err;
    }
    REQUIRE(prev_err < 0.03);
}

TEST_CASE("sudden-limit WDF: support and Zassenhaus moments") {
    const double beta = 2.0, A = 0.5;
    const EdSystem sys = build_discretized_rlm(4, 0.1, 1.0, beta, 0.2);
    const WorkDistribution wdf = wdf_two_time(sys, {A, 0.0});
    CHECK_THAT(wdf.total_probability(), WithinAbs(1.0, 1e-12));

    const ZassenhausMoments z = zassenhaus_moments(sys, A);
    // dQ1 = dQ2 = 0
    CHECK_THAT(wdf.moment(1), WithinAbs(z.m1, 1e-10));
    CHECK_THAT(wdf.moment(2), WithinAbs(z.m2, 1e-10));
    // dQ3 = <W^3> - A^3 <N^3> = -(A^2/2)<H_SE>
    const double dq3_wdf = wdf.moment(3) - z.m3;
    CHECK_THAT(dq3_wdf, WithinAbs(z.dq3, 1e-9));
    CHECK_THAT(z.dq3, WithinAbs(-0.5 * A * A * sys.thermal_average(sys.h_se), 1e-9));
    // single-charge-tunneling identity [N_S,[H_0,N_S]] = -H_SE
    CHECK(z.commutator_residual < 1e-12);
}

TEST_CASE("two-level Zassenhaus: H_SE = 0 but dQ3 nonzero") {
    const double beta = 2.0, A = 0.4;
    const EdSystem sys = build_two_level(1.0, 1.0, beta);
    const WorkDistribution wdf = wdf_two_time(sys, {A, 0.0});
    const ZassenhausMoments z = zassenhaus_moments(sys, A);
    CHECK(z.commutator_residual > 0.1);  // the identity needs q = 1 tunneling
    CHECK_THAT(wdf.moment(3) - z.m3, WithinAbs(z.dq3, 1e-12));
    CHECK(std::abs(z.dq3) > 1e-3);
}

TEST_CASE("A = 0 gives a point distribution at W = 0") {
    const EdSystem sys = build_discretized_rlm(3, 0.1, 1.0, 2.0);
    for (double tau : {0.0, 1.5}) {
        const WorkDistribution wdf = wdf_two_time(sys, {0.0, tau});
        REQUIRE(wdf.atoms.size() == 1);
        REQUIRE_THAT(wdf.atoms[0].w, WithinAbs(0.0, 1e-12));
        REQUIRE_THAT(wdf.atoms[0].p, WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("adiabatic two-level driving concentrates on the diagonal") {
    const double beta = 2.0, A = 0.2;
    const EdSystem sys = build_two_level(1.0, 1.0, beta);
    const TwoTimeSolution sol = wdf_two_time_full(sys, {A, 200.0}, 1024, 1e-9);
    for (int n = 0; n < 2; ++n) REQUIRE(std::norm(sol.amplitude(n, n)) > 0.999);
}

TEST_CASE("fluctuation theorem and second law across protocols") {
    std::vector<EdSystem> systems;
    systems.push_back(build_two_level(1.0, 1.0, 2.0));
    systems.push_back(build_discretized_rlm(3, 0.1, 1.0, 2.0, 0.2));
    systems.push_back(build_discretized_rlm(4, 0.15, 1.0, 1.0));
    for (const auto& sys : systems) {
        for (double tau : {0.0, 0.7, 3.0}) {
            const WorkDistribution wdf = wdf_two_time(sys, {0.5, tau});
            REQUIRE_THAT(wdf.jarzynski_residual(sys.beta), WithinAbs(1.0, 1e-10));
            REQUIRE(wdf.moment(1) >= wdf.delta_f - 1e-12);
        }
    }
}

TEST_CASE("generating function: normalization, Jarzynski point, moments") {
    const double beta = 2.0, A = 0.5, tau = 0.8;
    const EdSystem sys = build_discretized_rlm(3, 0.1, 1.0, beta, 0.1);
    // exact up to unitarity drift accumulated over the long step product
    CHECK_THAT(std::abs(generating_function(sys, {A, tau}, 0.0)), WithinAbs(1.0, 1e-10));

    const TwoTimeSolution sol = wdf_two_time_full(sys, {A, tau});
    const WorkDistribution& wdf = sol.wdf;
    const cxdbl h_beta = generating_function(sys, sol, beta);
    CHECK_THAT(h_beta.real() * std::exp(beta * wdf.delta_f), WithinAbs(1.0, 1e-10));
    CHECK_THAT(h_beta.imag(), WithinAbs(0.0, 1e-12));

    // Richardson-extrapolated finite differences of h(u) at u = 0
    auto h = [&](double u) { return generating_function(sys, sol, u).real(); };
    const double du = 0.03;
    auto d1 = [&](double s) { return (h(s) - h(-s)) / (2.0 * s); };
    auto d2 = [&](double s) { return (h(s) - 2.0 * h(0.0) + h(-s)) / (s * s); };
    auto d3 = [&](double s) { return (h(2.0 * s) - 2.0 * h(s) + 2.0 * h(-s) - h(-2.0 * s)) / (2.0 * s * s * s); };
    const double m1 = -(4.0 * d1(du / 2) - d1(du)) / 3.0;
    const double m2 = (4.0 * d2(du / 2) - d2(du)) / 3.0;
    const double m3 = -(4.0 * d3(du / 2) - d3(du)) / 3.0;
    CHECK_THAT(m1, WithinAbs(wdf.moment(1), 1e-7));
    CHECK_THAT(m2, WithinAbs(wdf.moment(2), 1e-7));
    CHECK_THAT(m3, WithinAbs(wdf.moment(3), 1e-5));
}

TEST_CASE("relaxation function derivative matches the commutator") {
    const EdSystem sys = build_discretized_rlm(3, 0.1, 1.0, 2.0, 0.1);
    const double t = 0.3, h = 1e-4;
    const auto [psi, c_T] = relaxation_lehmann(sys, {t - h, t + h});
    (void)c_T;
    const double dpsi = (psi[1] - psi[0]) / (2.0 * h);
    CHECK_THAT(dpsi, WithinAbs(sys.beta * commutator_expectation(sys, t), 1e-8));
}

TEST_CASE("Eq. 5 pole-weight identity") {
    CHECK(verify_eq5(build_discretized_rlm(2, 0.1, 1.0, 2.0, 0.1)) < 1e-10);
    CHECK(verify_eq5(build_discretized_rlm(3, 0.15, 1.0, 1.5)) < 1e-10);
    // two-level with x = 1: nonzero omega = 0 weight equal to c(T)/T. The
    // oscillating part has a single frequency, so averaging Psi0 over a
    // half-period pair isolates the constant exactly.
    const EdSystem tl = build_two_level(1.0, 1.0, 2.0);
    CHECK(verify_eq5(tl) < 1e-10);
    const double gap = two_level_gap(1.0, 1.0);
    const auto [psi, c_T] = relaxation_lehmann(tl, {5.0, 5.0 + specfun::pi / gap});
    CHECK_THAT(0.5 * (psi[0] + psi[1]), WithinAbs(c_T / tl.temperature(), 1e-12));
    // x = 0: weight vanishes
    const auto [psi0v, c0] = relaxation_lehmann(build_two_level(1.0, 0.0, 2.0), {0.0});
    (void)psi0v;
    CHECK_THAT(c0, WithinAbs(0.0, 1e-14));
}

TEST_CASE("ED c(T): Lehmann vs susceptibility route") {
    const EdSystem tl = build_two_level(1.0, 1.0, 2.0);
    const auto [psi, c_lehmann] = relaxation_lehmann(tl, {0.0});
    (void)psi;
    CHECK_THAT(check_cT(tl), WithinAbs(c_lehmann, 1e-8));
    CHECK_THAT(check_cT(tl), WithinAbs(two_level_cT(1.0, 1.0, 2.0), 1e-8));
}

TEST_CASE("LR validity: deviation shrinks linearly in A") {
    // eps_d != 0 breaks particle-hole symmetry; at the symmetric point the
    // leading correction is O(A^2) instead
    const EdSystem sys = build_discretized_rlm(3, 0.1, 1.0, 2.0, 0.3);
    const std::vector<double> a_list = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
    const auto rows = lr_vs_exact(sys, 1.0, a_list, 1e-12);
    std::vector<double> la, ld1, ld2, ld3;
    for (const auto& r : rows) {
        la.push_back(std::log(r.amplitude));
        ld1.push_back(std::log(r.rel_dev[0]));
        ld2.push_back(std::log(r.rel_dev[1]));
        ld3.push_back(std::log(r.rel_dev[2]));
    }
    CHECK_THAT(fit_slope(la, ld1), WithinAbs(1.0, 0.2));
    CHECK_THAT(fit_slope(la, ld2), WithinAbs(1.0, 0.2));
    CHECK_THAT(fit_slope(la, ld3), WithinAbs(1.0, 0.2));
    // A = 0: exactly zero work
    const auto zero = lr_vs_exact(sys, 1.0, {0.0});
    CHECK(zero[0].exact[0] == 0.0);
    CHECK(zero[0].lr[0] == 0.0);
}

TEST_CASE("Maxwell relation on a small RLM") {
    const MaxwellCheck mc = maxwell_check(3, 0.1, 1.0, 0.5, 1.0, 1e-4, 1e-4);
    CHECK(mc.residual < 1e-6);
    CHECK(std::abs(mc.dJ_entropy) > 1e-3);  // both sides genuinely nonzero
    // J = 0: both sides vanish
    const MaxwellCheck m0 = maxwell_check(3, 0.1, 1.0, 0.5, 0.0, 1e-4, 1e-4);
    CHECK_THAT(m0.dJ_entropy, WithinAbs(0.0, 1e-9));
    CHECK_THAT(m0.dT_ose, WithinAbs(0.0, 1e-9));
    // residual scales as step^2
    const MaxwellCheck big = maxwell_check(3, 0.1, 1.0, 0.5, 1.0, 2e-2, 2e-2);
    const MaxwellCheck half = maxwell_check(3, 0.1, 1.0, 0.5, 1.0, 1e-2, 1e-2);
    CHECK_THAT(big.residual / half.residual, WithinAbs(4.0, 1.0));
}
