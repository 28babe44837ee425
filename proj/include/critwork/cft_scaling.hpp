#ifndef CRITWORK_CFT_SCALING_HPP
#define CRITWORK_CFT_SCALING_HPP

// Universal relaxation function Psi0(t) of a boundary quantum critical point
// and the closed-form asymptotics of the work statistics built on it:
// Kibble-Zurek window, adiabatic limit, and the two-channel-Kondo third
// cumulant crossover.

#include <array>
#include <cmath>
#include <complex>

#include "critwork/specfun.hpp"

namespace critwork {
namespace cft {

using specfun::pi;

// Delta = 2/(2+M) for the M-channel Kondo impurity magnetization; M = 1 is
// a Fermi liquid with no critical point.
inline double scaling_dimension(int channels) {
    if (channels <= 1)
        throw DomainError("scaling_dimension: M <= 1 is not critical (Fermi liquid ground state)");
    return 2.0 / (2.0 + channels);
}

struct CftParams {
    double delta = 0.5;        // scaling dimension, in (0, 1/2]
    double cutoff = 1.0;       // Lambda (T_K / Gamma role)
    double temperature = 1.0;  // T
    double tau0 = 0.0;         // UV time cutoff; defaults to 1/Lambda

    CftParams(double delta_, double cutoff_, double temperature_, double tau0_ = 0.0)
        : delta(delta_), cutoff(cutoff_), temperature(temperature_), tau0(tau0_) {
        if (!(delta > 0.0) || delta > 0.5 + 1e-12)
            throw DomainError("CftParams: Delta must be in (0, 1/2]");
        if (!(cutoff > 0.0) || !(temperature > 0.0))
            throw DomainError("CftParams: Lambda, T > 0");
        if (tau0 == 0.0) tau0 = 1.0 / cutoff;
        if (!(tau0 > 0.0)) throw DomainError("CftParams: tau0 > 0");
    }

    bool is_marginal() const { return std::abs(delta - 0.5) < 1e-6; }
};

// short-time expansion constants,
//   Lambda^2 (Lambda/T)^{2D-2} Psi0 = c1t - c2t (pi t T)^{1-2D} + O((tT)^{3-2D})
inline double c1_tilde(double delta) {
    return std::sin(pi * delta) * std::pow(pi, 2.0 * delta - 1.5) *
           std::tgamma(0.5 - delta) * std::tgamma(delta);
}
inline double c2_tilde(double delta) {
    return 2.0 * std::sin(pi * delta) * std::pow(pi, 2.0 * delta - 1.0) / (1.0 - 2.0 * delta);
}

// Psi0(t): for Delta < 1/2 the incomplete-beta closed form
//   (pi^{2D-1} T^{2D-2} / Lambda^{2D}) e^{-i pi D} sin(pi D) B(-csch^2(pi tT); D, 1/2),
// real on the principal branch (the imaginary residue is asserted small);
// for Delta = 1/2 the arccoth form 2/(Lambda T) arccoth(cosh(pi tT)).
// The t -> 0 limit is finite for Delta < 1/2 and divergent at 1/2.
inline double psi0(double t, const CftParams& p) {
    if (t < 0.0) throw DomainError("psi0: t >= 0");
    const double T = p.temperature;
    const double a = pi * t * T;
    if (p.is_marginal()) {
        if (t == 0.0) throw DomainError("psi0: divergent at t = 0 for Delta = 1/2");
        return 2.0 / (p.cutoff * T) * specfun::arccoth_cosh(a);
    }
    const double d = p.delta;
    const double unit = std::pow(T, 2.0 * d - 2.0) / std::pow(p.cutoff, 2.0 * d);
    if (t == 0.0) return c1_tilde(d) * unit;
    if (a < 1e-150) {
        // csch^2 would overflow; the dropped terms are O(a^{3-2D})
        return (c1_tilde(d) - c2_tilde(d) * std::pow(a, 1.0 - 2.0 * d)) * unit;
    }
    const double s = std::sinh(a);
    const double z = (std::isinf(s)) ? 0.0 : -1.0 / (s * s);
    const cxdbl b = specfun::incomplete_beta(z, d, 0.5);
    const cxdbl val = std::pow(pi, 2.0 * d - 1.0) * unit *
                      std::exp(cxdbl(0.0, -pi * d)) * std::sin(pi * d) * b;
    if (std::abs(val) > 0.0 && std::abs(val.imag()) > 1e-9 * std::abs(val))
        throw ConvergenceError("psi0: branch inconsistency, imaginary residue too large");
    return val.real();
}

// Leading short-time behavior (pi t T << 1): the log for Delta = 1/2, the
// saturating power law otherwise.
inline double psi0_short_time(double t, const CftParams& p) {
    const double T = p.temperature;
    const double a = pi * t * T;
    if (p.is_marginal()) return -2.0 * std::log(a) / (p.cutoff * T);
    const double d = p.delta;
    const double unit = std::pow(T, 2.0 * d - 2.0) / std::pow(p.cutoff, 2.0 * d);
    return (c1_tilde(d) - c2_tilde(d) * std::pow(a, 1.0 - 2.0 * d)) * unit;
}

// <W_diss> in the KZ window 1/Lambda << tau << 1/T:
//   Lambda^{-1} A^2 (T/Lambda)^{2D-1} * { -ln(pi tau T)          : D = 1/2
//                                        { c1 - c2 (pi tau T)^{1-2D} : D < 1/2
// with c1 = c1t/2 and c2 = c2t / ((2-2D)(3-2D)).
inline double kz_wdiss(double tau, const CftParams& p, double A) {
    const double T = p.temperature;
    const double x = pi * tau * T;
    const double pref = A * A / p.cutoff * std::pow(T / p.cutoff, 2.0 * p.delta - 1.0);
    if (p.is_marginal()) return pref * (-std::log(x));
    const double d = p.delta;
    const double c1 = 0.5 * c1_tilde(d);
    const double c2 = c2_tilde(d) / ((2.0 - 2.0 * d) * (3.0 - 2.0 * d));
    return pref * (c1 - c2 * std::pow(x, 1.0 - 2.0 * d));
}

// kappa^3 in the KZ window:
//   Lambda A^2 (T/Lambda)^{2D+1} * { 2 (tau T)^{-2} ln(tau/tau0)   : D = 1/2
//                                   { c2* (pi tau T)^{-1-2D}        : D < 1/2
// with c2* = c2t pi^2.
inline double kz_kappa3(double tau, const CftParams& p, double A) {
    const double T = p.temperature;
    const double pref = p.cutoff * A * A * std::pow(T / p.cutoff, 2.0 * p.delta + 1.0);
    if (p.is_marginal())
        return pref * 2.0 / (tau * T * tau * T) * std::log(tau / p.tau0);
    return pref * c2_tilde(p.delta) * pi * pi * std::pow(pi * tau * T, -1.0 - 2.0 * p.delta);
}

// d kappa^3 / dT for the two-channel Kondo point (Delta = 1/2), valid for
// tau >> 1/Lambda:  A^2 (T/Lambda) (2/(tau T)^2) (pi tau T / sinh(pi tau T) - 1)
inline double dkappa3_dT_c2ck(double tau, double T, double cutoff, double A) {
    if (!(tau > 0.0) || !(T > 0.0) || !(cutoff > 0.0))
        throw DomainError("dkappa3_dT_c2ck: tau, T, Lambda > 0");
    const double x = pi * tau * T;
    double bracket;
    if (x > 30.0)
        bracket = 2.0 * x * std::exp(-x) - 1.0;  // sinh dominance
    else
        bracket = x / std::sinh(x) - 1.0;
    return A * A * (T / cutoff) * 2.0 / (tau * T * tau * T) * bracket;
}

// adiabatic limit exponents: kappa^n ~ T^{t_n} tau^{-s_n}
struct AdiabaticExponents {
    std::array<double, 3> temperature;
    std::array<double, 3> tau;
};

inline AdiabaticExponents adiabatic_scaling_exponents(const CftParams& p) {
    const double d = p.delta;
    return {{2.0 * d - 2.0, 2.0 * d - 1.0, 2.0 * d - 1.0}, {-1.0, -1.0, -2.0}};
}

}  // namespace cft
}  // namespace critwork

#endif
