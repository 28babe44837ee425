#ifndef CRITWORK_SPECFUN_HPP
#define CRITWORK_SPECFUN_HPP

// Self-contained special-function kernels: complex digamma, real polygamma,
// the incomplete beta function on the negative real axis, and the small
// regularized kernels (sinc, coth, csch, arccoth(cosh), Fermi function)
// that the susceptibility and cumulant formulas are built from.

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

namespace critwork {

using cxdbl = std::complex<double>;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

struct PoleError : std::domain_error {
    using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace specfun {

inline constexpr double pi = 3.14159265358979323846264338327950288;
inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

namespace detail {

// cot(pi z) without overflow for large |Im z|; cot(pi z) -> -i (+i) as
// Im z -> +inf (-inf).
inline cxdbl cot_pi(cxdbl z) {
    const double im = z.imag();
    if (im > 8.0) {
        const cxdbl q = std::exp(cxdbl(0.0, 2.0 * pi) * z);  // |q| << 1
        return cxdbl(0.0, 1.0) * (q + 1.0) / (q - 1.0);
    }
    if (im < -8.0) {
        const cxdbl q = std::exp(cxdbl(0.0, -2.0 * pi) * z);
        return cxdbl(0.0, -1.0) * (q + 1.0) / (q - 1.0);
    }
    return std::cos(pi * z) / std::sin(pi * z);
}

// Asymptotic (Stirling) series for psi(z), valid |z| >= 10, Re z > 0.
inline cxdbl digamma_asymptotic(cxdbl z) {
    // psi(z) ~ ln z - 1/(2z) - sum_k B_{2k}/(2k z^{2k})
    static constexpr double c[] = {
        1.0 / 12.0,   -1.0 / 120.0,    1.0 / 252.0,  -1.0 / 240.0,
        1.0 / 132.0,  -691.0 / 32760.0, 1.0 / 12.0,
    };
    const cxdbl w = 1.0 / (z * z);
    cxdbl s = 0.0, wk = w;
    for (double ck : c) {
        s += ck * wk;
        wk *= w;
    }
    return std::log(z) - 0.5 / z - s;
}

}  // namespace detail

// Complex digamma via reflection (Re z < 1/2), upward recurrence to
// |z| >= 10, then the asymptotic series. Non-positive integers are poles.
inline cxdbl digamma(cxdbl z) {
    if (z.imag() == 0.0 && z.real() <= 0.0 && z.real() == std::floor(z.real()))
        throw PoleError("digamma: pole at non-positive integer " + std::to_string(z.real()));
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("digamma: non-finite argument");

    cxdbl shift = 0.0;
    if (z.real() < 0.5) {
        // psi(z) = psi(1-z) - pi cot(pi z)
        shift = -pi * detail::cot_pi(z);
        z = 1.0 - z;
    }
    while (std::abs(z) < 10.0) {
        shift -= 1.0 / z;
        z += 1.0;
    }
    return detail::digamma_asymptotic(z) + shift;
}

inline double digamma(double x) { return digamma(cxdbl(x, 0.0)).real(); }

// Trigamma psi'(x) for real x > 0.
inline double trigamma(double x) {
    if (!(x > 0.0)) throw DomainError("trigamma: requires x > 0");
    double shift = 0.0;
    while (x < 10.0) {
        shift += 1.0 / (x * x);
        x += 1.0;
    }
    // psi'(x) ~ 1/x + 1/(2x^2) + sum_k B_{2k} / x^{2k+1}
    static constexpr double c[] = {1.0 / 6.0,  -1.0 / 30.0, 1.0 / 42.0,
                                   -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0};
    const double w = 1.0 / (x * x);
    double s = 0.0, wk = w / x;
    for (double ck : c) {
        s += ck * wk;
        wk *= w;
    }
    return 1.0 / x + 0.5 * w + s + shift;
}

// Tetragamma psi''(x) for real x > 0.
inline double tetragamma(double x) {
    if (!(x > 0.0)) throw DomainError("tetragamma: requires x > 0");
    double shift = 0.0;
    while (x < 10.0) {
        shift -= 2.0 / (x * x * x);
        x += 1.0;
    }
    // derivative of the trigamma asymptotic series:
    // -1/x^2 - 1/x^3 - 1/(2x^4) + 1/(6x^6) - 1/(6x^8) + 3/(10 x^10)
    const double w = 1.0 / (x * x);
    double s = -w - w / x - 0.5 * w * w;
    s += (1.0 / 6.0) * w * w * w;
    s -= (1.0 / 6.0) * w * w * w * w;
    s += 0.3 * w * w * w * w * w;
    return s + shift;
}

namespace detail {

// Gauss hypergeometric series sum_k (a)_k (b)_k / ((c)_k k!) x^k, |x| < 1.
// Relative truncation 1e-16 with a hard cap of 1e5 terms.
inline cxdbl hyp2f1_series(double a, double b, double c, cxdbl x) {
    cxdbl term = 1.0, sum = 1.0;
    for (int k = 0; k < 100000; ++k) {
        term *= (a + k) * (b + k) / ((c + k) * (k + 1.0)) * x;
        sum += term;
        if (std::abs(term) <= 1e-16 * std::abs(sum)) return sum;
    }
    throw ConvergenceError("hyp2f1_series: 1e5-term cap reached, |x| = " + std::to_string(std::abs(x)));
}

inline cxdbl hyp2f1_series(double a, double b, double c, double x) {
    return hyp2f1_series(a, b, c, cxdbl(x, 0.0));
}

}  // namespace detail

// Incomplete beta function B(z; a, b) = (z^a/a) 2F1(a, 1-b; a+1; z) on the
// branch z^a = |z|^a e^{i pi a} for z < 0 (principal branch above the cut).
// Only the z <= 0 axis is supported. Three evaluation regions:
//   |z| <= 0.5          direct series,
//   0.5 < |z| <= 2      Pfaff map w = z/(z-1) in (1/3, 2/3],
//   |z| > 2             1/z continuation (two-term formula); requires a+b
//                       away from integers, with the (1/2, 1/2) arcsine
//                       closed form special-cased.
inline cxdbl incomplete_beta(double z, double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("incomplete_beta: requires a > 0 and b > 0");
    if (z > 0.0) throw DomainError("incomplete_beta: only z <= 0 supported");
    if (z == 0.0) return 0.0;

    const double az = -z;  // |z|
    const cxdbl z_pow_a = std::pow(az, a) * std::exp(cxdbl(0.0, pi * a));

    if (a == 0.5 && b == 0.5) {
        // B(z; 1/2, 1/2) = 2 asin(sqrt(z)); stable for all |z|
        return 2.0 * std::asin(std::sqrt(cxdbl(z, 0.0)));
    }
    if (az <= 0.5) {
        return z_pow_a / a * detail::hyp2f1_series(a, 1.0 - b, a + 1.0, z);
    }
    const double apb = a + b;
    const bool apb_integer = std::abs(apb - std::round(apb)) < 1e-8;
    if (az <= 2.0 || apb_integer) {
        // B = (z^a/a) (1-z)^{b-1} 2F1(1, 1-b; a+1; z/(z-1))
        const double w = z / (z - 1.0);
        return z_pow_a / a * std::pow(1.0 - z, b - 1.0) * detail::hyp2f1_series(1.0, 1.0 - b, a + 1.0, w);
    }
    // 1/z continuation:
    // B = e^{i pi a} Gamma(a)Gamma(1-a-b)/Gamma(1-b)
    //     + z^a (-z)^{b-1} / (a+b-1) * 2F1(1-b, 1-b-a; 2-a-b; 1/z)
    const cxdbl head = std::exp(cxdbl(0.0, pi * a)) * std::tgamma(a) * std::tgamma(1.0 - a - b) / std::tgamma(1.0 - b);
    const cxdbl tail = z_pow_a * std::pow(az, b - 1.0) / (apb - 1.0) *
                       detail::hyp2f1_series(1.0 - b, 1.0 - b - a, 2.0 - a - b, 1.0 / z);
    return head + tail;
}

// ---- elementary regularized kernels ----

inline double sinc(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 6.0 * (1.0 - x2 / 20.0);
    }
    return std::sin(x) / x;
}

inline double sinc_sq(double x) {
    const double s = sinc(x);
    return s * s;
}

// coth(x) with the small-x series 1/x + x/3 - x^3/45 so that products like
// omega * coth(omega/2T) stay smooth through omega = 0.
inline double coth_reg(double x) {
    if (std::abs(x) < 1e-4) return 1.0 / x + x / 3.0 - x * x * x / 45.0;
    return 1.0 / std::tanh(x);
}

// x*coth(x), smooth and even, -> 1 at x = 0.
inline double x_coth_x(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 + x2 / 3.0 - x2 * x2 / 45.0;
    }
    return x / std::tanh(x);
}

inline double csch(double x) { return 1.0 / std::sinh(x); }

// arccoth(cosh(y)) = -ln tanh(y/2), computed in log form: stable for
// y -> 0 (log divergence) and y >> 1 (-> 2 e^{-y} without overflow).
inline double arccoth_cosh(double y) {
    if (!(y > 0.0)) throw DomainError("arccoth_cosh: requires y > 0");
    const double e = std::exp(-y);
    return std::log1p(e) - std::log1p(-e);
}

inline double fermi(double eps, double T) {
    if (!(T > 0.0)) throw DomainError("fermi: requires T > 0");
    const double x = eps / T;
    if (x > 0.0) {
        const double e = std::exp(-x);
        return e / (1.0 + e);
    }
    return 1.0 / (1.0 + std::exp(x));
}

}  // namespace specfun
}  // namespace critwork

#endif
