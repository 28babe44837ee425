#ifndef CRITWORK_QUADRATURE_HPP
#define CRITWORK_QUADRATURE_HPP

// Adaptive quadrature utilities used by the cumulant engine: a 15-point
// Gauss-Kronrod panel rule with globally adaptive refinement, a 1/t map for
// semi-infinite tails, and an alternating half-period summer (with iterated
// averaging) for oscillatory cosine tails.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <queue>
#include <vector>

#include "critwork/specfun.hpp"

namespace critwork {
namespace quad {

struct Result {
    double value = 0.0;
    double error = 0.0;  // absolute error estimate
    long evaluations = 0;
    bool converged = true;

    Result& operator+=(const Result& o) {
        value += o.value;
        error += o.error;
        evaluations += o.evaluations;
        converged = converged && o.converged;
        return *this;
    }
};

namespace detail {

// QUADPACK 15-point Kronrod nodes/weights (7-point Gauss embedded).
inline constexpr double xgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double wgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double wg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace detail

template <class F>
Result gk15(F&& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double result_gauss = detail::wg[3] * fc;
    double result_kronrod = detail::wgk[7] * fc;
    double result_abs = std::abs(result_kronrod);
    for (int j = 0; j < 7; ++j) {
        const double x = h * detail::xgk[j];
        const double f1 = f(c - x);
        const double f2 = f(c + x);
        result_kronrod += detail::wgk[j] * (f1 + f2);
        result_abs += detail::wgk[j] * (std::abs(f1) + std::abs(f2));
        if (j % 2 == 1) result_gauss += detail::wg[j / 2] * (f1 + f2);
    }
    Result r;
    r.value = result_kronrod * h;
    r.evaluations = 15;
    // QUADPACK-style error heuristic
    const double diff = std::abs((result_kronrod - result_gauss) * h);
    const double scale = result_abs * std::abs(h);
    r.error = (scale > 0.0 && diff > 0.0)
                  ? scale * std::min(1.0, std::pow(200.0 * diff / scale, 1.5))
                  : diff;
    r.error = std::max(r.error, std::abs(r.value) * 5e-16);
    return r;
}

// Globally adaptive integration on [a, b]: refine the worst panel until the
// summed error estimate meets max(abs_tol, rel_tol*|I|) or the panel budget
// is exhausted (converged flag cleared, never throws).
template <class F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol,
                 int max_panels = 4000) {
    struct Panel {
        double a, b, value, error;
        bool operator<(const Panel& o) const { return error < o.error; }
    };
    Result whole;
    if (a == b) return whole;
    std::priority_queue<Panel> heap;
    Result first = gk15(f, a, b);
    whole.evaluations = first.evaluations;
    heap.push({a, b, first.value, first.error});
    double total_value = first.value;
    double total_error = first.error;
    int panels = 1;
    while (total_error > std::max(abs_tol, rel_tol * std::abs(total_value)) &&
           panels < max_panels) {
        Panel worst = heap.top();
        if (worst.b - worst.a <= std::abs(worst.a) * 1e-15 + 1e-300) break;  // cannot refine further
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        Result left = gk15(f, worst.a, mid);
        Result right = gk15(f, mid, worst.b);
        whole.evaluations += left.evaluations + right.evaluations;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        heap.push({worst.a, mid, left.value, left.error});
        heap.push({mid, worst.b, right.value, right.error});
        ++panels;
    }
    whole.value = total_value;
    whole.error = total_error;
    whole.converged =
        total_error <= std::max(abs_tol, rel_tol * std::abs(total_value)) * 1.0000001 ||
        total_error <= std::abs(total_value) * 1e-13;
    return whole;
}

// Integral over [a, inf) via the map omega = a/t, t in (0, 1]. Requires
// a > 0 and an integrand decaying faster than 1/omega.
template <class F>
Result integrate_tail(F&& f, double a, double abs_tol, double rel_tol,
                      int max_panels = 4000) {
    return integrate([&f, a](double t) { return f(a / t) * a / (t * t); },
                     0.0, 1.0, abs_tol, rel_tol, max_panels);
}

// Integral over [0, inf) split at a caller-supplied interior scale.
template <class F>
Result integrate_0_inf(F&& f, double scale, double abs_tol, double rel_tol,
                       int max_panels = 4000) {
    Result head = integrate(f, 0.0, scale, 0.5 * abs_tol, 0.5 * rel_tol, max_panels);
    Result tail = integrate_tail(f, scale, 0.5 * abs_tol, 0.5 * rel_tol, max_panels);
    head += tail;
    return head;
}

namespace detail {

// Iterated averaging of the trailing partial sums of a (near-)alternating
// series: one extrapolated estimate plus a crude error from the last level.
inline std::pair<double, double> average_partial_sums(const std::vector<double>& s) {
    std::vector<double> row(s);
    double prev = row.back();
    while (row.size() > 1) {
        for (std::size_t i = 0; i + 1 < row.size(); ++i) row[i] = 0.5 * (row[i] + row[i + 1]);
        row.pop_back();
        prev = row.back();
    }
    // error: distance from the next-to-last averaging level
    std::vector<double> row2(s);
    double second = prev;
    if (s.size() > 2) {
        while (row2.size() > 2) {
            for (std::size_t i = 0; i + 1 < row2.size(); ++i) row2[i] = 0.5 * (row2[i] + row2[i + 1]);
            row2.pop_back();
        }
        second = 0.5 * (row2[0] + row2[1]);
    }
    return {prev, std::abs(prev - second)};
}

}  // namespace detail

// Oscillatory tail integral  int_{omega0}^inf cos(omega * tau) phi(omega) domega
// for smooth, eventually monotone phi >= 0. Panels run between consecutive
// zeros of the cosine, giving sign-alternating terms that are accelerated by
// iterated averaging of the partial sums.
template <class F>
Result cosine_tail(F&& phi, double omega0, double tau, double abs_tol,
                   int max_terms = 20000) {
    Result out;
    if (tau <= 0.0) {
        out.converged = false;
        return out;
    }
    const double half = specfun::pi / tau;
    // first cosine zero at or after omega0
    const double k0 = std::ceil((omega0 * tau / specfun::pi) - 0.5);
    double edge = (k0 + 0.5) * specfun::pi / tau;
    if (edge <= omega0) edge += half;

    auto g = [&phi, tau](double w) { return std::cos(w * tau) * phi(w); };

    // partial panel up to the first zero
    Result headr = integrate(g, omega0, edge, 0.1 * abs_tol, 1e-12, 200);
    out += headr;

    std::vector<double> partial;
    partial.reserve(64);
    double sum = 0.0;
    double est = 0.0, est_err = std::numeric_limits<double>::infinity();
    int k = 0;
    for (; k < max_terms; ++k) {
        Result term = integrate(g, edge, edge + half, 0.05 * abs_tol, 1e-12, 64);
        out.evaluations += term.evaluations;
        edge += half;
        sum += term.value;
        partial.push_back(sum);
        if (partial.size() > 24) partial.erase(partial.begin());
        if (partial.size() >= 6) {
            auto [e, de] = detail::average_partial_sums(partial);
            est = e;
            est_err = de + std::abs(term.value) * 1e-3;
            if (est_err < abs_tol && std::abs(term.value) < 10.0 * abs_tol) break;
        }
        // plain convergence for absolutely summable tails
        if (partial.size() >= 6 && std::abs(term.value) < 0.02 * abs_tol) {
            est = sum;
            est_err = std::abs(term.value);
            break;
        }
    }
    out.value += est;
    out.error += est_err;
    out.converged = out.converged && (k < max_terms);
    return out;
}

}  // namespace quad
}  // namespace critwork

#endif
