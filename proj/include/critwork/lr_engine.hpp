#ifndef CRITWORK_LR_ENGINE_HPP
#define CRITWORK_LR_ENGINE_HPP

// Linear-response cumulant engine. Converts Im chi(omega) or a relaxation
// function Psi0(t) into work cumulants of a linear ramp lambda(t) = A t/tau:
//
//   kappa^n / A^2 = int domega/2pi omega^{n-2} sinc^2(omega tau/2) Im chi   (n odd)
//                   ... with an extra coth(omega/2T)                        (n even)
//
// plus the sudden/adiabatic closed forms and the c(T) consistency check.
// The oscillatory integral is split at the first sinc zero; beyond it
// sinc^2 = (2/(tau omega)^2)(1 - cos omega tau) separates into a smooth tail
// and a cosine tail summed over half-periods with series acceleration.

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "critwork/cft_scaling.hpp"
#include "critwork/chi_models.hpp"
#include "critwork/quadrature.hpp"

namespace critwork {

struct RampProtocol {
    double amplitude = 0.0;  // A
    double duration = 0.0;   // tau >= 0

    RampProtocol(double A, double tau) : amplitude(A), duration(tau) {
        if (tau < 0.0) throw DomainError("RampProtocol: tau >= 0");
    }
};

enum class CumulantRoute { frequency, time_domain, limit_formula };

inline const char* route_name(CumulantRoute r) {
    switch (r) {
        case CumulantRoute::frequency: return "frequency";
        case CumulantRoute::time_domain: return "time-domain";
        case CumulantRoute::limit_formula: return "limit-formula";
    }
    return "?";
}

struct CumulantResult {
    int order = 1;
    double value = 0.0;
    double quadrature_error = 0.0;
    CumulantRoute route = CumulantRoute::frequency;
};

namespace detail {

// Locate X >= start where the remaining integral of a decaying h is below
// tol_abs, estimating the local power-law decay from h(X) and h(2X).
struct TailStart {
    double x = 0.0;
    double remainder = 0.0;
    bool ok = false;
};

template <class H>
TailStart find_tail_start(H&& h, double start, double tol_abs) {
    double x = start;
    for (int i = 0; i < 60; ++i) {
        const double h1 = std::abs(h(x));
        if (h1 == 0.0) return {x, 0.0, true};
        const double h2 = std::abs(h(2.0 * x));
        const double p = (h2 > 0.0) ? std::log2(h1 / h2) : 50.0;
        if (p > 1.05) {
            const double rem = h1 * x / (p - 1.0);
            if (rem < tol_abs) return {x, rem, true};
        }
        x *= 2.0;
    }
    return {x, std::abs(h(x)) * x, false};
}

}  // namespace detail

// kappa^n/A^2 for a model susceptibility; S(omega) = Im chi/omega enters as
//   (1/pi) int_0^inf w_n(omega) sinc^2(omega tau/2) S(omega) domega,
// w_1 = 1, w_2 = omega coth(omega/2T), w_3 = omega^2.
inline quad::Result cumulant_integral(int n, const std::function<double(double)>& S,
                                      double tau, double T, double omega_scale,
                                      double tol) {
    using specfun::pi;
    auto weight = [n, T](double w) -> double {
        switch (n) {
            case 1: return 1.0;
            case 2: return 2.0 * T * specfun::x_coth_x(0.5 * w / T);
            case 3: return w * w;
            default: throw DomainError("cumulant: order must be 1..3");
        }
    };
    auto h = [&](double w) { return weight(w) * S(w); };

    // absolute floor from a coarse magnitude probe
    const double probe = std::abs(h(0.25 * omega_scale)) * omega_scale +
                         std::abs(h(omega_scale)) * omega_scale;
    const double tol_abs_tail = std::max(probe, 1e-280) * tol * 0.125;

    quad::Result out;
    const double hi0 = 8.0 * omega_scale;

    if (tau == 0.0 || pi / tau >= hi0) {
        // no oscillation before the integrand dies: direct + transformed tail
        auto g = [&](double w) { return (tau == 0.0 ? 1.0 : specfun::sinc_sq(0.5 * w * tau)) * h(w); };
        // probe the monotone envelope, not sinc^2 itself (which has zeros)
        auto env = [&](double w) {
            const double s = tau == 0.0 ? 1.0 : std::min(1.0, 4.0 / (tau * w * tau * w));
            return s * std::abs(h(w));
        };
        auto ts = detail::find_tail_start(env, hi0, tol_abs_tail);
        if (!ts.ok) throw ConvergenceError("cumulant: integrand tail does not decay fast enough");
        out = quad::integrate(g, 0.0, ts.x, tol_abs_tail, tol * 0.25, 20000);
        quad::Result tail = quad::integrate_tail(g, ts.x, tol_abs_tail, tol * 0.25, 20000);
        out += tail;
        out.error += ts.remainder;
    } else {
        const double ws = pi / tau;  // first sinc^2 zero is at 2 pi/tau; split at pi/tau
        quad::Result p1 = quad::integrate([&](double w) { return specfun::sinc_sq(0.5 * w * tau) * h(w); },
                                          0.0, ws, tol_abs_tail, tol * 0.125, 20000);
        // smooth part of the tail: (2/tau^2) int h/omega^2
        auto phi = [&](double w) { return h(w) / (w * w); };
        auto ts = detail::find_tail_start(phi, hi0, tol_abs_tail * tau * tau * 0.5);
        if (!ts.ok) throw ConvergenceError("cumulant: integrand tail does not decay fast enough");
        quad::Result p2 = quad::integrate(phi, ws, ts.x, tol_abs_tail * tau * tau * 0.5, tol * 0.125, 20000);
        quad::Result p2t = quad::integrate_tail(phi, ts.x, tol_abs_tail * tau * tau * 0.5, tol * 0.125, 20000);
        p2 += p2t;
        p2.error += ts.remainder;

        const double scale_est = std::abs(p1.value) + 2.0 / (tau * tau) * std::abs(p2.value);
        const double p3_tol = std::max(0.125 * tol * scale_est, 1e-280) * tau * tau * 0.5;
        quad::Result p3 = quad::cosine_tail(phi, ws, tau, p3_tol);

        out.value = p1.value + 2.0 / (tau * tau) * (p2.value - p3.value);
        out.error = p1.error + 2.0 / (tau * tau) * (p2.error + p3.error);
        out.evaluations = p1.evaluations + p2.evaluations + p3.evaluations;
        out.converged = p1.converged && p2.converged && p3.converged;
    }
    out.value /= pi;
    out.error /= pi;
    return out;
}

// Work cumulant kappa^n for a linear ramp, frequency route. tol is relative.
inline CumulantResult cumulant(int n, const SusceptibilityModel& model,
                               const RampProtocol& ramp, double tol = 1e-10) {
    if (n < 1 || n > 3) throw DomainError("cumulant: order must be 1..3");
    const double A = ramp.amplitude;
    CumulantResult res;
    res.order = n;
    res.route = CumulantRoute::frequency;
    if (A == 0.0) return res;
    auto S = [&model](double w) { return model.im_chi_over_omega(w); };
    quad::Result r = cumulant_integral(n, S, ramp.duration, model.temperature,
                                       model.omega_scale(), tol);
    res.value = A * A * r.value;
    res.quadrature_error = A * A * r.error;
    if (!r.converged || res.quadrature_error > tol * std::abs(res.value) + 1e-280)
        throw ConvergenceError("cumulant: tolerance not met (order " + std::to_string(n) + ")");
    return res;
}

// d kappa^3/dT with the temperature derivative taken inside the integral
// (MRLM only; the dT kernel decays exponentially, so this is UV-finite even
// in the sudden limit).
inline CumulantResult dkappa3_dT(const SusceptibilityModel& model, const RampProtocol& ramp,
                                 double tol = 1e-9) {
    if (model.kind != ChiKind::mrlm)
        throw DomainError("dkappa3_dT: analytic dT kernel available for the MRLM only");
    const double A = ramp.amplitude;
    CumulantResult res;
    res.order = 3;
    res.route = CumulantRoute::frequency;
    if (A == 0.0) return res;
    auto S = [&model](double w) {
        return mrlm_dT_im_chi_over_omega(w, model.temperature, model.gamma);
    };
    // sech^2 kernel dies at ~T; keep Gamma in the scale for the Lorentzian
    quad::Result r = cumulant_integral(3, S, ramp.duration, model.temperature,
                                       std::max(4.0 * model.temperature, 1e-3 * model.gamma), tol);
    res.value = A * A * r.value;
    res.quadrature_error = A * A * r.error;
    if (!r.converged) throw ConvergenceError("dkappa3_dT: tolerance not met");
    return res;
}

// ---------------------------------------------------------------------------
// time-domain routes
// ---------------------------------------------------------------------------

using PsiEvaluator = std::function<double(double)>;  // Psi0(t)

// <W_diss> = T A^2 int_0^1 du (1-u) Psi0(tau u); the u -> 0 endpoint may
// carry an integrable log/power singularity (never evaluated exactly).
inline CumulantResult wdiss_time_domain(const PsiEvaluator& psi, double T,
                                        const RampProtocol& ramp, double tol = 1e-10) {
    const double A = ramp.amplitude, tau = ramp.duration;
    CumulantResult res;
    res.order = 1;
    res.route = CumulantRoute::time_domain;
    if (tau == 0.0) throw DomainError("wdiss_time_domain: tau > 0 required (use sudden_limits)");
    if (A == 0.0) return res;
    quad::Result r = quad::integrate([&](double u) { return (1.0 - u) * psi(tau * u); },
                                     0.0, 1.0, 1e-300, tol, 20000);
    res.value = T * A * A * r.value;
    res.quadrature_error = T * A * A * r.error;
    if (!r.converged) throw ConvergenceError("wdiss_time_domain: tolerance not met");
    return res;
}

// kappa^3 = T A^2 tau^{-2} (Psi0(0) - Psi0(tau)); a UV-regularized Psi0(tau0)
// replaces the divergent Psi0(0) of the marginal case when tau0 > 0.
inline CumulantResult kappa3_time_domain(const PsiEvaluator& psi, double T,
                                         const RampProtocol& ramp, double tau0 = 0.0) {
    const double A = ramp.amplitude, tau = ramp.duration;
    if (!(tau > 0.0)) throw DomainError("kappa3_time_domain: tau > 0");
    CumulantResult res;
    res.order = 3;
    res.route = CumulantRoute::time_domain;
    const double psi_ref = psi(tau0 > 0.0 ? tau0 : 0.0);
    res.value = T * A * A / (tau * tau) * (psi_ref - psi(tau));
    return res;
}

// Psi~(omega=0) = 2 int_0^inf Psi0(t) dt by chunked quadrature with a
// geometric remainder bound on the (exponentially decaying) tail.
inline quad::Result psi_tilde_zero(const PsiEvaluator& psi, double T, double tol = 1e-10) {
    quad::Result total;
    const double chunk0 = 1.0 / (specfun::pi * T);
    double a = 0.0, b = chunk0;
    double prev = 0.0;
    for (int k = 0; k < 60; ++k) {
        quad::Result r = quad::integrate(psi, a, b, 1e-300, tol * 0.5, 20000);
        total += r;
        if (k > 0 && std::abs(r.value) < tol * std::abs(total.value)) {
            const double ratio = prev > 0.0 ? std::abs(r.value) / prev : 0.0;
            if (ratio < 1.0) {
                total.error += std::abs(r.value) * ratio / (1.0 - ratio);
                total.value *= 2.0;
                total.error *= 2.0;
                return total;
            }
        }
        prev = std::abs(r.value);
        a = b;
        b += chunk0;
    }
    throw ConvergenceError("psi_tilde_zero: tail not converged");
}

// Eq-8 adiabatic dissipated work, psi route
inline CumulantResult wdiss_adiabatic(const PsiEvaluator& psi, double T,
                                      const RampProtocol& ramp, double tol = 1e-10) {
    CumulantResult res;
    res.order = 1;
    res.route = CumulantRoute::limit_formula;
    quad::Result pt0 = psi_tilde_zero(psi, T, tol);
    res.value = 0.5 * T * ramp.amplitude * ramp.amplitude / ramp.duration * pt0.value;
    res.quadrature_error = 0.5 * T * ramp.amplitude * ramp.amplitude / ramp.duration * pt0.error;
    return res;
}

// model route: Psi~(0) = (2/T) lim_{omega->0} Im chi/omega
inline CumulantResult wdiss_adiabatic(const SusceptibilityModel& model,
                                      const RampProtocol& ramp) {
    CumulantResult res;
    res.order = 1;
    res.route = CumulantRoute::limit_formula;
    const double psi_tilde0 = 2.0 / model.temperature * model.im_chi_over_omega(0.0);
    res.value = 0.5 * model.temperature * ramp.amplitude * ramp.amplitude / ramp.duration * psi_tilde0;
    return res;
}

// ---------------------------------------------------------------------------
// sudden limit
// ---------------------------------------------------------------------------

struct SuddenLimits {
    double kappa1 = 0.0;                // (A^2/2) chi_static
    std::optional<double> kappa3;       // -(A^2/2) <H_SE>, RLM only
};

inline SuddenLimits sudden_limits(const SusceptibilityModel& model, double A) {
    SuddenLimits out;
    out.kappa1 = 0.5 * A * A * static_susceptibility_kk(model);
    if (model.kind == ChiKind::rlm)
        out.kappa3 = -0.5 * A * A * rlm_hse(0.0, model.gamma, model.temperature, model.band_cutoff);
    return out;
}

// LR validity advisory |A| chi_static (small against 1 for LR to hold)
inline double lr_validity(const SusceptibilityModel& model, double A) {
    return std::abs(A) * static_susceptibility_kk(model, 1e-8);
}

// ---------------------------------------------------------------------------
// Psi0 from Im chi (cosine transform)
// ---------------------------------------------------------------------------

// Psi0(t) = (2/(pi T)) int_0^inf cos(omega t) Im chi/omega domega
inline double psi_from_model(const SusceptibilityModel& model, double t, double tol = 1e-9) {
    using specfun::pi;
    auto S = [&model](double w) { return model.im_chi_over_omega(w); };
    const double scale = 10.0 * model.omega_scale();
    quad::Result r;
    if (t == 0.0 || pi / t >= scale) {
        auto g = [&](double w) { return (t == 0.0 ? 1.0 : std::cos(w * t)) * S(w); };
        r = quad::integrate_0_inf(g, scale, 1e-300, tol, 20000);
    } else {
        const double ws = 0.5 * pi / t;
        r = quad::integrate([&](double w) { return std::cos(w * t) * S(w); }, 0.0, ws,
                            1e-300, 0.5 * tol, 20000);
        const double abs_tol = std::max(std::abs(r.value), S(0.0) / (10.0 * t)) * tol;
        quad::Result tail = quad::cosine_tail(S, ws, t, abs_tol);
        r += tail;
    }
    if (!r.converged) throw ConvergenceError("psi_from_model: cosine transform not converged");
    return 2.0 / (pi * model.temperature) * r.value;
}

// ---------------------------------------------------------------------------
// crossover sweep
// ---------------------------------------------------------------------------

struct SweepSpec {
    std::string model_name;  // reported in rows
    // either a model factory per temperature...
    std::function<SusceptibilityModel(double T)> make_model;
    // ...or CFT parameters (time-domain routes)
    std::optional<double> delta;
    double cutoff = 1.0;

    std::vector<double> T_list;
    std::vector<double> tau_list;
    double amplitude = 0.1;
    std::vector<int> orders = {1};
    double tol = 1e-10;
    int threads = 0;  // 0: CRITWORK_THREADS env or hardware_concurrency
};

struct SweepRow {
    std::string model;
    double delta;  // NaN for non-CFT models
    double T, tau, A;
    int n;
    double kappa = 0.0, kappa_err = 0.0;
    std::string route, status = "ok";
};

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("CRITWORK_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Evaluate all (T, tau, order) cells; per-cell failures are flagged in the
// status column, never abort the sweep. Results are index-ordered, so the
// output is independent of the thread schedule.
inline std::vector<SweepRow> crossover_sweep(const SweepSpec& spec) {
    if (spec.T_list.empty() || spec.tau_list.empty() || spec.orders.empty())
        throw DomainError("crossover_sweep: empty grid");
    const std::size_t n_cells = spec.T_list.size() * spec.tau_list.size() * spec.orders.size();
    std::vector<SweepRow> rows(n_cells);

    auto run_cell = [&spec, &rows](std::size_t idx) {
        const std::size_t no = spec.orders.size();
        const std::size_t ntau = spec.tau_list.size();
        const double T = spec.T_list[idx / (ntau * no)];
        const double tau = spec.tau_list[(idx / no) % ntau];
        const int n = spec.orders[idx % no];
        SweepRow& row = rows[idx];
        row.model = spec.model_name;
        row.delta = spec.delta ? *spec.delta : std::nan("");
        row.T = T;
        row.tau = tau;
        row.A = spec.amplitude;
        row.n = n;
        try {
            const RampProtocol ramp(spec.amplitude, tau);
            if (spec.delta) {
                const cft::CftParams p(*spec.delta, spec.cutoff, T);
                if (n == 1) {
                    CumulantResult r = wdiss_time_domain([&p](double t) { return cft::psi0(t, p); },
                                                         T, ramp, spec.tol);
                    row.kappa = r.value;
                    row.kappa_err = r.quadrature_error;
                    row.route = route_name(r.route);
                } else if (n == 3) {
                    CumulantResult r = kappa3_time_domain([&p](double t) { return cft::psi0(t, p); },
                                                          T, ramp, p.tau0);
                    row.kappa = r.value;
                    row.kappa_err = 0.0;
                    row.route = route_name(r.route);
                } else {
                    row.kappa = std::nan("");
                    row.route = "-";
                    row.status = "unsupported: cft kappa2 only has an adiabatic closed form";
                }
            } else {
                const SusceptibilityModel m = spec.make_model(T);
                CumulantResult r = cumulant(n, m, ramp, spec.tol);
                row.kappa = r.value;
                row.kappa_err = r.quadrature_error;
                row.route = route_name(r.route);
            }
        } catch (const std::exception& e) {
            row.kappa = std::nan("");
            row.kappa_err = std::nan("");
            row.route = "-";
            row.status = std::string("error: ") + e.what();
        }
    };

    const int n_threads = std::min<int>(resolve_threads(spec.threads),
                                        static_cast<int>(n_cells));
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < n_cells; ++i) run_cell(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < n_cells; i = next.fetch_add(1))
                    run_cell(i);
            });
        for (auto& th : pool) th.join();
    }
    return rows;
}

}  // namespace critwork

#endif
