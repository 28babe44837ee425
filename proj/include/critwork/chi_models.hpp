#ifndef CRITWORK_CHI_MODELS_HPP
#define CRITWORK_CHI_MODELS_HPP

// Closed-form dynamical susceptibilities and equilibrium observables for the
// resonant level model (RLM) and the Majorana RLM (Emery-Kivelson solution of
// the two-channel Kondo critical point), a tabulated-Im chi adapter, and the
// classical master-equation work statistics of a driven two-state level.

#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "critwork/quadrature.hpp"
#include "critwork/specfun.hpp"
#include "critwork/work_distribution.hpp"

namespace critwork {

using specfun::pi;

// ---------------------------------------------------------------------------
// Majorana RLM (Emery-Kivelson), epsilon_d = 0
// ---------------------------------------------------------------------------

// Im chi(omega) = (1/2) tanh(omega/2T) Gamma / (omega^2 + Gamma^2)
inline double mrlm_im_chi(double omega, double T, double gamma) {
    if (!(T > 0.0) || !(gamma > 0.0)) throw DomainError("mrlm_im_chi: requires T, Gamma > 0");
    return 0.5 * std::tanh(0.5 * omega / T) * gamma / (omega * omega + gamma * gamma);
}

namespace detail {
inline double tanh_over_x(double x) {
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0;
    }
    return std::tanh(x) / x;
}
inline double sech_sq(double x) {
    const double e = std::exp(-std::abs(x));
    const double s = 2.0 * e / (1.0 + e * e);
    return s * s;
}
}  // namespace detail

// S(omega) = Im chi / omega, smooth and even through omega = 0
inline double mrlm_im_chi_over_omega(double omega, double T, double gamma) {
    return 0.25 / T * detail::tanh_over_x(0.5 * omega / T) * gamma /
           (omega * omega + gamma * gamma);
}

// d/dT of Im chi, divided by omega (smooth, even; decays like sech^2)
inline double mrlm_dT_im_chi_over_omega(double omega, double T, double gamma) {
    return -0.25 / (T * T) * detail::sech_sq(0.5 * omega / T) * gamma /
           (omega * omega + gamma * gamma);
}

// <N_S>(lambda) from the paper's digamma formula; the square-root branch is
// fixed by continuity from lambda = 0 (the expression is even in it).
inline double mrlm_occupation(double lambda, double gamma, double T) {
    if (!(T > 0.0) || !(gamma > 0.0)) throw DomainError("mrlm_occupation: requires T, Gamma > 0");
    const cxdbl disc(4.0 * lambda * lambda - gamma * gamma, 0.0);
    const cxdbl delta = std::sqrt(disc);  // principal: i*Gamma at lambda = 0
    const cxdbl c(0.5 + gamma / (4.0 * pi * T), 0.0);
    if (std::abs(delta) < 1e-8 * gamma) {
        // removable point 2|lambda| = Gamma: psi-difference ~ 2i delta psi'(c)/(4 pi T)
        return 0.5 - lambda * specfun::trigamma(c.real()) / (2.0 * pi * pi * T);
    }
    const cxdbl arg_p = c + cxdbl(0.0, 1.0) * delta / (4.0 * pi * T);
    const cxdbl arg_m = c - cxdbl(0.0, 1.0) * delta / (4.0 * pi * T);
    const cxdbl bracket = specfun::digamma(arg_p) - specfun::digamma(arg_m);
    return 0.5 - std::imag(lambda / (pi * delta) * bracket);
}

// -d<N_S>/d lambda at lambda = 0 in closed form
inline double mrlm_static_susceptibility(double gamma, double T) {
    return (specfun::digamma(0.5 + gamma / (2.0 * pi * T)) - specfun::digamma(0.5)) /
           (pi * gamma);
}

// ---------------------------------------------------------------------------
// Resonant level model
// ---------------------------------------------------------------------------

// Im chi at epsilon_d = 0 from the closed digamma form.
inline double rlm_im_chi(double omega, double T, double gamma) {
    if (!(T > 0.0) || !(gamma > 0.0)) throw DomainError("rlm_im_chi: requires T, Gamma > 0");
    const double a = 0.5 + gamma / (2.0 * pi * T);
    if (std::abs(omega) < 1e-6 * std::max(gamma, T)) {
        const double slope = specfun::trigamma(a) / (4.0 * pi * pi * T * gamma) -
                             specfun::tetragamma(a) / (8.0 * pi * pi * pi * T * T);
        return slope * omega;
    }
    const cxdbl denom(omega * omega / (gamma * gamma), 2.0 * omega / gamma);
    const cxdbl num = specfun::digamma(cxdbl(a, 0.0)) -
                      specfun::digamma(cxdbl(a, -omega / (2.0 * pi * T)));
    return std::imag(2.0 / (pi * gamma) * num / denom);
}

inline double rlm_im_chi_over_omega(double omega, double T, double gamma) {
    const double a = 0.5 + gamma / (2.0 * pi * T);
    if (std::abs(omega) < 1e-6 * std::max(gamma, T)) {
        return specfun::trigamma(a) / (4.0 * pi * pi * T * gamma) -
               specfun::tetragamma(a) / (8.0 * pi * pi * pi * T * T);
    }
    return rlm_im_chi(omega, T, gamma) / omega;
}

// chi(omega) for general epsilon_d from the lead-integral representation,
// chi = -(1/pi Gamma) int dx f(Gamma x + eps_d) 2x / ((x^2+1)(x^2 - c^2)),
// c = omega/Gamma + i. The x -> -inf tail (f = 1) is added in closed form.
inline cxdbl rlm_chi_integral(double omega, double eps_d, double T, double gamma) {
    if (!(T > 0.0) || !(gamma > 0.0)) throw DomainError("rlm_chi_integral: requires T, Gamma > 0");
    const cxdbl c(omega / gamma, 1.0);
    const cxdbl c2 = c * c;
    const double thermal = 37.0 * T / gamma;
    const double lo = std::max({20.0, 3.0 * std::abs(omega) / gamma + 10.0, (eps_d / gamma) + thermal + 5.0});
    const double hi = std::max({20.0, 3.0 * std::abs(omega) / gamma + 10.0, (-eps_d / gamma) + thermal + 5.0});

    auto re_part = [&](double x) {
        const cxdbl g = 2.0 * x / ((x * x + 1.0) * (x * x - c2));
        return specfun::fermi(gamma * x + eps_d, T) * g.real();
    };
    auto im_part = [&](double x) {
        const cxdbl g = 2.0 * x / ((x * x + 1.0) * (x * x - c2));
        return specfun::fermi(gamma * x + eps_d, T) * g.imag();
    };
    quad::Result rr = quad::integrate(re_part, -lo, hi, 1e-13, 1e-11, 8000);
    quad::Result ri = quad::integrate(im_part, -lo, hi, 1e-13, 1e-11, 8000);
    if (!rr.converged || !ri.converged)
        throw ConvergenceError("rlm_chi_integral: quadrature did not meet tolerance");
    // int_{-inf}^{-lo} with f = 1:  [ln((x^2-c^2)/(x^2+1))]/(c^2+1) at x = -lo.
    // c^2 + 1 -> 0 at omega = 0 (double pole); expand the log there.
    const cxdbl u = -(c2 + 1.0) / (lo * lo + 1.0);
    cxdbl tail;
    if (std::abs(u) < 1e-4)
        tail = -1.0 / (lo * lo + 1.0) * (1.0 - u / 2.0 + u * u / 3.0 - u * u * u / 4.0);
    else
        tail = std::log((lo * lo - c2) / (lo * lo + 1.0)) / (c2 + 1.0);
    return -(cxdbl(rr.value, ri.value) + tail) / (pi * gamma);
}

// <N_S> from the digamma formula
inline double rlm_occupation(double eps_d, double gamma, double T) {
    if (!(T > 0.0) || !(gamma > 0.0)) throw DomainError("rlm_occupation: requires T, Gamma > 0");
    const double s = 2.0 * pi * T;
    const cxdbl p = specfun::digamma(cxdbl(0.5 + gamma / s, -eps_d / s)) -
                    specfun::digamma(cxdbl(0.5 + gamma / s, eps_d / s));
    return 0.5 + std::imag(p) / (2.0 * pi);
}

// -d<N_S>/d eps_d at eps_d = 0 in closed form
inline double rlm_static_susceptibility(double gamma, double T) {
    return specfun::trigamma(0.5 + gamma / (2.0 * pi * T)) / (2.0 * pi * pi * T);
}

// <H_SE> = 2 Gamma int_{-L}^{L} domega/pi f(omega) (omega-eps_d)/((omega-eps_d)^2+Gamma^2).
// Depends logarithmically on the band cutoff L.
inline double rlm_hse(double eps_d, double gamma, double T, double band_cutoff) {
    if (!(T > 0.0) || !(gamma > 0.0)) throw DomainError("rlm_hse: requires T, Gamma > 0");
    if (!(band_cutoff >= 10.0 * gamma)) throw DomainError("rlm_hse: band cutoff must be >= 10 Gamma");
    auto integrand = [&](double w) {
        const double d = w - eps_d;
        return specfun::fermi(w, T) * d / (d * d + gamma * gamma);
    };
    quad::Result lo = quad::integrate(integrand, -band_cutoff, 0.0, 1e-12 * gamma, 1e-11, 8000);
    quad::Result hi = quad::integrate(integrand, 0.0, band_cutoff, 1e-12 * gamma, 1e-11, 8000);
    if (!lo.converged || !hi.converged)
        throw ConvergenceError("rlm_hse: quadrature did not meet tolerance");
    return 2.0 * gamma / pi * (lo.value + hi.value);
}

// ---------------------------------------------------------------------------
// SusceptibilityModel: the bridge between model physics and the engine
// ---------------------------------------------------------------------------

// Sampled Im chi(omega) on omega >= 0; odd extension applied on evaluation,
// zero beyond the table with a one-time warning.
class ChiTable {
  public:
    ChiTable() = default;

    static ChiTable from_points(std::vector<std::pair<double, double>> pts) {
        ChiTable t;
        if (pts.empty()) throw DomainError("ChiTable: empty table");
        double prev = -1.0;
        for (auto& [w, v] : pts) {
            if (w < 0.0) throw DomainError("ChiTable: omega must be >= 0");
            if (w <= prev) throw DomainError("ChiTable: omega must be strictly increasing");
            prev = w;
        }
        if (pts.front().first == 0.0 && pts.front().second != 0.0)
            throw DomainError("ChiTable: Im chi(0) must vanish (odd function)");
        t.pts_ = std::move(pts);
        return t;
    }

    // two-column text: omega  im_chi, '#' comments
    static ChiTable parse(std::istream& in) {
        std::vector<std::pair<double, double>> pts;
        std::string line;
        while (std::getline(in, line)) {
            const auto h = line.find('#');
            if (h != std::string::npos) line.erase(h);
            std::istringstream ls(line);
            double w, v;
            if (ls >> w >> v) pts.emplace_back(w, v);
        }
        return from_points(std::move(pts));
    }

    double operator()(double omega) const {
        const double a = std::abs(omega);
        const double sign = omega < 0.0 ? -1.0 : 1.0;
        if (a < pts_.front().first) {
            // linear from the origin through the first point
            return sign * pts_.front().second * (a / std::max(pts_.front().first, 1e-300));
        }
        if (a > pts_.back().first) {
            if (!warned_) {
                warned_ = true;
                std::cerr << "ChiTable: omega beyond table range, extrapolating as zero\n";
            }
            return 0.0;
        }
        auto it = std::lower_bound(pts_.begin(), pts_.end(), a,
                                   [](const auto& p, double x) { return p.first < x; });
        if (it == pts_.begin()) return sign * it->second;
        const auto [w1, v1] = *(it - 1);
        const auto [w2, v2] = *it;
        const double u = (a - w1) / (w2 - w1);
        return sign * (v1 + u * (v2 - v1));
    }

    double max_omega() const { return pts_.back().first; }

    double slope_at_zero() const {
        for (const auto& [w, v] : pts_)
            if (w > 0.0) return v / w;
        return 0.0;
    }

  private:
    std::vector<std::pair<double, double>> pts_;
    mutable bool warned_ = false;
};

enum class ChiKind { rlm, mrlm, tabulated };

struct SusceptibilityModel {
    ChiKind kind = ChiKind::mrlm;
    double gamma = 1.0;        // level width
    double temperature = 1.0;  // T
    double band_cutoff = 0.0;  // RLM only, for <H_SE>
    ChiTable table;

    static SusceptibilityModel rlm(double gamma, double T, double band_cutoff = 0.0) {
        if (!(gamma > 0.0) || !(T > 0.0)) throw DomainError("SusceptibilityModel: Gamma, T > 0");
        if (band_cutoff == 0.0) band_cutoff = 100.0 * gamma;
        if (!(band_cutoff >= 10.0 * gamma)) throw DomainError("SusceptibilityModel: band cutoff >= 10 Gamma");
        return {ChiKind::rlm, gamma, T, band_cutoff, {}};
    }
    static SusceptibilityModel mrlm(double gamma, double T) {
        if (!(gamma > 0.0) || !(T > 0.0)) throw DomainError("SusceptibilityModel: Gamma, T > 0");
        return {ChiKind::mrlm, gamma, T, 0.0, {}};
    }
    static SusceptibilityModel tabulated(ChiTable t, double T, double scale = 1.0) {
        if (!(T > 0.0)) throw DomainError("SusceptibilityModel: T > 0");
        return {ChiKind::tabulated, scale, T, 0.0, std::move(t)};
    }

    double im_chi(double omega) const {
        switch (kind) {
            case ChiKind::rlm: return rlm_im_chi(omega, temperature, gamma);
            case ChiKind::mrlm: return mrlm_im_chi(omega, temperature, gamma);
            case ChiKind::tabulated: return table(omega);
        }
        return 0.0;
    }

    // S(omega) = Im chi / omega with the removable omega = 0 point handled
    double im_chi_over_omega(double omega) const {
        switch (kind) {
            case ChiKind::rlm: return rlm_im_chi_over_omega(omega, temperature, gamma);
            case ChiKind::mrlm: return mrlm_im_chi_over_omega(omega, temperature, gamma);
            case ChiKind::tabulated:
                if (std::abs(omega) < 1e-12 * std::max(table.max_omega(), 1.0))
                    return table.slope_at_zero();
                return table(omega) / omega;
        }
        return 0.0;
    }

    // characteristic frequency beyond which Im chi decays
    double omega_scale() const {
        if (kind == ChiKind::tabulated) return 0.25 * table.max_omega();
        return std::max(gamma, temperature);
    }

    // closed-form -d<N_S>/d lambda where available
    double static_susceptibility_closed_form() const {
        switch (kind) {
            case ChiKind::rlm: return rlm_static_susceptibility(gamma, temperature);
            case ChiKind::mrlm: return mrlm_static_susceptibility(gamma, temperature);
            default: throw DomainError("static susceptibility: no closed form for tabulated model");
        }
    }
};

// Kramers-Kronig static susceptibility (1/pi) int domega Im chi / omega;
// equals -d<N_S>/d lambda when c(T) = 0.
inline double static_susceptibility_kk(const SusceptibilityModel& m, double rel_tol = 1e-10) {
    auto S = [&m](double w) { return m.im_chi_over_omega(w); };
    const double scale = 10.0 * m.omega_scale();
    quad::Result r = quad::integrate_0_inf(S, scale, 1e-300, rel_tol, 20000);
    if (!r.converged) throw ConvergenceError("static_susceptibility_kk: quadrature did not converge");
    return 2.0 / pi * r.value;
}

// residual c(T) = -d<N_S>/dlambda - Re chi(0); vanishes for the continuum models
inline double check_cT(const SusceptibilityModel& m) {
    const double chi_kk = static_susceptibility_kk(m);
    const double dndl = -m.static_susceptibility_closed_form();
    return -dndl - chi_kk;
}

// ---------------------------------------------------------------------------
// Classical (master equation) regime of the RLM
// ---------------------------------------------------------------------------

struct ClassicalTrajectoryConfig {
    long n_samples = 100000;
    std::uint64_t seed = 1;
    // retained for fixed-step configs; the exact jump sampler does not use it
    double dt_factor = 0.05;
};

// Sudden-limit two-peak distribution P(W) = <n>_0 d(W-A) + (1-<n>_0) d(W)
inline WorkDistribution classical_sudden_wdf(double eps_d0, double A, double gamma, double T) {
    (void)gamma;
    const double f = specfun::fermi(eps_d0, T);
    WorkDistribution wdf;
    wdf.atoms = {{0.0, 1.0 - f}, {A, f}};
    wdf.delta_f = -T * (std::log1p(std::exp(-(eps_d0 + A) / T)) - std::log1p(std::exp(-eps_d0 / T)));
    wdf.merge_atoms(1e-15 * std::max(1.0, std::abs(A)));
    return wdf;
}

struct ClassicalWdfResult {
    WorkDistribution dist;
    std::array<double, 3> moment_se{};  // standard errors of <W^n>
    double jarzynski = 0.0;             // <e^{-W/T}> e^{dF/T}
    double jarzynski_se = 0.0;
};

// Monte Carlo over two-state jump trajectories of the master equation
//   p1' = Gamma [p0 f(eps_d(t)) - p1 (1 - f(eps_d(t)))],
// eps_d(t) = eps_d0 + A t/tau, with work W = int (A/tau) n(t) dt.
// Exact Gillespie sampling with thinning against the envelope rate Gamma.
// Samples are sharded (1024 per shard) with sub-seeds derived from
// (seed, shard) so concurrent sharding cannot change the stream.
inline ClassicalWdfResult classical_trajectory_work(double eps_d0, double A, double tau,
                                                    double gamma_rate, double T,
                                                    const ClassicalTrajectoryConfig& cfg) {
    if (cfg.n_samples < 1) throw DomainError("classical_trajectory_work: n_samples >= 1");
    if (!(T > 0.0) || !(gamma_rate > 0.0) || tau < 0.0)
        throw DomainError("classical_trajectory_work: requires T, Gamma > 0 and tau >= 0");

    const double f0 = specfun::fermi(eps_d0, T);
    std::vector<double> works(static_cast<std::size_t>(cfg.n_samples));

    constexpr long shard_size = 1024;
    const long n_shards = (cfg.n_samples + shard_size - 1) / shard_size;
    for (long shard = 0; shard < n_shards; ++shard) {
        std::seed_seq sseq{static_cast<std::uint64_t>(cfg.seed), static_cast<std::uint64_t>(shard)};
        std::mt19937_64 rng(sseq);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        std::exponential_distribution<double> expdist(gamma_rate);
        const long begin = shard * shard_size;
        const long end = std::min(cfg.n_samples, begin + shard_size);
        for (long i = begin; i < end; ++i) {
            int n = u01(rng) < f0 ? 1 : 0;
            if (tau == 0.0) {
                works[static_cast<std::size_t>(i)] = A * n;
                continue;
            }
            double t = 0.0, occupied = 0.0;
            while (true) {
                const double t_next = t + expdist(rng);
                if (t_next >= tau) {
                    if (n == 1) occupied += tau - t;
                    break;
                }
                if (n == 1) occupied += t_next - t;
                t = t_next;
                const double f = specfun::fermi(eps_d0 + A * t / tau, T);
                const double accept = (n == 0) ? f : (1.0 - f);
                if (u01(rng) < accept) n ^= 1;
            }
            works[static_cast<std::size_t>(i)] = (A / tau) * occupied;
        }
    }

    ClassicalWdfResult out;
    out.dist.atoms.reserve(works.size());
    const double p = 1.0 / static_cast<double>(works.size());
    for (double w : works) out.dist.atoms.push_back({w, p});
    out.dist.delta_f =
        -T * (std::log1p(std::exp(-(eps_d0 + A) / T)) - std::log1p(std::exp(-eps_d0 / T)));
    out.dist.merge_atoms(1e-14 * std::max(1.0, std::abs(A)));

    // batch-mean standard errors
    const int n_batches = static_cast<int>(std::min<long>(100, cfg.n_samples));
    std::vector<std::array<double, 4>> batch(static_cast<std::size_t>(n_batches), {0.0, 0.0, 0.0, 0.0});
    std::vector<long> counts(static_cast<std::size_t>(n_batches), 0);
    for (std::size_t i = 0; i < works.size(); ++i) {
        const auto b = static_cast<std::size_t>(i % static_cast<std::size_t>(n_batches));
        const double w = works[i];
        batch[b][0] += w;
        batch[b][1] += w * w;
        batch[b][2] += w * w * w;
        batch[b][3] += std::exp(-(w - out.dist.delta_f) / T);
        ++counts[b];
    }
    std::array<double, 4> mean{}, var{};
    for (std::size_t b = 0; b < batch.size(); ++b)
        for (int j = 0; j < 4; ++j) batch[b][j] /= static_cast<double>(counts[b]);
    for (const auto& bb : batch)
        for (int j = 0; j < 4; ++j) mean[j] += bb[j] / n_batches;
    for (const auto& bb : batch)
        for (int j = 0; j < 4; ++j) var[j] += (bb[j] - mean[j]) * (bb[j] - mean[j]) / n_batches;
    for (int j = 0; j < 3; ++j) out.moment_se[j] = std::sqrt(var[j] / n_batches);
    out.jarzynski = mean[3];
    out.jarzynski_se = std::sqrt(var[3] / n_batches);
    return out;
}

}  // namespace critwork

#endif
