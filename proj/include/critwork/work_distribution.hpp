#ifndef CRITWORK_WORK_DISTRIBUTION_HPP
#define CRITWORK_WORK_DISTRIBUTION_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "critwork/specfun.hpp"

namespace critwork {

// Discrete work distribution: atoms (w, p) sorted by w, first three raw
// moments cached, and the equilibrium free-energy change of the protocol.
struct WorkDistribution {
    struct Atom {
        double w;
        double p;
    };

    std::vector<Atom> atoms;
    std::array<double, 3> moments{};  // <W>, <W^2>, <W^3>
    double delta_f = 0.0;

    void finalize() {
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.w < b.w; });
        moments = {0.0, 0.0, 0.0};
        for (const Atom& a : atoms) {
            moments[0] += a.p * a.w;
            moments[1] += a.p * a.w * a.w;
            moments[2] += a.p * a.w * a.w * a.w;
        }
    }

    // merge atoms whose work values coincide within tol
    void merge_atoms(double tol) {
        if (atoms.empty()) return;
        std::sort(atoms.begin(), atoms.end(),
                  [](const Atom& a, const Atom& b) { return a.w < b.w; });
        std::vector<Atom> merged;
        merged.push_back(atoms.front());
        for (std::size_t i = 1; i < atoms.size(); ++i) {
            if (atoms[i].w - merged.back().w <= tol) {
                const double p = merged.back().p + atoms[i].p;
                if (p > 0.0)
                    merged.back().w = (merged.back().w * merged.back().p + atoms[i].w * atoms[i].p) / p;
                merged.back().p = p;
            } else {
                merged.push_back(atoms[i]);
            }
        }
        atoms.swap(merged);
        finalize();
    }

    double total_probability() const {
        double s = 0.0;
        for (const Atom& a : atoms) s += a.p;
        return s;
    }

    double moment(int n) const { return moments.at(static_cast<std::size_t>(n - 1)); }

    double central_moment(int n) const {
        const double m1 = moments[0];
        double s = 0.0;
        for (const Atom& a : atoms) s += a.p * std::pow(a.w - m1, n);
        return s;
    }

    // cumulants of W for n <= 3 (equal to central moments for n = 2, 3)
    double cumulant(int n) const {
        switch (n) {
            case 1: return moments[0];
            case 2: return moments[1] - moments[0] * moments[0];
            case 3:
                return moments[2] - 3.0 * moments[1] * moments[0] +
                       2.0 * moments[0] * moments[0] * moments[0];
            default: throw DomainError("WorkDistribution::cumulant: order must be 1..3");
        }
    }

    // <e^{-beta W}> e^{beta dF}; equals 1 when Jarzynski holds
    double jarzynski_residual(double beta) const {
        double s = 0.0;
        for (const Atom& a : atoms) s += a.p * std::exp(-beta * (a.w - delta_f));
        return s;
    }
};

}  // namespace critwork

#endif
