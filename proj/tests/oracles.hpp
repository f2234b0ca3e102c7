// Test-side oracles: independent re-derivations used to freeze expected
// values. Nothing here may call the implementation path it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "mixedsel/likelihood.hpp"
#include "mixedsel/problem.hpp"
#include "mixedsel/rng.hpp"

namespace oracles {

using mixedsel::LMEProblem;
using mixedsel::NormalStream;
using mixedsel::Params;

// ---- finite differences ---------------------------------------------------

inline Eigen::VectorXd fd_gradient(const LMEProblem& problem, const Params& at,
                                   double h = 1e-6) {
    const Eigen::VectorXd x = at.stacked();
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (mixedsel::nll(problem, Params::from_stacked(xp, at.p())) -
                mixedsel::nll(problem, Params::from_stacked(xm, at.p()))) /
               (2.0 * h);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const LMEProblem& problem, const Params& at,
                                  double h = 1e-5) {
    const Eigen::VectorXd x = at.stacked();
    Eigen::MatrixXd hess(x.size(), x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        Eigen::VectorXd xp = x;
        Eigen::VectorXd xm = x;
        xp[i] += h;
        xm[i] -= h;
        hess.col(i) = (mixedsel::grad(problem, Params::from_stacked(xp, at.p())) -
                       mixedsel::grad(problem, Params::from_stacked(xm, at.p()))) /
                      (2.0 * h);
    }
    return (0.5 * (hess + hess.transpose())).eval();
}

// ---- random problems ------------------------------------------------------

inline LMEProblem random_problem(NormalStream& rng, int m, Eigen::Index p, Eigen::Index q,
                                 int n_lo, int n_hi) {
    Eigen::VectorXd beta(p);
    for (Eigen::Index j = 0; j < p; ++j) beta[j] = rng.normal();
    Eigen::VectorXd gamma(q);
    for (Eigen::Index j = 0; j < q; ++j) gamma[j] = rng.uniform(0.3, 1.5);

    std::vector<mixedsel::GroupBlock> groups;
    for (int gi = 0; gi < m; ++gi) {
        const Eigen::Index n =
            n_lo + static_cast<Eigen::Index>(rng.uniform() * static_cast<double>(n_hi - n_lo + 1));
        Eigen::MatrixXd x(n, p);
        Eigen::MatrixXd z(n, q);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
            for (Eigen::Index j = 0; j < q; ++j) z(i, j) = rng.normal();
        }
        Eigen::VectorXd var(n);
        for (Eigen::Index i = 0; i < n; ++i) var[i] = rng.uniform(0.5, 2.0);
        Eigen::VectorXd u(q);
        for (Eigen::Index j = 0; j < q; ++j) u[j] = std::sqrt(gamma[j]) * rng.normal();
        Eigen::VectorXd y = x * beta + z * u;
        for (Eigen::Index i = 0; i < n; ++i) y[i] += std::sqrt(var[i]) * rng.normal();
        groups.emplace_back(std::move(x), std::move(z), std::move(y), std::move(var));
    }
    return LMEProblem(std::move(groups));
}

inline Params random_params(NormalStream& rng, Eigen::Index p, Eigen::Index q) {
    Eigen::VectorXd beta(p);
    for (Eigen::Index j = 0; j < p; ++j) beta[j] = rng.normal();
    Eigen::VectorXd gamma(q);
    for (Eigen::Index j = 0; j < q; ++j) gamma[j] = rng.uniform(0.1, 1.5);
    return {std::move(beta), std::move(gamma)};
}

// A one-observation, one-covariate problem with X = Z = [1].
inline LMEProblem scalar_problem(double y, double obs_var = 1.0) {
    std::vector<mixedsel::GroupBlock> groups;
    groups.emplace_back(Eigen::MatrixXd::Ones(1, 1), Eigen::MatrixXd::Ones(1, 1),
                        Eigen::VectorXd::Constant(1, y),
                        Eigen::VectorXd::Constant(1, obs_var));
    return LMEProblem(std::move(groups));
}

// ---- penalty values written out independently ------------------------------

inline double pen_l1(double lam, double x) { return lam * std::abs(x); }

inline double pen_alasso(double lam, double w, double x) { return lam * w * std::abs(x); }

inline double pen_scad(double sigma, double rho, double x) {
    const double a = std::abs(x);
    if (a <= sigma) return sigma * a;
    if (a < rho * sigma) {
        return (-a * a + 2.0 * rho * sigma * a - sigma * sigma) / (2.0 * (rho - 1.0));
    }
    return sigma * sigma * (rho + 1.0) / 2.0;
}

inline double pen_cad(double lam, double rho, double x) {
    return std::min(lam * std::abs(x), lam * rho);
}

// ---- brute-force grid minimizers -------------------------------------------

struct GridMin {
    double arg = 0.0;
    double value = 0.0;
};

// Dense scan of a complete prox objective over [lo, hi] with the spec'd
// 1e-4 step.
template <class Obj>
GridMin grid_prox(Obj&& objective, double lo, double hi, double step = 1e-4) {
    GridMin best{lo, objective(lo)};
    const long count = static_cast<long>(std::floor((hi - lo) / step));
    for (long i = 1; i <= count; ++i) {
        const double y = lo + static_cast<double>(i) * step;
        const double f = objective(y);
        if (f < best.value) best = {y, f};
    }
    return best;
}

// Refined 2-D grid minimization (used against the anchored inner solve).
template <class F>
std::pair<double, double> grid_minimize_2d(F&& f, double b_lo, double b_hi, double g_lo,
                                           double g_hi, int levels = 5, int pts = 81) {
    double best_b = b_lo, best_g = std::max(g_lo, 0.0), best_f = f(best_b, best_g);
    for (int level = 0; level < levels; ++level) {
        const double bstep = (b_hi - b_lo) / (pts - 1);
        const double gstep = (g_hi - g_lo) / (pts - 1);
        for (int i = 0; i < pts; ++i) {
            for (int j = 0; j < pts; ++j) {
                const double b = b_lo + i * bstep;
                const double g = std::max(0.0, g_lo + j * gstep);
                const double val = f(b, g);
                if (val < best_f) {
                    best_f = val;
                    best_b = b;
                    best_g = g;
                }
            }
        }
        const double b_span = 2.5 * bstep;
        const double g_span = 2.5 * gstep;
        b_lo = best_b - b_span;
        b_hi = best_b + b_span;
        g_lo = std::max(0.0, best_g - g_span);
        g_hi = best_g + g_span;
    }
    return {best_b, best_g};
}

// Refined 1-D minimization over [lo, hi].
template <class F>
double grid_minimize_1d(F&& f, double lo, double hi, int levels = 5, int pts = 201) {
    double best_x = lo, best_f = f(lo);
    for (int level = 0; level < levels; ++level) {
        const double step = (hi - lo) / (pts - 1);
        for (int i = 0; i < pts; ++i) {
            const double x = lo + i * step;
            const double val = f(x);
            if (val < best_f) {
                best_f = val;
                best_x = x;
            }
        }
        lo = best_x - 2.5 * step;
        hi = best_x + 2.5 * step;
    }
    return best_x;
}

}  // namespace oracles
