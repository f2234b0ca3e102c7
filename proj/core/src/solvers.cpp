#include "mixedsel/solvers.hpp"

#include <Eigen/LU>
#include <algorithm>
#include <cmath>

#include "mixedsel/errors.hpp"

namespace mixedsel {

namespace {

constexpr long kPgdDefaultMaxIter = 100000;
constexpr long kMsr3DefaultMaxOuter = 500;
constexpr long kMsr3FastDefaultMaxIter = 5000;

// Optimality system of the anchored barrier subproblem, rows (v, beta, gamma).
Eigen::VectorXd kkt_residual(const LikelihoodParts& parts, const Eigen::VectorXd& v,
                             const Eigen::VectorXd& beta, const Eigen::VectorXd& gamma,
                             const Eigen::VectorXd& anchor_beta,
                             const Eigen::VectorXd& anchor_gamma, double mu, double eta,
                             double lam_bar) {
    const Eigen::Index p = beta.size();
    const Eigen::Index q = gamma.size();
    Eigen::VectorXd g(2 * q + p);
    g.head(q) = (v.cwiseProduct(gamma)).array() - mu;
    g.segment(q, p) = parts.grad_beta + eta * (beta - anchor_beta);
    g.tail(q) = parts.grad_gamma + (lam_bar + eta) * (gamma - anchor_gamma) - v;
    return g;
}

// Newton matrix with the Fisher block standing in for the gamma Hessian.
Eigen::MatrixXd kkt_matrix(const LikelihoodParts& parts, const Eigen::VectorXd& v,
                           const Eigen::VectorXd& gamma, double eta, double lam_bar) {
    const Eigen::Index p = parts.hess_beta.rows();
    const Eigen::Index q = gamma.size();
    const Eigen::Index dim = 2 * q + p;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(dim, dim);
    jac.topLeftCorner(q, q) = gamma.asDiagonal();
    jac.block(0, q + p, q, q) = v.asDiagonal();
    jac.block(q, q, p, p) = parts.hess_beta;
    jac.block(q, q, p, p).diagonal().array() += eta;
    jac.block(q, q + p, p, q) = parts.hess_cross;
    jac.block(q + p, 0, q, q) = -Eigen::MatrixXd::Identity(q, q);
    jac.block(q + p, q, q, p) = parts.hess_cross.transpose();
    jac.block(q + p, q + p, q, q) = parts.fisher;
    jac.block(q + p, q + p, q, q).diagonal().array() += eta + lam_bar;
    return jac;
}

Eigen::VectorXd newton_direction(Eigen::MatrixXd jac, const Eigen::VectorXd& rhs,
                                 double ridge) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (lu.isInvertible()) {
        Eigen::VectorXd d = lu.solve(rhs);
        if (d.allFinite()) return d;
    }
    jac.diagonal().array() += ridge;
    Eigen::FullPivLU<Eigen::MatrixXd> lu2(jac);
    if (lu2.isInvertible()) {
        Eigen::VectorXd d = lu2.solve(rhs);
        if (d.allFinite()) return d;
    }
    throw NewtonSingular("interior-point Newton system singular after regularization");
}

// Largest step in (0, 1] keeping x + a*dx strictly positive, times `factor`.
double fraction_to_boundary(const Eigen::VectorXd& x, const Eigen::VectorXd& dx,
                            double factor) {
    double a = 1.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (dx[i] < 0.0) a = std::min(a, -x[i] / dx[i]);
    }
    return factor * a;
}

void check_init_sizes(const LMEProblem& problem, const Params& init, const char* who) {
    if (init.p() != problem.p() || init.q() != problem.q() || !init.stacked().allFinite()) {
        throw std::invalid_argument(std::string(who) + ": init has wrong sizes or non-finite values");
    }
}

}  // namespace

Params default_init(const LMEProblem& problem) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(problem.q());
    return {beta_gls(problem, ones), ones};
}

// ---------------------------------------------------------------------------
// Proximal gradient descent
// ---------------------------------------------------------------------------

FitResult pgd_fit(const LMEProblem& problem, const BlockRegularizer& reg,
                  const SolverConfig& cfg, const Params& init) {
    check_init_sizes(problem, init, "pgd_fit");
    if (!init.feasible()) throw std::invalid_argument("pgd_fit: init gamma must be >= 0");
    const Eigen::Index p = problem.p();
    const Eigen::Index q = problem.q();
    const long max_iter = cfg.max_iter > 0 ? cfg.max_iter : kPgdDefaultMaxIter;

    LikelihoodEvaluator ev(problem);

    // Seed the step from the Lipschitz bound at the initial residuals.
    double residual_bound = 1e-8;
    for (const auto& g : problem.groups()) {
        residual_bound = std::max(residual_bound, (g.y - g.x_fixed * init.beta).norm());
    }
    const double lip = lipschitz_bound(problem, residual_bound);
    double alpha = (std::isfinite(lip) && lip > 0.0) ? 1.0 / lip : 1.0;

    EvalRequest grad_req;
    grad_req.grad = true;

    Eigen::VectorXd x = init.stacked();
    const LikelihoodParts& parts0 = ev.eval(init, grad_req);
    double f = parts0.value;
    Eigen::VectorXd g = parts0.grad_stacked();

    FitResult res;
    res.status = SolveStatus::MaxIter;
    res.trace.records.reserve(256);

    // The step test is armed only once a trial step has been rejected; before
    // that, alpha sits below the curvature scale of the seed bound and step
    // norms are artificially tiny.
    bool step_test_armed = false;

    for (long iter = 1; iter <= max_iter; ++iter) {
        Eigen::VectorXd cand;
        double f_cand = 0.0;
        bool accepted = false;
        int backtracks = 0;
        while (true) {
            cand = prox_block(reg, x - alpha * g, Eigen::VectorXd::Constant(p + q, alpha), p);
            const Eigen::VectorXd d = cand - x;
            f_cand = ev.eval(Params::from_stacked(cand, p)).value;
            const double bound =
                f + g.dot(d) + d.squaredNorm() / (2.0 * alpha) + 1e-12 * (1.0 + std::abs(f));
            if (f_cand <= bound) {
                accepted = true;
                break;
            }
            step_test_armed = true;
            if (++backtracks > cfg.line_search.max_backtracks) break;
            alpha *= cfg.line_search.shrink;
        }

        const double step_norm = (cand - x).norm();
        const double composite = f_cand + regularizer_value(reg, cand, p);
        res.trace.records.push_back({composite, step_norm, 0.0, alpha,
                                     cand.tail(q).minCoeff(), 0.0});
        res.iterations = iter;

        // An exact prox-gradient fixed point is stationary at any step size.
        const bool small_step =
            step_norm == 0.0 || (step_test_armed && step_norm <= cfg.tol * (1.0 + x.norm()));
        x = cand;
        f = f_cand;
        res.final_residual = step_norm;
        if (small_step) {
            res.converged = true;
            res.status = SolveStatus::Converged;
            break;
        }
        if (!accepted) {
            res.status = SolveStatus::Stalled;
            break;
        }

        const LikelihoodParts& parts = ev.eval(Params::from_stacked(x, p), grad_req);
        g = parts.grad_stacked();
        alpha = std::min(alpha * cfg.line_search.grow, 1e12);
    }

    res.params = Params::from_stacked(x, p);
    res.objective = f;
    res.nll_evals = ev.value_evals();
    res.grad_evals = ev.grad_evals();
    return res;
}

// ---------------------------------------------------------------------------
// Interior-point inner solve
// ---------------------------------------------------------------------------

InnerSolveResult ip_inner_solve_detail(const LMEProblem& problem, const Params& anchor,
                                       const SolverConfig& cfg) {
    check_init_sizes(problem, anchor, "ip_inner_solve");
    if (!(cfg.eta > 0.0)) throw std::invalid_argument("ip_inner_solve: eta must be > 0");
    const Eigen::Index p = problem.p();
    const Eigen::Index q = problem.q();
    const double eta = cfg.eta;
    const double lam_bar = cfg.lam_bar;

    LikelihoodEvaluator ev(problem);
    EvalRequest newton_req;
    newton_req.grad = newton_req.hess_beta = newton_req.hess_cross = newton_req.fisher = true;
    EvalRequest grad_req;
    grad_req.grad = true;

    Eigen::VectorXd beta = anchor.beta;
    Eigen::VectorXd gamma = anchor.gamma.cwiseMax(0.1);  // strictly interior start
    Eigen::VectorXd v = Eigen::VectorXd::Ones(q);
    double mu = v.dot(gamma) / static_cast<double>(q);

    InnerSolveResult out;
    out.min_gamma = gamma.minCoeff();
    out.min_v = v.minCoeff();
    int consecutive_failures = 0;

    for (long iter = 1; iter <= cfg.ip.max_iter; ++iter) {
        const LikelihoodParts& parts = ev.eval({beta, gamma}, newton_req);
        Eigen::VectorXd g =
            kkt_residual(parts, v, beta, gamma, anchor.beta, anchor.gamma, mu, eta, lam_bar);
        double gnorm = g.norm();
        if (gnorm <= cfg.tol && mu <= cfg.tol) {
            out.params = {beta, gamma};
            out.v = v;
            out.iterations = iter - 1;
            out.final_residual = gnorm;
            out.final_mu = mu;
            out.nll_evals = ev.value_evals();
            out.grad_evals = ev.grad_evals();
            return out;
        }

        // Barrier phase end: once the system is solved to a mu-proportional
        // tolerance, tighten mu toward the duality gap. Dropping mu faster
        // than the iterates track the central path pins the duals near zero
        // and wedges the Newton direction.
        if (gnorm <= std::max(cfg.ip.centrality_factor * mu, cfg.tol)) {
            mu = cfg.ip.mu_decay * v.dot(gamma) / static_cast<double>(q);
            g = kkt_residual(parts, v, beta, gamma, anchor.beta, anchor.gamma, mu, eta,
                             lam_bar);
            gnorm = g.norm();
        }

        const Eigen::MatrixXd jac = kkt_matrix(parts, v, gamma, eta, lam_bar);
        const Eigen::VectorXd d = newton_direction(jac, -g, cfg.ip.newton_ridge);
        const Eigen::VectorXd dv = d.head(q);
        const Eigen::VectorXd db = d.segment(q, p);
        const Eigen::VectorXd dg = d.tail(q);

        double a = cfg.ip.fraction_to_boundary *
                   std::min(fraction_to_boundary(gamma, dg, 1.0),
                            fraction_to_boundary(v, dv, 1.0));

        bool accepted = false;
        for (int t = 0; t <= cfg.ip.max_step_halvings; ++t) {
            const Eigen::VectorXd nb = beta + a * db;
            const Eigen::VectorXd ng = gamma + a * dg;
            const Eigen::VectorXd nv = v + a * dv;
            if (ng.minCoeff() > 0.0 && nv.minCoeff() > 0.0) {
                const LikelihoodParts& trial = ev.eval({nb, ng}, grad_req);
                const Eigen::VectorXd g_trial = kkt_residual(trial, nv, nb, ng, anchor.beta,
                                                             anchor.gamma, mu, eta, lam_bar);
                if (g_trial.norm() <= cfg.ip.descent_factor * gnorm ||
                    g_trial.norm() <= cfg.tol) {
                    beta = nb;
                    gamma = ng;
                    v = nv;
                    accepted = true;
                    break;
                }
            }
            a *= 0.5;
        }

        if (!accepted) {
            // No step length reached sufficient descent; tighten the barrier
            // target and retry from the same iterate.
            mu *= 0.5;
            if (++consecutive_failures > cfg.ip.max_consecutive_failures) {
                throw SolverStalled("ip_inner_solve: no residual descent after repeated mu tightening");
            }
            continue;
        }
        consecutive_failures = 0;
        out.min_gamma = std::min(out.min_gamma, gamma.minCoeff());
        out.min_v = std::min(out.min_v, v.minCoeff());
    }
    throw MaxIterExceeded("ip_inner_solve: Newton budget exhausted before reaching tolerance");
}

Params ip_inner_solve(const LMEProblem& problem, const Params& anchor,
                      const SolverConfig& cfg) {
    return ip_inner_solve_detail(problem, anchor, cfg).params;
}

// ---------------------------------------------------------------------------
// MSR3: fully converged inner solve per prox step
// ---------------------------------------------------------------------------

FitResult msr3_fit(const LMEProblem& problem, const BlockRegularizer& reg,
                   const SolverConfig& cfg, const Params& init_w) {
    check_init_sizes(problem, init_w, "msr3_fit");
    if (!init_w.feasible() || init_w.gamma.maxCoeff() > reg.gamma_upper) {
        throw std::invalid_argument("msr3_fit: init gamma must lie in [0, gamma_upper]");
    }
    const Eigen::Index p = problem.p();
    const Eigen::Index q = problem.q();
    const long max_outer = cfg.max_iter > 0 ? cfg.max_iter : kMsr3DefaultMaxOuter;

    // Block-specific prox steps of the value-function iteration.
    Eigen::VectorXd step(p + q);
    step.head(p).setConstant(1.0 / cfg.eta);
    step.tail(q).setConstant(1.0 / (cfg.eta + cfg.lam_bar));

    LikelihoodEvaluator ev(problem);
    FitResult res;
    res.status = SolveStatus::MaxIter;

    Params w = init_w;
    for (long iter = 1; iter <= max_outer; ++iter) {
        const InnerSolveResult inner = ip_inner_solve_detail(problem, w, cfg);
        const Eigen::VectorXd w_next = prox_block(reg, inner.params.stacked(), step, p);
        const double step_norm = (w_next - w.stacked()).norm();
        const bool small_step = step_norm <= cfg.tol * (1.0 + w.stacked().norm());

        res.nll_evals += inner.nll_evals;
        res.grad_evals += inner.grad_evals;
        w = Params::from_stacked(w_next, p);
        res.dense_params = inner.params;
        res.objective = ev.eval(w).value;
        res.final_residual = inner.final_residual;
        res.final_mu = inner.final_mu;
        res.iterations = iter;
        res.trace.records.push_back({res.objective, inner.final_residual, inner.final_mu,
                                     step_norm, inner.min_gamma, inner.min_v});
        if (small_step) {
            res.converged = true;
            res.status = SolveStatus::Converged;
            break;
        }
    }
    res.params = w;
    res.nll_evals += ev.value_evals();
    return res;
}

// ---------------------------------------------------------------------------
// MSR3-Fast: one Newton step per iteration, prox near the central path
// ---------------------------------------------------------------------------

FitResult msr3_fast_fit(const LMEProblem& problem, const BlockRegularizer& reg,
                        const SolverConfig& cfg, const Params& init) {
    check_init_sizes(problem, init, "msr3_fast_fit");
    if (!(init.gamma.minCoeff() > 0.0)) {
        throw std::invalid_argument("msr3_fast_fit: init gamma must be strictly positive");
    }
    const Eigen::Index p = problem.p();
    const Eigen::Index q = problem.q();
    const double eta = cfg.eta;
    const double lam_bar = cfg.lam_bar;
    const long max_iter = cfg.max_iter > 0 ? cfg.max_iter : kMsr3FastDefaultMaxIter;

    LikelihoodEvaluator ev(problem);
    EvalRequest newton_req;
    newton_req.grad = newton_req.hess_beta = newton_req.hess_cross = newton_req.fisher = true;
    EvalRequest grad_req;
    grad_req.grad = true;

    Eigen::VectorXd beta = init.beta;
    Eigen::VectorXd gamma = init.gamma;
    Eigen::VectorXd beta_s = beta;    // sparse anchor
    Eigen::VectorXd gamma_s = gamma;  // sparse anchor
    Eigen::VectorXd v = Eigen::VectorXd::Ones(q);
    double mu = v.dot(gamma) / (10.0 * static_cast<double>(q));

    FitResult res;
    res.status = SolveStatus::MaxIter;
    res.iterations = 0;
    bool progress = true;
    int consecutive_failures = 0;

    for (long iter = 1; iter <= max_iter; ++iter) {
        const LikelihoodParts& parts = ev.eval({beta, gamma}, newton_req);
        const Eigen::VectorXd g =
            kkt_residual(parts, v, beta, gamma, beta_s, gamma_s, mu, eta, lam_bar);
        const double gnorm = g.norm();
        res.final_residual = gnorm;
        res.final_mu = mu;
        if (gnorm <= cfg.tol && mu <= cfg.tol) {
            res.converged = true;
            res.status = SolveStatus::Converged;
            break;
        }
        if (!progress) {
            res.status = SolveStatus::Stalled;
            break;
        }

        const Eigen::MatrixXd jac = kkt_matrix(parts, v, gamma, eta, lam_bar);
        const Eigen::VectorXd d = newton_direction(jac, -g, cfg.ip.newton_ridge);
        const Eigen::VectorXd dv = d.head(q);
        const Eigen::VectorXd db = d.segment(q, p);
        const Eigen::VectorXd dg = d.tail(q);

        double a = cfg.ip.fraction_to_boundary *
                   std::min(fraction_to_boundary(gamma, dg, 1.0),
                            fraction_to_boundary(v, dv, 1.0));

        bool accepted = false;
        Eigen::VectorXd nb, ng, nv;
        double f_new = parts.value;
        double gnorm_new = gnorm;
        for (int t = 0; t <= cfg.ip.max_step_halvings; ++t) {
            nb = beta + a * db;
            ng = gamma + a * dg;
            nv = v + a * dv;
            if (ng.minCoeff() > 0.0 && nv.minCoeff() > 0.0) {
                const LikelihoodParts& trial = ev.eval({nb, ng}, grad_req);
                const Eigen::VectorXd g_trial =
                    kkt_residual(trial, nv, nb, ng, beta_s, gamma_s, mu, eta, lam_bar);
                if (g_trial.norm() <= cfg.ip.descent_factor * gnorm ||
                    g_trial.norm() <= cfg.tol) {
                    f_new = trial.value;
                    gnorm_new = g_trial.norm();
                    accepted = true;
                    break;
                }
            }
            a *= 0.5;
        }

        res.iterations = iter;
        if (!accepted) {
            mu *= 0.5;
            res.trace.records.push_back({parts.value, gnorm, mu, 0.0, gamma.minCoeff(),
                                         v.minCoeff()});
            if (++consecutive_failures > cfg.ip.max_consecutive_failures) {
                res.status = SolveStatus::Stalled;
                break;
            }
            continue;
        }
        consecutive_failures = 0;

        bool moved = (nb - beta).norm() >= cfg.tol * (1.0 + beta.norm()) ||
                     (ng - gamma).norm() >= cfg.tol * (1.0 + gamma.norm());
        beta = nb;
        gamma = ng;
        v = nv;

        // Anchor/prox update only near the central path.
        const double gap = gamma.dot(v);
        const double mean_gap = gap / static_cast<double>(q);
        const double centrality =
            (gamma.cwiseProduct(v).array() - mean_gap).matrix().norm();
        if (centrality <= cfg.ip.centrality_factor * mean_gap) {
            Eigen::VectorXd stacked(p + q);
            stacked << beta, gamma;
            const Eigen::VectorXd w =
                prox_block(reg, stacked, Eigen::VectorXd::Constant(p + q, a), p);
            moved = moved || (w.head(p) - beta_s).norm() >= cfg.tol * (1.0 + beta_s.norm()) ||
                    (w.tail(q) - gamma_s).norm() >= cfg.tol * (1.0 + gamma_s.norm());
            beta_s = w.head(p);
            gamma_s = w.tail(q);
            mu = 0.1 * gap / static_cast<double>(q);
        }
        progress = moved;
        res.trace.records.push_back({f_new, gnorm_new, mu, a, gamma.minCoeff(), v.minCoeff()});
    }

    res.params = {beta_s, gamma_s};
    res.dense_params = Params{beta, gamma};
    res.objective = ev.eval(res.params).value;
    res.nll_evals = ev.value_evals();
    res.grad_evals = ev.grad_evals();
    return res;
}

}  // namespace mixedsel
