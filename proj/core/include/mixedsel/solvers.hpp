#pragma once

#include <optional>
#include <vector>

#include "mixedsel/likelihood.hpp"
#include "mixedsel/problem.hpp"
#include "mixedsel/regularizers.hpp"

namespace mixedsel {

struct LineSearchConfig {
    double shrink = 0.5;
    double grow = 1.1;
    int max_backtracks = 50;
};

struct InteriorPointConfig {
    double mu_decay = 0.1;             // centering factor for the barrier update
    double descent_factor = 0.99;      // accepted steps must shrink ||G|| by this
    double fraction_to_boundary = 0.99;
    double centrality_factor = 0.5;
    int max_iter = 500;                // inner Newton budget
    double newton_ridge = 1e-8;        // fallback diagonal added to a singular system
    int max_step_halvings = 30;
    int max_consecutive_failures = 5;
};

struct SolverConfig {
    double tol = 1e-6;
    long max_iter = 0;      // 0 = per-solver default (PGD 100000, MSR3 500, MSR3-Fast 5000)
    double eta = 1.0;       // relaxation strength
    double lam_bar = 0.0;   // weak-convexity constant for the gamma block
    LineSearchConfig line_search;
    InteriorPointConfig ip;
};

enum class SolveStatus { Converged, MaxIter, Stalled };

struct TraceRecord {
    double objective = 0.0;  // composite for PGD, nll at the relaxed iterate otherwise
    double residual = 0.0;   // ||G|| for interior-point solvers, step norm for PGD
    double mu = 0.0;
    double step = 0.0;
    double min_gamma = 0.0;
    double min_v = 0.0;
};

struct SolveTrace {
    std::vector<TraceRecord> records;
};

struct FitResult {
    Params params;                      // reported estimate (sparse iterate for MSR3 family)
    std::optional<Params> dense_params; // relaxed x-iterate (MSR3 family only)
    double objective = 0.0;             // nll at params
    long iterations = 0;
    bool converged = false;
    SolveStatus status = SolveStatus::MaxIter;
    double final_residual = 0.0;
    double final_mu = 0.0;
    long nll_evals = 0;
    long grad_evals = 0;
    SolveTrace trace;
};

/// Default start: beta = GLS at gamma = 1, gamma = 1 (strictly interior).
Params default_init(const LMEProblem& problem);

/// Proximal gradient descent on nll + R + indicator of {gamma in [0, upper]}.
FitResult pgd_fit(const LMEProblem& problem, const BlockRegularizer& reg,
                  const SolverConfig& cfg, const Params& init);

struct InnerSolveResult {
    Params params;          // minimizer of nll + kappa_eta(. - anchor) over gamma >= 0
    Eigen::VectorXd v;      // dual variables for gamma >= 0
    long iterations = 0;
    double final_residual = 0.0;
    double final_mu = 0.0;
    double min_gamma = 0.0;  // smallest gamma entry seen over all iterations
    double min_v = 0.0;      // smallest dual entry seen over all iterations
    long nll_evals = 0;
    long grad_evals = 0;
};

/// Interior-point solve of the anchored subproblem; full detail variant used
/// by the MSR3 outer loop and the test suites.
InnerSolveResult ip_inner_solve_detail(const LMEProblem& problem, const Params& anchor,
                                       const SolverConfig& cfg);
Params ip_inner_solve(const LMEProblem& problem, const Params& anchor,
                      const SolverConfig& cfg);

/// Relaxed selection: alternate a fully converged inner solve with a blockwise
/// prox step (beta step 1/eta, gamma step 1/(eta + lam_bar)).
FitResult msr3_fit(const LMEProblem& problem, const BlockRegularizer& reg,
                   const SolverConfig& cfg, const Params& init_w);

/// Interleaved variant: one Newton step per iteration, prox/anchor update only
/// near the central path. init gamma must be strictly positive.
FitResult msr3_fast_fit(const LMEProblem& problem, const BlockRegularizer& reg,
                        const SolverConfig& cfg, const Params& init);

}  // namespace mixedsel
