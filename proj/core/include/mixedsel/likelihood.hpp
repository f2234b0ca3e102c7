#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <vector>

#include "mixedsel/problem.hpp"

namespace mixedsel {

/// Lower-triangular Cholesky factor of one group's marginal covariance
/// Omega_i(gamma) = Z_i Diag(gamma) Z_i^T + Diag(obs_var).
class OmegaFactor {
public:
    OmegaFactor(const GroupBlock& group, const Eigen::VectorXd& gamma);

    const Eigen::MatrixXd& matrix_l() const { return chol_; }
    double log_det() const;  // ln det Omega

    // L^{-1} * rhs via a forward triangular solve.
    Eigen::MatrixXd solve_lower(const Eigen::MatrixXd& rhs) const;
    Eigen::VectorXd solve_lower(const Eigen::VectorXd& rhs) const;

private:
    Eigen::MatrixXd chol_;
};

OmegaFactor assemble_omega(const GroupBlock& group, const Eigen::VectorXd& gamma);

struct EvalRequest {
    bool grad = false;
    bool hess_beta = false;
    bool hess_cross = false;
    bool hess_gamma = false;
    bool fisher = false;
};

struct LikelihoodParts {
    double value = 0.0;
    Eigen::VectorXd grad_beta;   // p
    Eigen::VectorXd grad_gamma;  // q
    Eigen::MatrixXd hess_beta;   // p x p
    Eigen::MatrixXd hess_cross;  // p x q
    Eigen::MatrixXd hess_gamma;  // q x q
    Eigen::MatrixXd fisher;      // q x q

    Eigen::VectorXd grad_stacked() const;
};

/// Single-pass evaluator with reusable per-group scratch storage. Not thread
/// safe; each solver run owns one.
class LikelihoodEvaluator {
public:
    explicit LikelihoodEvaluator(const LMEProblem& problem);

    const LikelihoodParts& eval(const Params& params, const EvalRequest& req = {});

    const LMEProblem& problem() const { return *problem_; }
    long value_evals() const { return value_evals_; }
    long grad_evals() const { return grad_evals_; }

private:
    const LMEProblem* problem_;
    LikelihoodParts parts_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_;
    Eigen::MatrixXd omega_, zscaled_, xw_, zw_;
    Eigen::MatrixXd m_, outer_;
    Eigen::VectorXd xi_, s_;
    long value_evals_ = 0;
    long grad_evals_ = 0;
};

// Marginal negative log-likelihood and its derivative blocks. Convenience
// wrappers over LikelihoodEvaluator.
double nll(const LMEProblem& problem, const Params& params);
Eigen::VectorXd grad(const LMEProblem& problem, const Params& params);  // p+q
Eigen::MatrixXd hessian_gamma(const LMEProblem& problem, const Params& params);
Eigen::MatrixXd hessian_beta(const LMEProblem& problem, const Params& params);
Eigen::MatrixXd hessian_cross(const LMEProblem& problem, const Params& params);  // p x q
Eigen::MatrixXd fisher_gamma(const LMEProblem& problem, const Params& params);

/// Generalized least-squares solution for beta at fixed gamma.
Eigen::VectorXd beta_gls(const LMEProblem& problem, const Eigen::VectorXd& gamma);

/// Upper bound on the gradient Lipschitz constant given a bound on the
/// per-group residual norms; used only to seed line searches.
double lipschitz_bound(const LMEProblem& problem, double residual_bound);

}  // namespace mixedsel
