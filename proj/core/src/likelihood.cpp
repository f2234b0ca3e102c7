#include "mixedsel/likelihood.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "mixedsel/errors.hpp"

namespace mixedsel {

namespace {

// Omega = Z Diag(gamma) Z^T + Diag(obs_var), written into `omega`.
void build_omega(const GroupBlock& g, const Eigen::VectorXd& gamma, Eigen::MatrixXd& omega) {
    omega.noalias() = g.z_random * gamma.asDiagonal() * g.z_random.transpose();
    omega.diagonal() += g.obs_var;
}

void check_factor(const Eigen::LLT<Eigen::MatrixXd>& llt) {
    if (llt.info() != Eigen::Success) {
        throw FactorizationFailure("Omega is numerically non-PD (check obs_var > 0 and inputs for NaN)");
    }
    const auto diag = llt.matrixLLT().diagonal();
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag[i] > 0.0) || !std::isfinite(diag[i])) {
            throw FactorizationFailure("Omega factor has a non-positive or non-finite pivot");
        }
    }
}

}  // namespace

OmegaFactor::OmegaFactor(const GroupBlock& group, const Eigen::VectorXd& gamma) {
    if (gamma.size() != group.z_random.cols()) {
        throw std::invalid_argument("assemble_omega: gamma size disagrees with z_random");
    }
    Eigen::MatrixXd omega;
    build_omega(group, gamma, omega);
    Eigen::LLT<Eigen::MatrixXd> llt(omega);
    check_factor(llt);
    chol_ = llt.matrixL();
}

double OmegaFactor::log_det() const {
    return 2.0 * chol_.diagonal().array().log().sum();
}

Eigen::MatrixXd OmegaFactor::solve_lower(const Eigen::MatrixXd& rhs) const {
    return chol_.triangularView<Eigen::Lower>().solve(rhs);
}

Eigen::VectorXd OmegaFactor::solve_lower(const Eigen::VectorXd& rhs) const {
    return chol_.triangularView<Eigen::Lower>().solve(rhs);
}

OmegaFactor assemble_omega(const GroupBlock& group, const Eigen::VectorXd& gamma) {
    return OmegaFactor(group, gamma);
}

Eigen::VectorXd LikelihoodParts::grad_stacked() const {
    Eigen::VectorXd g(grad_beta.size() + grad_gamma.size());
    g << grad_beta, grad_gamma;
    return g;
}

LikelihoodEvaluator::LikelihoodEvaluator(const LMEProblem& problem) : problem_(&problem) {
    const Eigen::Index p = problem.p();
    const Eigen::Index q = problem.q();
    Eigen::Index max_n = 0;
    for (const auto& g : problem.groups()) max_n = std::max(max_n, g.rows());

    llt_.resize(static_cast<std::size_t>(problem.n_groups()));
    omega_.resize(max_n, max_n);
    zscaled_.resize(max_n, q);
    xw_.resize(max_n, p);
    zw_.resize(max_n, q);
    xi_.resize(max_n);
    s_.resize(q);
    m_.resize(q, q);
    outer_.resize(q, q);

    parts_.grad_beta.resize(p);
    parts_.grad_gamma.resize(q);
    parts_.hess_beta.resize(p, p);
    parts_.hess_cross.resize(p, q);
    parts_.hess_gamma.resize(q, q);
    parts_.fisher.resize(q, q);
}

const LikelihoodParts& LikelihoodEvaluator::eval(const Params& params, const EvalRequest& req) {
    const LMEProblem& prob = *problem_;
    const Eigen::Index p = prob.p();
    const Eigen::Index q = prob.q();
    if (params.p() != p || params.q() != q) {
        throw std::invalid_argument("eval_likelihood: parameter sizes disagree with the problem");
    }

    const bool need_gamma_cols =
        req.grad || req.hess_cross || req.hess_gamma || req.fisher;
    const bool need_beta_cols = req.grad || req.hess_beta || req.hess_cross;
    const bool need_m = req.hess_gamma || req.fisher;

    parts_.value = 0.0;
    if (req.grad) {
        parts_.grad_beta.setZero();
        parts_.grad_gamma.setZero();
    }
    if (req.hess_beta) parts_.hess_beta.setZero();
    if (req.hess_cross) parts_.hess_cross.setZero();
    if (req.hess_gamma) parts_.hess_gamma.setZero();
    if (req.fisher) parts_.fisher.setZero();

    for (Eigen::Index gi = 0; gi < prob.n_groups(); ++gi) {
        const GroupBlock& g = prob.group(gi);
        const Eigen::Index n = g.rows();

        auto omega = omega_.topLeftCorner(n, n);
        auto zs = zscaled_.topLeftCorner(n, q);
        zs.noalias() = g.z_random * params.gamma.asDiagonal();
        omega.noalias() = zs * g.z_random.transpose();
        omega.diagonal() += g.obs_var;

        auto& llt = llt_[static_cast<std::size_t>(gi)];
        llt.compute(omega);
        check_factor(llt);
        const auto lower = llt.matrixLLT().triangularView<Eigen::Lower>();

        parts_.value += llt.matrixLLT().diagonal().array().log().sum();  // 1/2 ln det

        auto xi = xi_.head(n);
        xi = g.y;
        xi.noalias() -= g.x_fixed * params.beta;
        lower.solveInPlace(xi);
        parts_.value += 0.5 * xi.squaredNorm();

        if (!need_beta_cols && !need_gamma_cols) continue;

        auto xt = xw_.topLeftCorner(n, p);
        if (need_beta_cols) {
            xt = g.x_fixed;
            lower.solveInPlace(xt);
        }

        // Whitened random design; aliases the fixed one when Z == X.
        const bool reuse_x = g.z_is_x && need_beta_cols;
        if (need_gamma_cols && !reuse_x) {
            auto z_fill = zw_.topLeftCorner(n, q);
            z_fill = g.z_random;
            lower.solveInPlace(z_fill);
        }
        auto zt = reuse_x ? xw_.topLeftCorner(n, q) : zw_.topLeftCorner(n, q);

        const bool need_s = req.grad || req.hess_cross || req.hess_gamma;
        if (need_s) s_.noalias() = zt.transpose() * xi;

        if (req.grad) {
            parts_.grad_beta.noalias() -= xt.transpose() * xi;
            for (Eigen::Index j = 0; j < q; ++j) {
                parts_.grad_gamma[j] += 0.5 * (zt.col(j).squaredNorm() - s_[j] * s_[j]);
            }
        }

        if (req.hess_beta) parts_.hess_beta.noalias() += xt.transpose() * xt;
        if (req.hess_cross) {
            parts_.hess_cross.noalias() += xt.transpose() * zt * s_.asDiagonal();
        }
        if (need_m) {
            m_.noalias() = zt.transpose() * zt;
            if (req.fisher) parts_.fisher += 0.5 * m_.cwiseProduct(m_);
            if (req.hess_gamma) {
                outer_.noalias() = s_ * s_.transpose();
                parts_.hess_gamma += m_.cwiseProduct(outer_ - 0.5 * m_);
            }
        }
    }

    // Exact symmetry for the quadratic blocks.
    if (req.hess_beta) {
        parts_.hess_beta = (0.5 * (parts_.hess_beta + parts_.hess_beta.transpose())).eval();
    }
    if (req.hess_gamma) {
        parts_.hess_gamma = (0.5 * (parts_.hess_gamma + parts_.hess_gamma.transpose())).eval();
    }
    if (req.fisher) {
        parts_.fisher = (0.5 * (parts_.fisher + parts_.fisher.transpose())).eval();
    }

    ++value_evals_;
    if (req.grad) ++grad_evals_;
    return parts_;
}

double nll(const LMEProblem& problem, const Params& params) {
    LikelihoodEvaluator ev(problem);
    return ev.eval(params).value;
}

Eigen::VectorXd grad(const LMEProblem& problem, const Params& params) {
    LikelihoodEvaluator ev(problem);
    EvalRequest req;
    req.grad = true;
    return ev.eval(params, req).grad_stacked();
}

Eigen::MatrixXd hessian_gamma(const LMEProblem& problem, const Params& params) {
    LikelihoodEvaluator ev(problem);
    EvalRequest req;
    req.hess_gamma = true;
    return ev.eval(params, req).hess_gamma;
}

Eigen::MatrixXd hessian_beta(const LMEProblem& problem, const Params& params) {
    LikelihoodEvaluator ev(problem);
    EvalRequest req;
    req.hess_beta = true;
    return ev.eval(params, req).hess_beta;
}

Eigen::MatrixXd hessian_cross(const LMEProblem& problem, const Params& params) {
    LikelihoodEvaluator ev(problem);
    EvalRequest req;
    req.hess_cross = true;
    return ev.eval(params, req).hess_cross;
}

Eigen::MatrixXd fisher_gamma(const LMEProblem& problem, const Params& params) {
    LikelihoodEvaluator ev(problem);
    EvalRequest req;
    req.fisher = true;
    return ev.eval(params, req).fisher;
}

Eigen::VectorXd beta_gls(const LMEProblem& problem, const Eigen::VectorXd& gamma) {
    const Eigen::Index p = problem.p();
    Eigen::MatrixXd normal = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p);
    for (const auto& g : problem.groups()) {
        OmegaFactor factor(g, gamma);
        Eigen::MatrixXd xt = factor.solve_lower(g.x_fixed);
        Eigen::VectorXd yt = factor.solve_lower(g.y);
        normal.noalias() += xt.transpose() * xt;
        rhs.noalias() += xt.transpose() * yt;
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const Eigen::VectorXd d = ldlt.vectorD();
    const double dmax = d.maxCoeff();
    if (ldlt.info() != Eigen::Success || !(dmax > 0.0) ||
        d.minCoeff() <= dmax * 1e-12) {
        throw SingularDesign("beta_gls: normal matrix is rank deficient (collinear fixed covariates)");
    }
    return ldlt.solve(rhs);
}

double lipschitz_bound(const LMEProblem& problem, double residual_bound) {
    if (!(residual_bound > 0.0)) {
        throw std::invalid_argument("lipschitz_bound: residual_bound must be positive");
    }
    double total = 0.0;
    for (const auto& g : problem.groups()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(
            Eigen::MatrixXd(g.x_fixed.transpose() * g.x_fixed), Eigen::EigenvaluesOnly);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ez(
            Eigen::MatrixXd(g.z_random.transpose() * g.z_random), Eigen::EigenvaluesOnly);
        const double x2 = std::max(0.0, ex.eigenvalues().maxCoeff());  // ||X||^2
        const double z2 = std::max(0.0, ez.eigenvalues().maxCoeff());  // ||Z||^2
        const double lam = g.obs_var.maxCoeff();                       // ||Lambda||
        const double x_term = x2 / lam;
        const double cross_term = residual_bound * std::sqrt(x2) * z2 / (lam * lam);
        const double z_term = residual_bound * z2 * z2 / (lam * lam * lam);
        total += std::max({x_term, cross_term, z_term});
    }
    return total;
}

}  // namespace mixedsel
