#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

namespace mixedsel {

/// One group of observations: fixed/random designs, outcomes, and the known
/// per-observation noise variances (the diagonal of Lambda_i).
struct GroupBlock {
    Eigen::MatrixXd x_fixed;   // n_i x p
    Eigen::MatrixXd z_random;  // n_i x q
    Eigen::VectorXd y;         // n_i
    Eigen::VectorXd obs_var;   // n_i, strictly positive

    GroupBlock(Eigen::MatrixXd x, Eigen::MatrixXd z, Eigen::VectorXd outcomes,
               Eigen::VectorXd variances);

    Eigen::Index rows() const { return y.size(); }

    // True when z_random is elementwise identical to x_fixed; evaluation
    // reuses the whitened fixed design in that case.
    bool z_is_x = false;
};

/// Immutable grouped dataset. Safe to share across threads once built.
class LMEProblem {
public:
    explicit LMEProblem(std::vector<GroupBlock> groups,
                        std::vector<std::string> fixed_names = {},
                        std::vector<std::string> random_names = {});

    const std::vector<GroupBlock>& groups() const { return groups_; }
    const GroupBlock& group(Eigen::Index i) const { return groups_[static_cast<std::size_t>(i)]; }
    Eigen::Index n_groups() const { return static_cast<Eigen::Index>(groups_.size()); }
    Eigen::Index p() const { return p_; }
    Eigen::Index q() const { return q_; }
    Eigen::Index total_n() const { return n_; }

    const std::vector<std::string>& fixed_names() const { return fixed_names_; }
    const std::vector<std::string>& random_names() const { return random_names_; }

private:
    std::vector<GroupBlock> groups_;
    Eigen::Index p_ = 0;
    Eigen::Index q_ = 0;
    Eigen::Index n_ = 0;
    std::vector<std::string> fixed_names_;
    std::vector<std::string> random_names_;
};

/// Optimization point x = (beta, gamma) with gamma >= 0 elementwise.
struct Params {
    Eigen::VectorXd beta;   // p
    Eigen::VectorXd gamma;  // q

    Params() = default;
    Params(Eigen::VectorXd b, Eigen::VectorXd g)
        : beta(std::move(b)), gamma(std::move(g)) {}

    static Params zero(Eigen::Index p, Eigen::Index q) {
        return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(q)};
    }

    Eigen::Index p() const { return beta.size(); }
    Eigen::Index q() const { return gamma.size(); }

    bool feasible() const { return gamma.size() == 0 || gamma.minCoeff() >= 0.0; }

    Eigen::VectorXd stacked() const;
    static Params from_stacked(const Eigen::VectorXd& x, Eigen::Index p);
};

}  // namespace mixedsel
