#include "mixedsel/problem.hpp"

#include <stdexcept>
#include <utility>

namespace mixedsel {

GroupBlock::GroupBlock(Eigen::MatrixXd x, Eigen::MatrixXd z, Eigen::VectorXd outcomes,
                       Eigen::VectorXd variances)
    : x_fixed(std::move(x)),
      z_random(std::move(z)),
      y(std::move(outcomes)),
      obs_var(std::move(variances)) {
    const Eigen::Index n = y.size();
    if (n < 1) {
        throw std::invalid_argument("GroupBlock: a group needs at least one observation");
    }
    if (x_fixed.rows() != n || z_random.rows() != n || obs_var.size() != n) {
        throw std::invalid_argument("GroupBlock: row counts of x_fixed, z_random, y and obs_var disagree");
    }
    if (!(obs_var.minCoeff() > 0.0)) {
        throw std::invalid_argument("GroupBlock: obs_var entries must be strictly positive");
    }
    z_is_x = x_fixed.rows() == z_random.rows() && x_fixed.cols() == z_random.cols() &&
             x_fixed == z_random;
}

LMEProblem::LMEProblem(std::vector<GroupBlock> groups, std::vector<std::string> fixed_names,
                       std::vector<std::string> random_names)
    : groups_(std::move(groups)),
      fixed_names_(std::move(fixed_names)),
      random_names_(std::move(random_names)) {
    if (groups_.empty()) {
        throw std::invalid_argument("LMEProblem: at least one group required");
    }
    p_ = groups_.front().x_fixed.cols();
    q_ = groups_.front().z_random.cols();
    if (p_ < 1 || q_ < 1) {
        throw std::invalid_argument("LMEProblem: need at least one fixed and one random covariate");
    }
    for (const auto& g : groups_) {
        if (g.x_fixed.cols() != p_ || g.z_random.cols() != q_) {
            throw std::invalid_argument("LMEProblem: covariate counts differ across groups");
        }
        n_ += g.rows();
    }
    if (fixed_names_.empty()) {
        for (Eigen::Index j = 0; j < p_; ++j) fixed_names_.push_back("f_" + std::to_string(j + 1));
    }
    if (random_names_.empty()) {
        for (Eigen::Index j = 0; j < q_; ++j) random_names_.push_back("r_" + std::to_string(j + 1));
    }
    if (static_cast<Eigen::Index>(fixed_names_.size()) != p_ ||
        static_cast<Eigen::Index>(random_names_.size()) != q_) {
        throw std::invalid_argument("LMEProblem: covariate name counts disagree with designs");
    }
}

Eigen::VectorXd Params::stacked() const {
    Eigen::VectorXd x(beta.size() + gamma.size());
    x << beta, gamma;
    return x;
}

Params Params::from_stacked(const Eigen::VectorXd& x, Eigen::Index p) {
    if (p < 0 || p > x.size()) {
        throw std::invalid_argument("Params::from_stacked: bad split point");
    }
    return {x.head(p), x.tail(x.size() - p)};
}

}  // namespace mixedsel
