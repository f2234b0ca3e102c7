#include "mixedsel/synthetic.hpp"

#include <cmath>

#include "mixedsel/errors.hpp"
#include "mixedsel/rng.hpp"

namespace mixedsel {

void SyntheticSpec::validate() const {
    if (p < 1 || q < 1) throw InvalidSpec("SyntheticSpec: p and q must be >= 1");
    if (true_beta.size() != p) throw InvalidSpec("SyntheticSpec: true_beta must have length p");
    if (true_gamma.size() != q) throw InvalidSpec("SyntheticSpec: true_gamma must have length q");
    if (true_gamma.size() > 0 && true_gamma.minCoeff() < 0.0) {
        throw InvalidSpec("SyntheticSpec: true_gamma must be >= 0");
    }
    if (group_sizes.empty()) throw InvalidSpec("SyntheticSpec: group_sizes must be nonempty");
    for (auto n : group_sizes) {
        if (n < 1) throw InvalidSpec("SyntheticSpec: group sizes must be >= 1");
    }
    if (!(obs_std > 0.0)) throw InvalidSpec("SyntheticSpec: obs_std must be > 0");
}

SyntheticSpec SyntheticSpec::gbd_synthetic(std::uint64_t seed) {
    SyntheticSpec spec;
    spec.p = 20;
    spec.q = 20;
    spec.true_beta = Eigen::VectorXd::Zero(20);
    for (int j = 0; j < 10; ++j) spec.true_beta[j] = (j + 1) / 2.0;
    spec.true_gamma = spec.true_beta;
    spec.group_sizes = {10, 15, 4, 8, 3, 5, 18, 9, 6};
    spec.obs_std = 0.3;
    spec.z_equals_x = true;
    spec.seed = seed;
    return spec;
}

GeneratedProblem generate(const SyntheticSpec& spec) {
    spec.validate();
    NormalStream rng(spec.seed);
    const double var = spec.obs_std * spec.obs_std;

    std::vector<GroupBlock> groups;
    groups.reserve(spec.group_sizes.size());
    for (const Eigen::Index n : spec.group_sizes) {
        Eigen::MatrixXd x(n, spec.p);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < spec.p; ++j) x(i, j) = rng.normal();
        }
        Eigen::MatrixXd z;
        if (spec.z_equals_x) {
            z = x;
        } else {
            z.resize(n, spec.q);
            for (Eigen::Index i = 0; i < n; ++i) {
                for (Eigen::Index j = 0; j < spec.q; ++j) z(i, j) = rng.normal();
            }
        }
        Eigen::VectorXd u(spec.q);
        for (Eigen::Index j = 0; j < spec.q; ++j) {
            u[j] = std::sqrt(spec.true_gamma[j]) * rng.normal();
        }
        Eigen::VectorXd eps(n);
        for (Eigen::Index i = 0; i < n; ++i) eps[i] = spec.obs_std * rng.normal();

        Eigen::VectorXd y = x * spec.true_beta + z * u + eps;
        groups.emplace_back(std::move(x), std::move(z), std::move(y),
                            Eigen::VectorXd::Constant(n, var));
    }

    return {LMEProblem(std::move(groups)), Params{spec.true_beta, spec.true_gamma}};
}

}  // namespace mixedsel
