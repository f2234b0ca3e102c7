#pragma once

#include <cstdint>
#include <vector>

#include "mixedsel/problem.hpp"

namespace mixedsel {

/// Recipe for a simulated grouped dataset. Generation is deterministic given
/// the seed; the draw order per group is X (row-major), then Z when it is not
/// tied to X, then the random effects u, then the noise.
struct SyntheticSpec {
    Eigen::Index p = 0;
    Eigen::Index q = 0;
    Eigen::VectorXd true_beta;
    Eigen::VectorXd true_gamma;
    std::vector<Eigen::Index> group_sizes;
    double obs_std = 0.3;
    bool z_equals_x = true;
    std::uint64_t seed = 0;

    void validate() const;  // throws InvalidSpec

    /// 9 groups of sizes [10,15,4,8,3,5,18,9,6], p = q = 20,
    /// beta = gamma = [0.5, 1.0, ..., 5.0, 0 x 10], noise std 0.3, Z = X.
    static SyntheticSpec gbd_synthetic(std::uint64_t seed);
};

struct GeneratedProblem {
    LMEProblem problem;
    Params truth;
};

GeneratedProblem generate(const SyntheticSpec& spec);

}  // namespace mixedsel
