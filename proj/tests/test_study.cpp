#include "doctest.h"
#include "mixedsel/study.hpp"

using namespace mixedsel;

namespace {

StudyConfig small_study() {
    StudyConfig cfg;
    cfg.solvers = {SolverKind::Msr3Fast};
    cfg.regs = {PenaltyKind::L1, PenaltyKind::L0Ball};
    cfg.replications = 2;
    cfg.seed = 100;
    cfg.lam_range = {1e-3, 10.0};
    cfg.threads = 2;

    SyntheticSpec spec;
    spec.p = 6;
    spec.q = 6;
    spec.true_beta = Eigen::VectorXd::Zero(6);
    spec.true_beta.head(3) << 2.0, 1.5, 1.0;
    spec.true_gamma = Eigen::VectorXd::Zero(6);
    spec.true_gamma.head(3) << 1.5, 1.0, 0.8;
    spec.group_sizes = {10, 10, 10, 10};
    spec.obs_std = 0.3;
    cfg.base_spec = spec;
    return cfg;
}

}  // namespace

TEST_CASE("percentile interpolates order statistics") {
    const std::vector<double> v = {4.0, 1.0, 3.0, 2.0};
    CHECK(percentile(v, 0.5) == doctest::Approx(2.5));
    CHECK(percentile(v, 0.0) == doctest::Approx(1.0));
    CHECK(percentile(v, 1.0) == doctest::Approx(4.0));
    CHECK(percentile({5.0}, 0.25) == doctest::Approx(5.0));
}

TEST_CASE("run_study produces a deterministic grid of outcomes") {
    const StudyConfig cfg = small_study();
    const auto cells = run_study(cfg);
    REQUIRE(cells.size() == 2);
    for (const auto& cell : cells) {
        REQUIRE(cell.reps.size() == 2);
        for (const auto& rep : cell.reps) {
            REQUIRE(rep.ok);
            CHECK(rep.metrics.accuracy >= 0.0);
            CHECK(rep.metrics.accuracy <= 1.0);
            CHECK(rep.refit_iterations > 0);
        }
    }

    // Bit-identical accuracies on a rerun, including through the thread pool.
    const auto rerun = run_study(cfg);
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (std::size_t r = 0; r < cells[c].reps.size(); ++r) {
            CHECK(cells[c].reps[r].metrics.accuracy == rerun[c].reps[r].metrics.accuracy);
            CHECK(cells[c].reps[r].metrics.f1 == rerun[c].reps[r].metrics.f1);
            CHECK(cells[c].reps[r].refit_iterations == rerun[c].reps[r].refit_iterations);
        }
    }

    CHECK(solver_name(SolverKind::Msr3Fast) == "msr3-fast");
    CHECK(reg_name(PenaltyKind::L0Ball) == "l0");
}
