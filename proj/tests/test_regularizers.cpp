#include <cmath>
#include <limits>

#include "doctest.h"
#include "mixedsel/errors.hpp"
#include "mixedsel/regularizers.hpp"
#include "mixedsel/rng.hpp"
#include "oracles.hpp"

using namespace mixedsel;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double prox_objective(const Penalty& pen, double y, double z, double alpha) {
    switch (pen.kind) {
        case PenaltyKind::L1:
            return oracles::pen_l1(pen.lam, y) + (y - z) * (y - z) / (2.0 * alpha);
        case PenaltyKind::ALasso:
            return oracles::pen_alasso(pen.lam, pen.weight, y) + (y - z) * (y - z) / (2.0 * alpha);
        case PenaltyKind::Scad:
            return oracles::pen_scad(pen.sigma, pen.rho, y) + (y - z) * (y - z) / (2.0 * alpha);
        case PenaltyKind::Cad:
            return oracles::pen_cad(pen.lam, pen.rho, y) + (y - z) * (y - z) / (2.0 * alpha);
        default:
            return (y - z) * (y - z) / (2.0 * alpha);
    }
}

// Oracle agreement: the returned point must be a global minimizer. At a
// near-tie between basins the grid may land in the other one, in which case
// the objective gap must vanish instead of the argument gap.
void check_against_grid(const Penalty& pen, double z, double alpha) {
    const auto r = [&](double y) { return prox_objective(pen, y, z, alpha); };
    const double got = prox_scalar(pen, z, alpha);
    const auto grid = oracles::grid_prox(r, -std::abs(z) - 1.0, std::abs(z) + 1.0);
    const double f_got = r(got);
    CHECK(f_got <= grid.value + 1e-6);
    const bool arg_close = std::abs(got - grid.arg) <= 1e-3;
    const bool value_tie = std::abs(f_got - grid.value) <= 1e-6;
    CHECK((arg_close || value_tie));
}

void check_boxed_against_grid(const Penalty& pen, double z, double alpha, double upper) {
    const auto r = [&](double y) { return prox_objective(pen, y, z, alpha); };
    const double got = prox_scalar_boxed(pen, z, alpha, upper);
    CHECK(got >= 0.0);
    CHECK(got <= upper);
    const double hi = std::min(upper, std::abs(z) + 1.0);
    const auto grid = oracles::grid_prox(r, 0.0, hi);
    const double f_got = r(got);
    CHECK(f_got <= grid.value + 1e-6);
    const bool arg_close = std::abs(got - grid.arg) <= 1e-3;
    const bool value_tie = std::abs(f_got - grid.value) <= 1e-6;
    CHECK((arg_close || value_tie));
}

}  // namespace

TEST_CASE("prox_scalar closed-form examples") {
    CHECK(prox_scalar(Penalty::l1(1.0), 2.0, 0.5) == doctest::Approx(1.5));
    CHECK(prox_scalar(Penalty::l1(1.0), 0.3, 0.5) == doctest::Approx(0.0));
    CHECK(prox_scalar(Penalty::scad(1.0, 3.7), 2.5, 1.0) ==
          doctest::Approx(1.7941176470588236).epsilon(1e-12));
    CHECK(prox_scalar(Penalty::cad(1.0, 2.0), 5.0, 1.0) == doctest::Approx(5.0));
}

TEST_CASE("prox parameter validation") {
    CHECK_THROWS_AS(prox_scalar(Penalty::l1(1.0), 1.0, 0.0), InvalidPenaltyParams);
    CHECK_THROWS_AS(Penalty::scad(0.0, 3.7), InvalidPenaltyParams);
    CHECK_THROWS_AS(Penalty::scad(1.0, 1.0), InvalidPenaltyParams);
    CHECK_THROWS_AS(Penalty::cad(1.0, 0.0), InvalidPenaltyParams);
    CHECK_THROWS_AS(Penalty::alasso(1.0, -1.0), InvalidPenaltyParams);
    CHECK_THROWS_AS(prox_scalar_boxed(Penalty::l1(1.0), 1.0, 1.0, 0.0), InvalidPenaltyParams);
}

TEST_CASE("prox_scalar_boxed follows the box case split") {
    // L1 with lam = 1: z beyond upper + alpha*lam pins to the bound.
    CHECK(prox_scalar_boxed(Penalty::l1(1.0), 2.0, 0.5, 1.0) == doctest::Approx(1.0));
    // Negative input maps to zero for every penalty.
    CHECK(prox_scalar_boxed(Penalty::l1(1.0), -3.0, 0.5, 1.0) == doctest::Approx(0.0));
    CHECK(prox_scalar_boxed(Penalty::scad(1.0, 3.7), -3.0, 1.0, 10.0) == doctest::Approx(0.0));
    CHECK(prox_scalar_boxed(Penalty::cad(1.0, 2.0), -3.0, 1.0, 10.0) == doctest::Approx(0.0));
    // SCAD soft-threshold region inside the box.
    CHECK(prox_scalar_boxed(Penalty::scad(1.0, 3.7), 0.5, 1.0, 10.0) == doctest::Approx(0.0));
}

TEST_CASE("prox oracle equivalence on random draws") {
    NormalStream rng(31);
    for (int rep = 0; rep < 200; ++rep) {
        const double z = rng.uniform(-5.0, 5.0);
        const double alpha = rng.uniform(0.05, 2.0);
        check_against_grid(Penalty::l1(rng.uniform(0.0, 2.0)), z, alpha);
        check_against_grid(Penalty::alasso(rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0)), z,
                           alpha);
        check_against_grid(Penalty::scad(rng.uniform(0.2, 2.0), rng.uniform(1.1, 5.0)), z,
                           alpha);
        check_against_grid(Penalty::cad(rng.uniform(0.0, 2.0), rng.uniform(0.2, 3.0)), z,
                           alpha);
    }
}

TEST_CASE("boxed prox oracle equivalence on random draws") {
    NormalStream rng(32);
    for (int rep = 0; rep < 200; ++rep) {
        const double z = rng.uniform(-5.0, 5.0);
        const double alpha = rng.uniform(0.05, 2.0);
        {
            const double upper = rng.uniform(0.2, 4.0);
            check_boxed_against_grid(Penalty::l1(rng.uniform(0.0, 2.0)), z, alpha, upper);
            check_boxed_against_grid(Penalty::alasso(rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0)),
                                     z, alpha, upper);
        }
        {
            // The CAD/SCAD case split is exact once the bound sits past the
            // flat region of the penalty.
            const double sigma = rng.uniform(0.2, 1.5);
            const double rho = rng.uniform(1.1, 4.0);
            check_boxed_against_grid(Penalty::scad(sigma, rho), z, alpha,
                                     rho * sigma + rng.uniform(0.0, 2.0));
            const double cad_rho = rng.uniform(0.2, 3.0);
            check_boxed_against_grid(Penalty::cad(rng.uniform(0.0, 2.0), cad_rho), z, alpha,
                                     cad_rho + rng.uniform(0.0, 2.0));
        }
    }
}

TEST_CASE("prox_l0_topk keep rules") {
    Eigen::VectorXd v(3);
    v << 3.0, -1.0, 2.0;
    Eigen::VectorXd out = prox_l0_topk(v, 2, false);
    CHECK(out[0] == 3.0);
    CHECK(out[1] == 0.0);
    CHECK(out[2] == 2.0);

    Eigen::VectorXd neg(2);
    neg << -1.0, -2.0;
    out = prox_l0_topk(neg, 2, true);
    CHECK(out[0] == 0.0);
    CHECK(out[1] == 0.0);

    Eigen::VectorXd big(2);
    big << 5.0, 4.0;
    out = prox_l0_topk(big, 1, true, 3.0);
    CHECK(out[0] == 3.0);  // clamp to the bound, then keep; tie -> lowest index
    CHECK(out[1] == 0.0);

    CHECK_THROWS_AS(prox_l0_topk(big, 3, false), InvalidPenaltyParams);
}

TEST_CASE("prox_block applies per-block penalties and the gamma box") {
    BlockRegularizer none;
    none.gamma_upper = 1.0;
    Eigen::VectorXd point(4);
    point << -2.0, 3.0, -0.5, 2.0;  // p = 2 betas, q = 2 gammas
    const Eigen::VectorXd step = Eigen::VectorXd::Constant(4, 0.5);

    Eigen::VectorXd out = prox_block(none, point, step, 2);
    CHECK(out[0] == -2.0);
    CHECK(out[1] == 3.0);
    CHECK(out[2] == 0.0);  // clamped up
    CHECK(out[3] == 1.0);  // clamped down

    BlockRegularizer l1;
    l1.beta_penalty = Penalty::l1(1.0);
    l1.gamma_penalty = Penalty::l1(1.0);
    out = prox_block(l1, point, step, 2);
    CHECK(out[0] == doctest::Approx(-1.5));
    CHECK(out[1] == doctest::Approx(2.5));
    CHECK(out[2] == doctest::Approx(0.0));
    CHECK(out[3] == doctest::Approx(1.5));

    BlockRegularizer l0;
    l0.beta_penalty = Penalty::l0(1);
    l0.gamma_penalty = Penalty::l0(1);
    out = prox_block(l0, point, step, 2);
    CHECK(((out[0] != 0.0) + (out[1] != 0.0)) == 1);
    CHECK(((out[2] != 0.0) + (out[3] != 0.0)) == 1);

    CHECK_THROWS_AS(prox_block(l1, point, Eigen::VectorXd::Zero(4), 2), InvalidPenaltyParams);
}

TEST_CASE("penalty_value closed forms") {
    CHECK(penalty_value(Penalty::l1(1.0), -2.0) == doctest::Approx(2.0));
    CHECK(penalty_value(Penalty::scad(1.0, 3.7), 100.0) == doctest::Approx(2.35));

    Eigen::VectorXd two = Eigen::VectorXd::Ones(2);
    CHECK(penalty_value(Penalty::l0(1), two) == kInf);
    CHECK(penalty_value(Penalty::l0(2), two) == 0.0);
}

TEST_CASE("prox properties: nonexpansive, monotone, identity at lam = 0") {
    NormalStream rng(33);
    for (int rep = 0; rep < 300; ++rep) {
        const double alpha = rng.uniform(0.05, 2.0);
        const double z1 = rng.uniform(-4.0, 4.0);
        const double z2 = rng.uniform(-4.0, 4.0);

        // Firm nonexpansiveness of the convex proxes.
        const Penalty l1 = Penalty::l1(rng.uniform(0.0, 2.0));
        CHECK(std::abs(prox_scalar(l1, z1, alpha) - prox_scalar(l1, z2, alpha)) <=
              std::abs(z1 - z2) + 1e-12);
        const Penalty al = Penalty::alasso(rng.uniform(0.0, 2.0), rng.uniform(0.0, 3.0));
        CHECK(std::abs(prox_scalar(al, z1, alpha) - prox_scalar(al, z2, alpha)) <=
              std::abs(z1 - z2) + 1e-12);

        // Monotonicity in z for every scalar prox.
        const double lo = std::min(z1, z2);
        const double hi = std::max(z1, z2);
        const Penalty scad = Penalty::scad(rng.uniform(0.2, 1.5), rng.uniform(1.1, 5.0));
        const Penalty cad = Penalty::cad(rng.uniform(0.0, 2.0), rng.uniform(0.2, 3.0));
        for (const Penalty& pen : {l1, al, scad, cad}) {
            CHECK(prox_scalar(pen, lo, alpha) <= prox_scalar(pen, hi, alpha) + 1e-12);
        }

        // lam = 0 is the identity; boxed variant is the projection.
        const Penalty zero = Penalty::l1(0.0);
        CHECK(prox_scalar(zero, z1, alpha) == z1);
        const double upper = rng.uniform(0.5, 3.0);
        CHECK(prox_scalar_boxed(zero, z1, alpha, upper) ==
              doctest::Approx(std::clamp(z1, 0.0, upper)));
    }
}

TEST_CASE("SCAD prox at alpha = 1 reproduces the classic three-branch operator") {
    NormalStream rng(34);
    for (int rep = 0; rep < 200; ++rep) {
        const double sigma = rng.uniform(0.2, 1.5);
        const double rho = rng.uniform(2.2, 5.0);
        const double z = rng.uniform(-8.0, 8.0);
        const double az = std::abs(z);
        double expected;
        if (az <= 2.0 * sigma) {
            expected = std::copysign(std::max(0.0, az - sigma), z);
        } else if (az <= rho * sigma) {
            expected = ((rho - 1.0) * z - std::copysign(rho * sigma, z)) / (rho - 2.0);
        } else {
            expected = z;
        }
        CHECK(prox_scalar(Penalty::scad(sigma, rho), z, 1.0) ==
              doctest::Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("adaptive weights helper") {
    Eigen::VectorXd x(3);
    x << 2.0, -0.5, 0.0;
    const Eigen::VectorXd w = adaptive_weights(x);
    CHECK(w[0] == doctest::Approx(1.0 / (2.0 + 1e-8)));
    CHECK(w[1] == doctest::Approx(1.0 / (0.5 + 1e-8)));
    CHECK(w[2] == doctest::Approx(1e8));
}
