#pragma once

#include <Eigen/Core>
#include <limits>

namespace mixedsel {

enum class PenaltyKind { None, L1, ALasso, Scad, Cad, L0Ball };

/// Penalty description. Scalar kinds apply coordinatewise; L0Ball is a
/// per-block budget on the number of nonzeros.
struct Penalty {
    PenaltyKind kind = PenaltyKind::None;
    double lam = 0.0;     // strength for L1 / A-LASSO / CAD
    double weight = 1.0;  // A-LASSO weight w >= 0
    double sigma = 1.0;   // SCAD sigma > 0
    double rho = 3.7;     // SCAD rho > 1, CAD rho > 0
    int k = 0;            // L0 budget

    // Optional per-coordinate A-LASSO weights; overrides `weight` inside
    // prox_block / penalty evaluation when sized to the block.
    Eigen::VectorXd weights;

    static Penalty none() { return {}; }
    static Penalty l1(double lam);
    static Penalty alasso(double lam, double weight);
    static Penalty alasso(double lam, Eigen::VectorXd weights);
    static Penalty scad(double sigma, double rho = 3.7);
    static Penalty cad(double lam, double rho);
    static Penalty l0(int k);

    void validate() const;  // throws InvalidPenaltyParams
};

/// Penalties for the beta and gamma blocks plus the gamma box bound.
struct BlockRegularizer {
    Penalty beta_penalty;
    Penalty gamma_penalty;
    double gamma_upper = std::numeric_limits<double>::infinity();
};

/// Global minimizer of r(y) + (y - z)^2 / (2 alpha).
double prox_scalar(const Penalty& pen, double z, double alpha);

/// Same, constrained to y in [0, upper].
double prox_scalar_boxed(const Penalty& pen, double z, double alpha, double upper);

/// Keep the k entries largest in magnitude (nonneg flavor: clamp to
/// [0, upper] first, keep the k largest clamped values). Ties resolve to the
/// lowest index.
Eigen::VectorXd prox_l0_topk(const Eigen::VectorXd& v, int k, bool nonneg,
                             double upper = std::numeric_limits<double>::infinity());

/// Blockwise prox of a (p+q)-vector: beta coordinates get the beta penalty
/// with the beta step entries, gamma coordinates get the boxed gamma penalty.
Eigen::VectorXd prox_block(const BlockRegularizer& reg, const Eigen::VectorXd& point,
                           const Eigen::VectorXd& step, Eigen::Index p);

double penalty_value(const Penalty& pen, double x);
double penalty_value(const Penalty& pen, const Eigen::VectorXd& x);

/// Total penalty of a stacked (beta, gamma) point. +inf when an L0 budget is
/// exceeded or gamma falls outside [0, gamma_upper].
double regularizer_value(const BlockRegularizer& reg, const Eigen::VectorXd& point,
                         Eigen::Index p);

/// A-LASSO weights 1 / (|x_hat| + eps) from an unpenalized estimate.
Eigen::VectorXd adaptive_weights(const Eigen::VectorXd& unpenalized, double eps = 1e-8);

}  // namespace mixedsel
