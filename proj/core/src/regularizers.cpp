#include "mixedsel/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "mixedsel/errors.hpp"

namespace mixedsel {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double soft_threshold(double z, double thr) {
    const double a = std::abs(z) - thr;
    return a > 0.0 ? std::copysign(a, z) : 0.0;
}

double scad_value(double sigma, double rho, double x) {
    const double a = std::abs(x);
    if (a <= sigma) return sigma * a;
    if (a < rho * sigma) {
        return (-a * a + 2.0 * rho * sigma * a - sigma * sigma) / (2.0 * (rho - 1.0));
    }
    return sigma * sigma * (rho + 1.0) / 2.0;
}

double cad_value(double lam, double rho, double x) {
    return std::min(lam * std::abs(x), lam * rho);
}

// SCAD prox by exact piecewise-quadratic minimization. The candidate set
// covers each branch's stationary point clamped into the branch, which
// reproduces the closed-form three-branch operator in its valid regime
// (rho > 1 + alpha) and stays globally correct when the middle branch
// collapses and the soft/identity branches compete.
double scad_prox_abs(double sigma, double rho, double az, double alpha) {
    const auto obj = [&](double y) {
        return scad_value(sigma, rho, y) + (y - az) * (y - az) / (2.0 * alpha);
    };

    double best_y = std::clamp(az - sigma * alpha, 0.0, std::min(sigma, az));
    double best_f = obj(best_y);
    auto consider = [&](double y) {
        const double f = obj(y);
        if (f < best_f) {
            best_f = f;
            best_y = y;
        }
    };

    const double denom = rho - 1.0 - alpha;
    if (denom > 0.0) {
        consider(std::clamp(((rho - 1.0) * az - rho * sigma * alpha) / denom, sigma, rho * sigma));
    } else {
        // Concave middle piece: its minimum over [sigma, rho*sigma] is at an endpoint.
        consider(sigma);
        consider(rho * sigma);
    }
    consider(std::max(az, rho * sigma));
    return best_y;
}

double cad_prox_abs(double lam, double rho, double az, double alpha) {
    const auto obj = [&](double y) {
        return cad_value(lam, rho, y) + (y - az) * (y - az) / (2.0 * alpha);
    };
    const double y_soft = std::clamp(az - lam * alpha, 0.0, std::min(rho, az));
    const double y_flat = std::max(az, rho);
    return obj(y_soft) <= obj(y_flat) ? y_soft : y_flat;
}

double effective_weight(const Penalty& pen, Eigen::Index j) {
    if (pen.weights.size() > 0) {
        if (j < 0 || j >= pen.weights.size()) {
            throw InvalidPenaltyParams("A-LASSO weights vector does not cover the block");
        }
        return pen.weights[j];
    }
    return pen.weight;
}

double prox_scalar_weighted(const Penalty& pen, double z, double alpha, double w) {
    switch (pen.kind) {
        case PenaltyKind::None:
            return z;
        case PenaltyKind::L1:
            return soft_threshold(z, alpha * pen.lam);
        case PenaltyKind::ALasso:
            return soft_threshold(z, alpha * pen.lam * w);
        case PenaltyKind::Scad:
            return std::copysign(scad_prox_abs(pen.sigma, pen.rho, std::abs(z), alpha), z);
        case PenaltyKind::Cad:
            return std::copysign(cad_prox_abs(pen.lam, pen.rho, std::abs(z), alpha), z);
        case PenaltyKind::L0Ball:
            throw InvalidPenaltyParams("L0 budgets have no scalar prox; use prox_l0_topk");
    }
    throw InvalidPenaltyParams("unknown penalty kind");
}

double boxed_threshold(const Penalty& pen, double alpha, double upper, double w) {
    switch (pen.kind) {
        case PenaltyKind::L1:
            return upper + alpha * pen.lam;
        case PenaltyKind::ALasso:
            return upper + alpha * pen.lam * w;
        default:
            return upper;  // CAD, SCAD, and the plain projection
    }
}

double penalty_value_weighted(const Penalty& pen, double x, double w) {
    switch (pen.kind) {
        case PenaltyKind::None:
            return 0.0;
        case PenaltyKind::L1:
            return pen.lam * std::abs(x);
        case PenaltyKind::ALasso:
            return pen.lam * w * std::abs(x);
        case PenaltyKind::Scad:
            return scad_value(pen.sigma, pen.rho, x);
        case PenaltyKind::Cad:
            return cad_value(pen.lam, pen.rho, x);
        case PenaltyKind::L0Ball:
            throw InvalidPenaltyParams("L0 budgets are evaluated on whole blocks");
    }
    throw InvalidPenaltyParams("unknown penalty kind");
}

}  // namespace

Penalty Penalty::l1(double lam) {
    Penalty p;
    p.kind = PenaltyKind::L1;
    p.lam = lam;
    p.validate();
    return p;
}

Penalty Penalty::alasso(double lam, double weight) {
    Penalty p;
    p.kind = PenaltyKind::ALasso;
    p.lam = lam;
    p.weight = weight;
    p.validate();
    return p;
}

Penalty Penalty::alasso(double lam, Eigen::VectorXd weights) {
    Penalty p;
    p.kind = PenaltyKind::ALasso;
    p.lam = lam;
    p.weights = std::move(weights);
    p.validate();
    return p;
}

Penalty Penalty::scad(double sigma, double rho) {
    Penalty p;
    p.kind = PenaltyKind::Scad;
    p.sigma = sigma;
    p.rho = rho;
    p.validate();
    return p;
}

Penalty Penalty::cad(double lam, double rho) {
    Penalty p;
    p.kind = PenaltyKind::Cad;
    p.lam = lam;
    p.rho = rho;
    p.validate();
    return p;
}

Penalty Penalty::l0(int k) {
    Penalty p;
    p.kind = PenaltyKind::L0Ball;
    p.k = k;
    p.validate();
    return p;
}

void Penalty::validate() const {
    switch (kind) {
        case PenaltyKind::None:
            return;
        case PenaltyKind::L1:
            if (!(lam >= 0.0) || !std::isfinite(lam)) {
                throw InvalidPenaltyParams("L1: lam must be finite and >= 0");
            }
            return;
        case PenaltyKind::ALasso:
            if (!(lam >= 0.0) || !std::isfinite(lam)) {
                throw InvalidPenaltyParams("A-LASSO: lam must be finite and >= 0");
            }
            if (weights.size() > 0) {
                for (Eigen::Index j = 0; j < weights.size(); ++j) {
                    if (!(weights[j] >= 0.0) || !std::isfinite(weights[j])) {
                        throw InvalidPenaltyParams("A-LASSO: weights must be finite and >= 0");
                    }
                }
            } else if (!(weight >= 0.0) || !std::isfinite(weight)) {
                throw InvalidPenaltyParams("A-LASSO: weight must be finite and >= 0");
            }
            return;
        case PenaltyKind::Scad:
            if (!(sigma > 0.0)) throw InvalidPenaltyParams("SCAD: sigma must be > 0");
            if (!(rho > 1.0)) throw InvalidPenaltyParams("SCAD: rho must be > 1");
            return;
        case PenaltyKind::Cad:
            if (!(lam >= 0.0) || !std::isfinite(lam)) {
                throw InvalidPenaltyParams("CAD: lam must be finite and >= 0");
            }
            if (!(rho > 0.0)) throw InvalidPenaltyParams("CAD: rho must be > 0");
            return;
        case PenaltyKind::L0Ball:
            if (k < 0) throw InvalidPenaltyParams("L0: budget must be >= 0");
            return;
    }
    throw InvalidPenaltyParams("unknown penalty kind");
}

double prox_scalar(const Penalty& pen, double z, double alpha) {
    pen.validate();
    if (!(alpha > 0.0)) throw InvalidPenaltyParams("prox: alpha must be > 0");
    return prox_scalar_weighted(pen, z, alpha, pen.weight);
}

double prox_scalar_boxed(const Penalty& pen, double z, double alpha, double upper) {
    pen.validate();
    if (!(alpha > 0.0)) throw InvalidPenaltyParams("prox: alpha must be > 0");
    if (!(upper > 0.0)) throw InvalidPenaltyParams("prox: upper bound must be > 0");
    if (z < 0.0) return 0.0;
    if (z >= boxed_threshold(pen, alpha, upper, pen.weight)) return upper;
    if (pen.kind == PenaltyKind::None) return std::min(z, upper);
    return prox_scalar_weighted(pen, z, alpha, pen.weight);
}

Eigen::VectorXd prox_l0_topk(const Eigen::VectorXd& v, int k, bool nonneg, double upper) {
    const Eigen::Index n = v.size();
    if (k < 0 || k > n) throw InvalidPenaltyParams("prox_l0_topk: budget out of range");

    Eigen::VectorXd clamped = v;
    if (nonneg) {
        for (Eigen::Index i = 0; i < n; ++i) clamped[i] = std::clamp(v[i], 0.0, upper);
    }
    if (k == static_cast<int>(n)) return clamped;

    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    auto score = [&](Eigen::Index i) { return nonneg ? clamped[i] : std::abs(clamped[i]); };
    // Ties break toward the lowest index.
    std::stable_sort(idx.begin(), idx.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return score(a) > score(b); });

    Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < k; ++j) out[idx[static_cast<std::size_t>(j)]] = clamped[idx[static_cast<std::size_t>(j)]];
    return out;
}

Eigen::VectorXd prox_block(const BlockRegularizer& reg, const Eigen::VectorXd& point,
                           const Eigen::VectorXd& step, Eigen::Index p) {
    const Eigen::Index total = point.size();
    if (p < 0 || p > total) throw std::invalid_argument("prox_block: bad block split");
    if (step.size() != total) throw std::invalid_argument("prox_block: step size mismatch");
    if (step.minCoeff() <= 0.0) throw InvalidPenaltyParams("prox_block: step entries must be > 0");
    const Eigen::Index q = total - p;

    Eigen::VectorXd out(total);

    if (reg.beta_penalty.kind == PenaltyKind::L0Ball) {
        out.head(p) = prox_l0_topk(point.head(p), reg.beta_penalty.k, /*nonneg=*/false);
    } else {
        reg.beta_penalty.validate();
        for (Eigen::Index j = 0; j < p; ++j) {
            const double w = effective_weight(reg.beta_penalty, j);
            out[j] = prox_scalar_weighted(reg.beta_penalty, point[j], step[j], w);
        }
    }

    if (reg.gamma_penalty.kind == PenaltyKind::L0Ball) {
        out.tail(q) = prox_l0_topk(point.tail(q), reg.gamma_penalty.k, /*nonneg=*/true,
                                   reg.gamma_upper);
    } else {
        reg.gamma_penalty.validate();
        for (Eigen::Index j = 0; j < q; ++j) {
            const double z = point[p + j];
            const double alpha = step[p + j];
            const double w = effective_weight(reg.gamma_penalty, j);
            if (z < 0.0) {
                out[p + j] = 0.0;
            } else if (z >= boxed_threshold(reg.gamma_penalty, alpha, reg.gamma_upper, w)) {
                out[p + j] = reg.gamma_upper;
            } else if (reg.gamma_penalty.kind == PenaltyKind::None) {
                out[p + j] = std::min(z, reg.gamma_upper);
            } else {
                out[p + j] = prox_scalar_weighted(reg.gamma_penalty, z, alpha, w);
            }
        }
    }
    return out;
}

double penalty_value(const Penalty& pen, double x) {
    pen.validate();
    return penalty_value_weighted(pen, x, pen.weight);
}

double penalty_value(const Penalty& pen, const Eigen::VectorXd& x) {
    pen.validate();
    if (pen.kind == PenaltyKind::L0Ball) {
        int nnz = 0;
        for (Eigen::Index i = 0; i < x.size(); ++i) nnz += (x[i] != 0.0);
        return nnz <= pen.k ? 0.0 : kInf;
    }
    double total = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        total += penalty_value_weighted(pen, x[i], effective_weight(pen, i));
    }
    return total;
}

double regularizer_value(const BlockRegularizer& reg, const Eigen::VectorXd& point,
                         Eigen::Index p) {
    const Eigen::Index q = point.size() - p;
    const auto gamma = point.tail(q);
    for (Eigen::Index j = 0; j < q; ++j) {
        if (gamma[j] < 0.0 || gamma[j] > reg.gamma_upper) return kInf;
    }
    return penalty_value(reg.beta_penalty, Eigen::VectorXd(point.head(p))) +
           penalty_value(reg.gamma_penalty, Eigen::VectorXd(gamma));
}

Eigen::VectorXd adaptive_weights(const Eigen::VectorXd& unpenalized, double eps) {
    return (unpenalized.array().abs() + eps).inverse().matrix();
}

}  // namespace mixedsel
