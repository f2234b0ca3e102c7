#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mixedsel/problem.hpp"
#include "mixedsel/solvers.hpp"

namespace mixedsel {

enum class InfoCriterion {
    AicMarginalLiteral,    // 2 nll + 2 n (n - df - 1) df
    AicMarginalCorrected,  // 2 nll + 2 (n / (n - df - 1)) df
    Bic,                   // 2 nll + ln(n) df
};

/// Degrees of freedom are the nonzero counts of the two blocks.
double info_criterion(InfoCriterion ic, double nll_value, long n, int df_fixed,
                      int df_random);

enum class SolverKind { Pgd, Msr3, Msr3Fast };

/// Penalty family with its sparsity hyperparameter left free, for path sweeps.
struct RegFamily {
    PenaltyKind kind = PenaltyKind::L1;  // L1 | ALasso | Scad | Cad for lambda paths
    double scad_rho = 3.7;
    double cad_rho = 1.0;
    double gamma_upper = std::numeric_limits<double>::infinity();
    Eigen::VectorXd beta_weights;   // A-LASSO only
    Eigen::VectorXd gamma_weights;  // A-LASSO only

    BlockRegularizer at_lambda(double lam) const;
};

BlockRegularizer l0_regularizer(int k, double gamma_upper =
                                           std::numeric_limits<double>::infinity());

struct SupportMask {
    std::vector<std::uint8_t> fixed;
    std::vector<std::uint8_t> random;
};

struct HyperPoint {
    double lam = std::numeric_limits<double>::quiet_NaN();
    int k = -1;
    double eta = std::numeric_limits<double>::quiet_NaN();
    bool is_k() const { return k >= 0; }
};

struct PathEntry {
    HyperPoint hyper;
    FitResult result;
    double ic_value = std::numeric_limits<double>::infinity();
    SupportMask support;
    std::string error;  // nonempty when the fit failed; excluded from best
    bool ok() const { return error.empty(); }
};

struct SupportMetrics {
    double accuracy = 0.0;
    double fe_accuracy = 0.0;
    double re_accuracy = 0.0;
    double f1 = 0.0;
    double fe_f1 = 0.0;
    double re_f1 = 0.0;
};

struct SelectionReport {
    std::vector<PathEntry> entries;
    int best = -1;  // index of the minimal-ic entry, -1 if every fit failed
    std::optional<SupportMetrics> metrics;

    const PathEntry& best_entry() const { return entries.at(static_cast<std::size_t>(best)); }
};

struct SelectionConfig {
    double zero_tol = 1e-4;  // support threshold for penalty-free estimates
    int golden_iters = 20;   // bracket shrinks of the golden-section search
    int threads = 1;         // concurrency across eta grid points
};

/// Golden-section minimization of f over log-lambda. Returns every evaluated
/// (lambda, f) pair in evaluation order, endpoints included.
std::vector<std::pair<double, double>> golden_section_log(
    const std::function<double(double)>& f, double lo, double hi, int iters);

/// For each eta, golden-section search over log lambda minimizing the
/// information criterion of the fitted model; fits are warm-started along the
/// path. Solver failures are recorded on their entries and skipped.
SelectionReport lambda_path(const LMEProblem& problem, SolverKind solver,
                            const RegFamily& family, InfoCriterion ic,
                            std::pair<double, double> lam_range,
                            const std::vector<double>& eta_grid, const SolverConfig& cfg,
                            const SelectionConfig& sel = {});

/// Sweep k = 0..k_max with L0 budgets on both blocks, warm-started.
SelectionReport l0_path(const LMEProblem& problem, SolverKind solver, InfoCriterion ic,
                        int k_max, const SolverConfig& cfg, const SelectionConfig& sel = {});

std::vector<std::uint8_t> extract_support(const Eigen::VectorXd& coefs, double zero_tol);
SupportMask extract_support(const Params& params, double zero_tol = 0.0);

SupportMetrics support_metrics(const SupportMask& truth, const SupportMask& estimate);

FitResult run_solver(SolverKind solver, const LMEProblem& problem,
                     const BlockRegularizer& reg, const SolverConfig& cfg,
                     const Params& init);

}  // namespace mixedsel
