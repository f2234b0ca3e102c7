#include "mixedsel/selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "mixedsel/errors.hpp"

namespace mixedsel {

double info_criterion(InfoCriterion ic, double nll_value, long n, int df_fixed,
                      int df_random) {
    if (n <= 0) throw std::invalid_argument("info_criterion: n must be positive");
    if (df_fixed < 0 || df_random < 0) {
        throw std::invalid_argument("info_criterion: negative degrees of freedom");
    }
    const double nd = static_cast<double>(n);
    const double df = static_cast<double>(df_fixed + df_random);
    switch (ic) {
        case InfoCriterion::Bic:
            return 2.0 * nll_value + std::log(nd) * df;
        case InfoCriterion::AicMarginalLiteral:
            return 2.0 * nll_value + 2.0 * nd * (nd - df - 1.0) * df;
        case InfoCriterion::AicMarginalCorrected: {
            if (nd <= df + 1.0) {
                throw DegenerateSample("corrected AIC needs n > df + 1");
            }
            return 2.0 * nll_value + 2.0 * (nd / (nd - df - 1.0)) * df;
        }
    }
    throw std::invalid_argument("info_criterion: unknown criterion");
}

BlockRegularizer RegFamily::at_lambda(double lam) const {
    BlockRegularizer reg;
    reg.gamma_upper = gamma_upper;
    switch (kind) {
        case PenaltyKind::L1:
            reg.beta_penalty = Penalty::l1(lam);
            reg.gamma_penalty = Penalty::l1(lam);
            break;
        case PenaltyKind::ALasso:
            reg.beta_penalty = Penalty::alasso(lam, beta_weights);
            reg.gamma_penalty = Penalty::alasso(lam, gamma_weights);
            break;
        case PenaltyKind::Scad:
            // lambda plays the SCAD strength sigma.
            reg.beta_penalty = Penalty::scad(lam, scad_rho);
            reg.gamma_penalty = Penalty::scad(lam, scad_rho);
            break;
        case PenaltyKind::Cad:
            reg.beta_penalty = Penalty::cad(lam, cad_rho);
            reg.gamma_penalty = Penalty::cad(lam, cad_rho);
            break;
        default:
            throw InvalidPenaltyParams("RegFamily: lambda paths need L1/A-LASSO/SCAD/CAD");
    }
    return reg;
}

BlockRegularizer l0_regularizer(int k, double gamma_upper) {
    BlockRegularizer reg;
    reg.beta_penalty = Penalty::l0(k);
    reg.gamma_penalty = Penalty::l0(k);
    reg.gamma_upper = gamma_upper;
    return reg;
}

FitResult run_solver(SolverKind solver, const LMEProblem& problem,
                     const BlockRegularizer& reg, const SolverConfig& cfg,
                     const Params& init) {
    switch (solver) {
        case SolverKind::Pgd:
            return pgd_fit(problem, reg, cfg, init);
        case SolverKind::Msr3:
            return msr3_fit(problem, reg, cfg, init);
        case SolverKind::Msr3Fast:
            return msr3_fast_fit(problem, reg, cfg, init);
    }
    throw std::invalid_argument("run_solver: unknown solver");
}

std::vector<std::uint8_t> extract_support(const Eigen::VectorXd& coefs, double zero_tol) {
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(coefs.size()));
    for (Eigen::Index i = 0; i < coefs.size(); ++i) {
        mask[static_cast<std::size_t>(i)] = std::abs(coefs[i]) > zero_tol ? 1 : 0;
    }
    return mask;
}

SupportMask extract_support(const Params& params, double zero_tol) {
    return {extract_support(params.beta, zero_tol), extract_support(params.gamma, zero_tol)};
}

namespace {

struct Counts {
    long tp = 0, fp = 0, fn = 0, correct = 0, total = 0;
};

Counts count_block(const std::vector<std::uint8_t>& truth,
                   const std::vector<std::uint8_t>& est) {
    if (truth.size() != est.size()) {
        throw std::invalid_argument("support_metrics: mask lengths disagree");
    }
    Counts c;
    c.total = static_cast<long>(truth.size());
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] != 0;
        const bool e = est[i] != 0;
        c.correct += (t == e);
        c.tp += (t && e);
        c.fp += (!t && e);
        c.fn += (t && !e);
    }
    return c;
}

double accuracy_of(const Counts& c) {
    return c.total == 0 ? 1.0 : static_cast<double>(c.correct) / static_cast<double>(c.total);
}

// F1 of nonzero detection; 1 when both supports are empty.
double f1_of(const Counts& c) {
    const long denom = 2 * c.tp + c.fp + c.fn;
    if (denom == 0) return 1.0;
    return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

Counts merge(const Counts& a, const Counts& b) {
    Counts c;
    c.tp = a.tp + b.tp;
    c.fp = a.fp + b.fp;
    c.fn = a.fn + b.fn;
    c.correct = a.correct + b.correct;
    c.total = a.total + b.total;
    return c;
}

int nnz_of(const std::vector<std::uint8_t>& mask) {
    int n = 0;
    for (auto b : mask) n += (b != 0);
    return n;
}

}  // namespace

SupportMetrics support_metrics(const SupportMask& truth, const SupportMask& estimate) {
    const Counts fe = count_block(truth.fixed, estimate.fixed);
    const Counts re = count_block(truth.random, estimate.random);
    const Counts all = merge(fe, re);
    SupportMetrics m;
    m.accuracy = accuracy_of(all);
    m.fe_accuracy = accuracy_of(fe);
    m.re_accuracy = accuracy_of(re);
    m.f1 = f1_of(all);
    m.fe_f1 = f1_of(fe);
    m.re_f1 = f1_of(re);
    return m;
}

std::vector<std::pair<double, double>> golden_section_log(
    const std::function<double(double)>& f, double lo, double hi, int iters) {
    if (!(lo > 0.0) || !(hi >= lo)) {
        throw std::invalid_argument("golden_section_log: need 0 < lo <= hi");
    }
    std::vector<std::pair<double, double>> evals;
    auto probe = [&](double t) {
        const double lam = std::exp(t);
        const double val = f(lam);
        evals.emplace_back(lam, val);
        return val;
    };

    double a = std::log(lo);
    double b = std::log(hi);
    probe(a);
    probe(b);
    if (b == a || iters <= 0) return evals;

    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = probe(x1);
    double f2 = probe(x2);
    for (int it = 0; it < iters; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = probe(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = probe(x2);
        }
    }
    return evals;
}

namespace {

// Warm start for the next fit on a path. The fast solver needs a strictly
// interior gamma, so it restarts from the relaxed iterate floored away from 0.
Params warm_init(SolverKind solver, const FitResult& prev) {
    switch (solver) {
        case SolverKind::Pgd:
        case SolverKind::Msr3:
            return prev.params;
        case SolverKind::Msr3Fast: {
            const Params& dense = prev.dense_params ? *prev.dense_params : prev.params;
            return {dense.beta, dense.gamma.cwiseMax(1e-2)};
        }
    }
    throw std::invalid_argument("warm_init: unknown solver");
}

PathEntry fit_entry(const LMEProblem& problem, SolverKind solver,
                    const BlockRegularizer& reg, const SolverConfig& cfg,
                    InfoCriterion ic, const HyperPoint& hyper,
                    const std::optional<FitResult>& warm) {
    PathEntry entry;
    entry.hyper = hyper;
    try {
        const Params init = warm ? warm_init(solver, *warm) : default_init(problem);
        entry.result = run_solver(solver, problem, reg, cfg, init);
        entry.support = extract_support(entry.result.params, 0.0);
        entry.ic_value = info_criterion(ic, entry.result.objective, problem.total_n(),
                                        nnz_of(entry.support.fixed), nnz_of(entry.support.random));
    } catch (const Error& e) {
        entry.error = e.what();
        entry.ic_value = std::numeric_limits<double>::infinity();
    }
    return entry;
}

int best_of(const std::vector<PathEntry>& entries) {
    int best = -1;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (!entries[i].ok()) continue;
        if (best < 0 || entries[i].ic_value < entries[static_cast<std::size_t>(best)].ic_value) {
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<PathEntry> lambda_path_one_eta(const LMEProblem& problem, SolverKind solver,
                                           const RegFamily& family, InfoCriterion ic,
                                           std::pair<double, double> lam_range, double eta,
                                           const SolverConfig& cfg, const SelectionConfig& sel) {
    SolverConfig cfg_eta = cfg;
    cfg_eta.eta = eta;
    std::vector<PathEntry> entries;
    std::optional<FitResult> warm;
    auto objective = [&](double lam) {
        HyperPoint hyper;
        hyper.lam = lam;
        hyper.eta = eta;
        PathEntry entry =
            fit_entry(problem, solver, family.at_lambda(lam), cfg_eta, ic, hyper, warm);
        if (entry.ok()) warm = entry.result;
        const double value = entry.ic_value;
        entries.push_back(std::move(entry));
        return value;
    };
    golden_section_log(objective, lam_range.first, lam_range.second, sel.golden_iters);
    return entries;
}

}  // namespace

SelectionReport lambda_path(const LMEProblem& problem, SolverKind solver,
                            const RegFamily& family, InfoCriterion ic,
                            std::pair<double, double> lam_range,
                            const std::vector<double>& eta_grid, const SolverConfig& cfg,
                            const SelectionConfig& sel) {
    if (eta_grid.empty()) throw std::invalid_argument("lambda_path: eta grid must be nonempty");
    if (!(lam_range.first > 0.0) || !(lam_range.second >= lam_range.first)) {
        throw std::invalid_argument("lambda_path: need 0 < lam_lo <= lam_hi");
    }

    std::vector<std::vector<PathEntry>> per_eta(eta_grid.size());
    const int threads = std::max(1, std::min<int>(sel.threads, static_cast<int>(eta_grid.size())));
    if (threads <= 1) {
        for (std::size_t i = 0; i < eta_grid.size(); ++i) {
            per_eta[i] = lambda_path_one_eta(problem, solver, family, ic, lam_range,
                                             eta_grid[i], cfg, sel);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < eta_grid.size();
                     i = next.fetch_add(1)) {
                    per_eta[i] = lambda_path_one_eta(problem, solver, family, ic, lam_range,
                                                     eta_grid[i], cfg, sel);
                }
            });
        }
        for (auto& th : pool) th.join();
    }

    SelectionReport report;
    for (auto& chunk : per_eta) {
        for (auto& e : chunk) report.entries.push_back(std::move(e));
    }
    report.best = best_of(report.entries);
    return report;
}

SelectionReport l0_path(const LMEProblem& problem, SolverKind solver, InfoCriterion ic,
                        int k_max, const SolverConfig& cfg, const SelectionConfig& sel) {
    (void)sel;
    const int kp = static_cast<int>(problem.p());
    const int kq = static_cast<int>(problem.q());
    if (k_max < 0 || k_max > std::min(kp, kq)) {
        throw std::invalid_argument("l0_path: k_max must lie in [0, min(p, q)]");
    }

    SelectionReport report;
    std::optional<FitResult> warm;
    for (int k = 0; k <= k_max; ++k) {
        HyperPoint hyper;
        hyper.k = k;
        hyper.eta = cfg.eta;
        PathEntry entry = fit_entry(problem, solver, l0_regularizer(k), cfg, ic, hyper, warm);
        if (entry.ok()) warm = entry.result;
        report.entries.push_back(std::move(entry));
    }
    report.best = best_of(report.entries);
    return report;
}

}  // namespace mixedsel
