#include "mixedsel/study.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <thread>

#include "mixedsel/errors.hpp"

namespace mixedsel {

namespace {

RegFamily make_family(const StudyConfig& cfg, PenaltyKind reg, const LMEProblem& problem,
                      SolverKind solver, const SolverConfig& solver_cfg) {
    RegFamily family;
    family.kind = reg;
    family.scad_rho = cfg.scad_rho;
    family.cad_rho = cfg.cad_rho;
    if (reg == PenaltyKind::ALasso) {
        // Weights come from the unpenalized ML estimate; the fast solver is
        // used to produce it since every solver agrees at R = None.
        (void)solver;
        SolverConfig cfg_ml = solver_cfg;
        cfg_ml.eta = cfg.eta_grid.empty() ? 1.0 : cfg.eta_grid.front();
        const FitResult ml =
            msr3_fast_fit(problem, BlockRegularizer{}, cfg_ml, default_init(problem));
        family.beta_weights = adaptive_weights(ml.params.beta);
        family.gamma_weights = adaptive_weights(ml.params.gamma);
    }
    return family;
}

ReplicationOutcome run_one(const StudyConfig& cfg, SolverKind solver, PenaltyKind reg,
                           int rep) {
    ReplicationOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        SyntheticSpec spec = cfg.base_spec;
        spec.seed = cfg.seed + static_cast<std::uint64_t>(rep);
        const GeneratedProblem gen = generate(spec);
        const LMEProblem& problem = gen.problem;

        SelectionReport report;
        if (reg == PenaltyKind::L0Ball) {
            const int k_max = cfg.k_max >= 0
                                  ? cfg.k_max
                                  : static_cast<int>(std::min(problem.p(), problem.q()));
            for (double eta : cfg.eta_grid) {
                SolverConfig scfg = cfg.solver_cfg;
                scfg.eta = eta;
                SelectionReport chunk = l0_path(problem, solver, cfg.ic, k_max, scfg);
                for (auto& e : chunk.entries) report.entries.push_back(std::move(e));
            }
            int best = -1;
            for (std::size_t i = 0; i < report.entries.size(); ++i) {
                if (!report.entries[i].ok()) continue;
                if (best < 0 ||
                    report.entries[i].ic_value < report.entries[static_cast<std::size_t>(best)].ic_value) {
                    best = static_cast<int>(i);
                }
            }
            report.best = best;
        } else {
            const RegFamily family = make_family(cfg, reg, problem, solver, cfg.solver_cfg);
            report = lambda_path(problem, solver, family, cfg.ic, cfg.lam_range, cfg.eta_grid,
                                 cfg.solver_cfg);
        }

        if (report.best < 0) {
            out.error = "every path entry failed";
            for (const auto& e : report.entries) {
                if (!e.ok()) {
                    out.error = e.error;
                    break;
                }
            }
            return out;
        }

        const PathEntry& best = report.best_entry();
        out.best_hyper = best.hyper;
        out.metrics = support_metrics(extract_support(gen.truth, 0.0), best.support);

        // Cold refit at the tuned hyperparameter for iteration accounting.
        SolverConfig refit_cfg = cfg.solver_cfg;
        refit_cfg.eta = best.hyper.eta;
        const BlockRegularizer refit_reg =
            reg == PenaltyKind::L0Ball
                ? l0_regularizer(best.hyper.k)
                : make_family(cfg, reg, problem, solver, cfg.solver_cfg).at_lambda(best.hyper.lam);
        const FitResult refit =
            run_solver(solver, problem, refit_reg, refit_cfg, default_init(problem));
        out.refit_iterations = refit.iterations;
        out.refit_nll_evals = refit.nll_evals;
        out.refit_grad_evals = refit.grad_evals;
        out.refit_converged = refit.converged;
        out.ok = true;
    } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
    }
    out.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return out;
}

}  // namespace

std::vector<StudyCell> run_study(const StudyConfig& cfg) {
    if (cfg.solvers.empty() || cfg.regs.empty() || cfg.replications < 1) {
        throw std::invalid_argument("run_study: need solvers, regularizers and replications >= 1");
    }

    std::vector<StudyCell> cells;
    for (SolverKind s : cfg.solvers) {
        for (PenaltyKind r : cfg.regs) {
            StudyCell cell;
            cell.solver = s;
            cell.reg = r;
            cell.reps.resize(static_cast<std::size_t>(cfg.replications));
            cells.push_back(std::move(cell));
        }
    }

    struct Job {
        std::size_t cell;
        int rep;
    };
    std::vector<Job> jobs;
    for (std::size_t c = 0; c < cells.size(); ++c) {
        for (int r = 0; r < cfg.replications; ++r) jobs.push_back({c, r});
    }

    const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(jobs.size())));
    auto work = [&](const Job& job) {
        StudyCell& cell = cells[job.cell];
        cell.reps[static_cast<std::size_t>(job.rep)] =
            run_one(cfg, cell.solver, cell.reg, job.rep);
    };

    if (threads <= 1) {
        for (const Job& job : jobs) work(job);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(threads));
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&]() {
                for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
                    work(jobs[i]);
                }
            });
        }
        for (auto& th : pool) th.join();
    }
    return cells;
}

double percentile(std::vector<double> values, double prob) {
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = std::clamp(prob, 0.0, 1.0) * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
}

std::string solver_name(SolverKind solver) {
    switch (solver) {
        case SolverKind::Pgd: return "pgd";
        case SolverKind::Msr3: return "msr3";
        case SolverKind::Msr3Fast: return "msr3-fast";
    }
    return "?";
}

std::string reg_name(PenaltyKind reg) {
    switch (reg) {
        case PenaltyKind::None: return "none";
        case PenaltyKind::L1: return "l1";
        case PenaltyKind::ALasso: return "alasso";
        case PenaltyKind::Scad: return "scad";
        case PenaltyKind::Cad: return "cad";
        case PenaltyKind::L0Ball: return "l0";
    }
    return "?";
}

}  // namespace mixedsel
