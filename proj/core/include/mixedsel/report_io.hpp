#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mixedsel/selection.hpp"

namespace mixedsel {

struct ReportPathRow {
    HyperPoint hyper;
    double ic = 0.0;
    int nnz_fixed = 0;
    int nnz_random = 0;
};

struct SolverSummary {
    long iterations = 0;
    bool converged = false;
    double final_residual = 0.0;
};

/// Payload of the report JSON written by the fit/select/path commands.
struct Report {
    std::vector<std::pair<std::string, std::string>> config;  // echoed settings
    Eigen::VectorXd beta;
    Eigen::VectorXd gamma;
    std::vector<std::uint8_t> support_fixed;
    std::vector<std::uint8_t> support_random;
    std::vector<ReportPathRow> path;
    SolverSummary solver;
};

void write_report_json(const Report& report, const std::string& path);

}  // namespace mixedsel
