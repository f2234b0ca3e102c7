#include "mixedsel/report_io.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "mixedsel/errors.hpp"

namespace mixedsel {

namespace {

nlohmann::ordered_json hyper_json(const HyperPoint& hyper) {
    nlohmann::ordered_json j;
    if (hyper.is_k()) {
        j["k"] = hyper.k;
    } else if (std::isfinite(hyper.lam)) {
        j["lam"] = hyper.lam;
    }
    if (std::isfinite(hyper.eta)) j["eta"] = hyper.eta;
    return j;
}

}  // namespace

void write_report_json(const Report& report, const std::string& path) {
    nlohmann::ordered_json j;

    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    for (const auto& [key, value] : report.config) config[key] = value;
    j["config"] = config;

    j["coefficients"] = {
        {"beta", std::vector<double>(report.beta.begin(), report.beta.end())},
        {"gamma", std::vector<double>(report.gamma.begin(), report.gamma.end())},
    };
    j["support"] = {
        {"fixed", std::vector<int>(report.support_fixed.begin(), report.support_fixed.end())},
        {"random", std::vector<int>(report.support_random.begin(), report.support_random.end())},
    };

    nlohmann::ordered_json path_rows = nlohmann::ordered_json::array();
    for (const auto& row : report.path) {
        path_rows.push_back({
            {"hyper", hyper_json(row.hyper)},
            {"ic", row.ic},
            {"nnz_fixed", row.nnz_fixed},
            {"nnz_random", row.nnz_random},
        });
    }
    j["path"] = path_rows;

    j["solver"] = {
        {"iterations", report.solver.iterations},
        {"converged", report.solver.converged},
        {"final_residual", report.solver.final_residual},
    };

    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
}

}  // namespace mixedsel
