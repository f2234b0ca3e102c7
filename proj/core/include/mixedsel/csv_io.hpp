#pragma once

#include <string>

#include "mixedsel/problem.hpp"

namespace mixedsel {

/// Long-format CSV contract: a `group` label column, a float `target`, an
/// optional `obs_std` (> 0, defaults to 1.0), fixed covariates prefixed `f_`
/// and random covariates prefixed `r_`. Header row required, UTF-8, commas.
struct CsvSchema {
    std::string group = "group";
    std::string target = "target";
    std::string obs_std = "obs_std";
    std::string fixed_prefix = "f_";
    std::string random_prefix = "r_";
};

/// Rows are gathered by group label in order of first appearance; rows of one
/// group need not be contiguous.
LMEProblem read_csv(const std::string& path, const CsvSchema& schema = {});

void write_csv(const LMEProblem& problem, const std::string& path,
               const CsvSchema& schema = {});

}  // namespace mixedsel
