#pragma once

#include <functional>
#include <string>
#include <vector>

namespace quadrix {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string measured;
    double seconds = 0.0;
    double time_limit = 0.0;
};

/// Suite names in criterion order.
const std::vector<std::string>& acceptance_suite_names();

CriterionResult run_criterion(int id, int jobs);

/// Runs the named suites (all when empty) and reports each result as it completes.
std::vector<CriterionResult> run_acceptance(const std::vector<std::string>& suites, int jobs,
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// One line: "PASS|FAIL <id> <name>: <measured> (<seconds>s, limit <limit>s)".
std::string format_result(const CriterionResult& r);

} // namespace quadrix
