#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cnls {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    /// Runtime budget in seconds; non-positive means none.
    double budget = 0.0;
    std::string summary;
    nlohmann::json detail;

    /// "[PASS]  3  Near-identity cubic scaling  (1.2 s)  slope=3.00".
    std::string line() const;
    nlohmann::json to_json() const;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240607;
    /// Criteria to run; empty runs all eleven.
    std::vector<int> only;
    /// Worker threads for independent sweep jobs.
    int threads = 1;
};

/// Runs the acceptance criteria in order, reporting each result as it completes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {},
                                            const std::function<void(const CriterionResult&)>& on_result = {});

/// Runs fn(0..n−1) on up to `threads` workers; results must be written to disjoint slots.
void parallel_for(int n, int threads, const std::function<void(int)>& fn);

}  // namespace cnls
