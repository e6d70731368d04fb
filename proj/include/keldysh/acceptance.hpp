#pragma once

#include "keldysh/rotation.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace keldysh {

struct Check {
    std::string label;
    double value = 0.0;
    double limit = 0.0;
    bool pass = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<Check> checks;
    std::string error;  // set if the criterion threw
    bool pass() const;
};

struct AcceptanceOptions {
    std::uint64_t seed = 20261015;
    std::size_t mc_samples = 1000000;
    RotateFn rotate_fn;  // empty: the library rotation
    bool timing = true;  // enforce the wall-time budgets
};

inline constexpr int n_criteria = 11;

CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {});
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {});

// one line per criterion followed by its checks; no timings, so byte-stable for a fixed seed
std::string format_report(const std::vector<CriterionResult>& r);
bool all_pass(const std::vector<CriterionResult>& r);

}  // namespace keldysh
