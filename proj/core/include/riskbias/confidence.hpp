#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "riskbias/simulation.hpp"

namespace riskbias {

// Empirical functional the interval is built on.
enum class Functional { EmpiricalRisk, LeaveOneOut };

struct RunPair {
    double u = 0.0;     // empirical functional value
    double risk = 0.0;  // exact risk of the trained tree
};

struct MemberRuns {
    std::string family;
    double param = 0.0;
    std::vector<RunPair> runs;
};

// For each family member: reps independent train runs recording (u, R).
// Member i, replicate r draws from streams derived from (seed, i, r).
std::vector<MemberRuns> simulate_pairs(const ModelFamily& family, int n, int max_leaves,
                                       int reps, Functional functional, std::uint64_t seed,
                                       int threads = 1);

// Monotone step function u -> risk bound. Right-continuous: the value of the
// last breakpoint <= u applies; constant extrapolation beyond the ends.
struct EstimatingFunction {
    std::vector<double> breakpoints;  // strictly increasing
    std::vector<double> values;       // nondecreasing, within [0, 1]
    double operator()(double u) const;
};

void validate(const EstimatingFunction& fn);

// Builds the pointwise-minimal monotone step function on a fixed u-bin grid
// such that every member keeps coverage P(R <= fn(u)) >= eta on its runs.
// Starts from the global max R and greedily lowers bins, largest reduction
// first, keeping monotonicity and every member's constraint.
EstimatingFunction build_estimating_function(std::span<const MemberRuns> data, double eta,
                                             int bins = 50);

struct MemberCoverage {
    std::string family;
    double param = 0.0;
    double coverage = 0.0;
    double se = 0.0;  // binomial standard error
    int reps = 0;
};

struct CoverageReport {
    std::vector<MemberCoverage> members;
    double min_coverage = 1.0;
};

CoverageReport coverage_check(const EstimatingFunction& fn, std::span<const MemberRuns> data);

}  // namespace riskbias
