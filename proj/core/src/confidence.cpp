#include "riskbias/confidence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "riskbias/numeric.hpp"
#include "riskbias/parallel.hpp"
#include "riskbias/rng.hpp"

namespace riskbias {

std::vector<MemberRuns> simulate_pairs(const ModelFamily& family, int n, int max_leaves,
                                       int reps, Functional functional, std::uint64_t seed,
                                       int threads) {
    if (reps < 1) throw ArgumentError("simulate_pairs: reps must be >= 1");
    const std::vector<FamilyMember> members = family.members();
    std::vector<MemberRuns> out(members.size());
    for (std::size_t mi = 0; mi < members.size(); ++mi) {
        out[mi].family = members[mi].family;
        out[mi].param = members[mi].param;
        out[mi].runs.resize(reps);
        parallel_for(reps, threads, [&](int r) {
            std::vector<LabeledPoint> sample =
                sample_continuous(members[mi].model, n, substream(seed, mi, r));
            DecisionTree tree = train_tree(sample, max_leaves);
            double u = functional == Functional::LeaveOneOut
                           ? loo_tree(sample, max_leaves)
                           : training_error(tree, sample);
            out[mi].runs[r] = RunPair{u, tree_true_risk(members[mi].model, tree)};
        });
    }
    return out;
}

double EstimatingFunction::operator()(double u) const {
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), u);
    if (it == breakpoints.begin()) return values.front();
    return values[static_cast<std::size_t>(it - breakpoints.begin()) - 1];
}

void validate(const EstimatingFunction& fn) {
    if (fn.breakpoints.empty() || fn.breakpoints.size() != fn.values.size()) {
        throw ArgumentError("EstimatingFunction: breakpoints/values size mismatch");
    }
    for (std::size_t i = 1; i < fn.breakpoints.size(); ++i) {
        if (!(fn.breakpoints[i] > fn.breakpoints[i - 1])) {
            throw ArgumentError("EstimatingFunction: breakpoints must increase strictly");
        }
        if (fn.values[i] < fn.values[i - 1]) {
            throw ArgumentError("EstimatingFunction: values must be nondecreasing");
        }
    }
    for (double v : fn.values) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ArgumentError("EstimatingFunction: values must lie in [0, 1]");
        }
    }
}

namespace {

struct BinRun {
    double risk;
    int member;
    bool covered;
};

// Runs of one bin, sorted by descending risk.
struct Bin {
    std::vector<BinRun> runs;
    int first_covered = 0;  // entries before this index are permanently dropped
};

}  // namespace

EstimatingFunction build_estimating_function(std::span<const MemberRuns> data, double eta,
                                             int bins) {
    if (!(eta > 0.0 && eta < 1.0)) {
        throw ArgumentError("build_estimating_function: eta must be in (0, 1)");
    }
    if (bins < 1) throw ArgumentError("build_estimating_function: bins must be >= 1");
    if (data.empty()) throw ArgumentError("build_estimating_function: no members");

    double u_min = std::numeric_limits<double>::infinity();
    double u_max = -std::numeric_limits<double>::infinity();
    double r_max = 0.0;
    for (const MemberRuns& m : data) {
        if (m.runs.empty()) {
            throw ArgumentError("build_estimating_function: eta unattainable, member '" +
                                m.family + "' param " + std::to_string(m.param) +
                                " has no runs");
        }
        for (const RunPair& run : m.runs) {
            u_min = std::min(u_min, run.u);
            u_max = std::max(u_max, run.u);
            r_max = std::max(r_max, run.risk);
        }
    }

    EstimatingFunction fn;
    if (u_max <= u_min) {
        fn.breakpoints = {u_min};
    } else {
        const int b = bins;
        fn.breakpoints.resize(b);
        for (int j = 0; j < b; ++j) {
            fn.breakpoints[j] = u_min + (u_max - u_min) * j / b;
        }
    }
    const int nbins = static_cast<int>(fn.breakpoints.size());
    fn.values.assign(nbins, r_max);

    auto bin_of = [&](double u) {
        auto it = std::upper_bound(fn.breakpoints.begin(), fn.breakpoints.end(), u);
        if (it == fn.breakpoints.begin()) return 0;
        return static_cast<int>(it - fn.breakpoints.begin()) - 1;
    };

    const int nmembers = static_cast<int>(data.size());
    std::vector<Bin> bin_data(nbins);
    std::vector<int> covered(nmembers);
    std::vector<int> required(nmembers);
    for (int mi = 0; mi < nmembers; ++mi) {
        int reps = static_cast<int>(data[mi].runs.size());
        covered[mi] = reps;
        required[mi] = static_cast<int>(std::ceil(eta * reps - 1e-9));
        for (const RunPair& run : data[mi].runs) {
            bin_data[bin_of(run.u)].runs.push_back(BinRun{run.risk, mi, true});
        }
    }
    for (Bin& b : bin_data) {
        std::sort(b.runs.begin(), b.runs.end(),
                  [](const BinRun& a, const BinRun& c) { return a.risk > c.risk; });
    }

    // For bin j with floor lb: walk covered runs from the top, dropping equal-
    // risk groups while every member's slack allows, then settle on the
    // largest remaining covered risk (or lb). Returns the lowest feasible
    // value and the per-member drop counts.
    std::vector<int> drops(nmembers);
    auto lowest_feasible = [&](int j, double lb, std::vector<int>& drop_counts) -> double {
        std::fill(drop_counts.begin(), drop_counts.end(), 0);
        const Bin& b = bin_data[j];
        std::size_t i = b.first_covered;
        double newv = lb;
        std::vector<int> pending(nmembers, 0);
        while (i < b.runs.size()) {
            double r = b.runs[i].risk;
            if (r <= lb) break;  // staying >= lb keeps these covered anyway
            // group of equal risks
            std::size_t g = i;
            std::fill(pending.begin(), pending.end(), 0);
            while (g < b.runs.size() && b.runs[g].risk == r) {
                pending[b.runs[g].member] += 1;
                ++g;
            }
            bool ok = true;
            for (int mi = 0; mi < nmembers && ok; ++mi) {
                if (pending[mi] == 0) continue;
                ok = covered[mi] - drop_counts[mi] - pending[mi] >= required[mi];
            }
            if (!ok) {
                newv = r;  // this group must stay covered
                return std::max(newv, lb);
            }
            for (int mi = 0; mi < nmembers; ++mi) drop_counts[mi] += pending[mi];
            i = g;
        }
        if (i < b.runs.size()) newv = std::max(lb, b.runs[i].risk);
        return newv;
    };

    // Greedy: apply the single-bin lowering with the largest reduction until
    // no bin can move.
    while (true) {
        int best_j = -1;
        double best_newv = 0.0;
        double best_reduction = 1e-15;
        for (int j = 0; j < nbins; ++j) {
            double lb = j > 0 ? fn.values[j - 1] : 0.0;
            if (fn.values[j] <= lb) continue;
            double newv = lowest_feasible(j, lb, drops);
            double reduction = fn.values[j] - newv;
            if (reduction > best_reduction) {
                best_reduction = reduction;
                best_j = j;
                best_newv = newv;
            }
        }
        if (best_j < 0) break;
        // Every run above the new level is exactly the drop set found above.
        Bin& b = bin_data[best_j];
        std::size_t i = b.first_covered;
        while (i < b.runs.size() && b.runs[i].risk > best_newv) {
            covered[b.runs[i].member] -= 1;
            ++i;
        }
        b.first_covered = static_cast<int>(i);
        fn.values[best_j] = best_newv;
    }

    validate(fn);
    return fn;
}

CoverageReport coverage_check(const EstimatingFunction& fn, std::span<const MemberRuns> data) {
    validate(fn);
    CoverageReport report;
    report.members.reserve(data.size());
    for (const MemberRuns& m : data) {
        if (m.runs.empty()) {
            throw ArgumentError("coverage_check: member '" + m.family + "' has no runs");
        }
        int covered = 0;
        for (const RunPair& run : m.runs) {
            covered += run.risk <= fn(run.u) ? 1 : 0;
        }
        const int reps = static_cast<int>(m.runs.size());
        double cov = static_cast<double>(covered) / reps;
        double se = std::sqrt(cov * (1.0 - cov) / reps);
        report.members.push_back(MemberCoverage{m.family, m.param, cov, se, reps});
        report.min_coverage = std::min(report.min_coverage, cov);
    }
    return report;
}

}  // namespace riskbias
