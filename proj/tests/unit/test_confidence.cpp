#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include <doctest.h>

#include "riskbias/confidence.hpp"
#include "riskbias/rng.hpp"

using namespace riskbias;

namespace {

ModelFamily section6_family(int points) {
    ModelFamily fam;
    fam.variant = ModelFamily::Variant::Section6;
    fam.dim = 2;
    fam.param_points = points;
    return fam;
}

MemberRuns constant_member(double u, double r, int reps) {
    MemberRuns m;
    m.family = "const";
    m.param = 0.0;
    m.runs.assign(reps, RunPair{u, r});
    return m;
}

}  // namespace

TEST_CASE("estimating function evaluation semantics") {
    EstimatingFunction fn;
    fn.breakpoints = {0.0, 0.1, 0.2};
    fn.values = {0.05, 0.2, 0.4};
    validate(fn);
    CHECK(fn(-1.0) == 0.05);  // constant extrapolation below
    CHECK(fn(0.0) == 0.05);
    CHECK(fn(0.05) == 0.05);
    CHECK(fn(0.1) == 0.2);  // right-continuous step
    CHECK(fn(0.15) == 0.2);
    CHECK(fn(5.0) == 0.4);  // constant extrapolation above

    EstimatingFunction bad = fn;
    bad.values = {0.3, 0.2, 0.4};
    CHECK_THROWS_AS(validate(bad), ArgumentError);
}

TEST_CASE("build: constant-risk member pins the function at that risk") {
    std::vector<MemberRuns> data = {constant_member(0.1, 0.3, 200)};
    for (double eta : {0.5, 0.9, 0.99}) {
        EstimatingFunction fn = build_estimating_function(data, eta);
        REQUIRE(fn.breakpoints.size() == 1);  // degenerate u range
        CHECK(fn.values[0] == doctest::Approx(0.3));
    }
}

TEST_CASE("build: near-one eta dominates per-bin maxima") {
    Rng rng(88);
    std::vector<MemberRuns> data(2);
    for (int mi = 0; mi < 2; ++mi) {
        data[mi].family = "synthetic";
        data[mi].param = mi;
        for (int r = 0; r < 100; ++r) {
            double u = rng.next_double();
            data[mi].runs.push_back(RunPair{u, 0.2 + 0.6 * rng.next_double()});
        }
    }
    // required coverage ceil(0.995 * 100) = 100: no run may be dropped
    EstimatingFunction fn = build_estimating_function(data, 0.995, 20);
    for (const MemberRuns& m : data) {
        for (const RunPair& run : m.runs) {
            CHECK(fn(run.u) >= run.risk);
        }
    }
}

TEST_CASE("build: coverage holds in-sample and the result is bin-minimal") {
    Rng rng(1234);
    const double eta = 0.9;
    std::vector<MemberRuns> data(3);
    for (int mi = 0; mi < 3; ++mi) {
        data[mi].family = "synthetic";
        data[mi].param = mi;
        for (int r = 0; r < 400; ++r) {
            double u = rng.next_double();
            double risk = std::min(1.0, 0.1 + 0.5 * u + 0.3 * rng.next_double() + 0.05 * mi);
            data[mi].runs.push_back(RunPair{u, risk});
        }
    }
    EstimatingFunction fn = build_estimating_function(data, eta, 25);
    validate(fn);
    CoverageReport report = coverage_check(fn, data);
    CHECK(report.min_coverage >= eta - 1e-12);

    // minimality: lowering any single bin to the next achievable level breaks
    // some member's in-sample coverage (or monotonicity forbids the move)
    for (std::size_t j = 0; j < fn.values.size(); ++j) {
        double lb = j > 0 ? fn.values[j - 1] : 0.0;
        if (fn.values[j] <= lb) continue;
        // candidate: largest achievable value strictly below the current one
        double cand = lb;
        for (const MemberRuns& m : data) {
            for (const RunPair& run : m.runs) {
                if (run.risk < fn.values[j] && run.risk > cand) cand = run.risk;
            }
        }
        EstimatingFunction lowered = fn;
        lowered.values[j] = cand;
        bool violated = false;
        for (const MemberRuns& m : data) {
            int covered = 0;
            for (const RunPair& run : m.runs) covered += run.risk <= lowered(run.u) ? 1 : 0;
            int required = static_cast<int>(std::ceil(eta * m.runs.size() - 1e-9));
            violated = violated || covered < required;
        }
        CHECK(violated);
    }
}

TEST_CASE("coverage_check degenerate functions") {
    std::vector<MemberRuns> data = {constant_member(0.2, 0.4, 50)};
    EstimatingFunction one;
    one.breakpoints = {0.0};
    one.values = {1.0};
    CHECK(coverage_check(one, data).min_coverage == doctest::Approx(1.0));

    EstimatingFunction zero;
    zero.breakpoints = {0.0};
    zero.values = {0.0};
    CoverageReport r = coverage_check(zero, data);
    CHECK(r.min_coverage == doctest::Approx(0.0));
    CHECK(r.members[0].reps == 50);
}

TEST_CASE("simulate_pairs: separable member, determinism, thread invariance") {
    ModelFamily fam = section6_family(1);  // single member, g' = 0
    std::vector<MemberRuns> runs = simulate_pairs(fam, 50, 3, 150, Functional::LeaveOneOut,
                                                  31337, 2);
    REQUIRE(runs.size() == 1);
    REQUIRE(runs[0].runs.size() == 150);
    double mean_u = 0.0;
    double mean_r = 0.0;
    for (const RunPair& run : runs[0].runs) {
        mean_u += run.u;
        mean_r += run.risk;
    }
    mean_u /= 150;
    mean_r /= 150;
    CHECK(mean_u < 0.05);
    CHECK(mean_r < 0.10);

    std::vector<MemberRuns> again = simulate_pairs(fam, 50, 3, 150, Functional::LeaveOneOut,
                                                   31337, 1);
    for (int r = 0; r < 150; ++r) {
        CHECK(runs[0].runs[r].u == again[0].runs[r].u);
        CHECK(runs[0].runs[r].risk == again[0].runs[r].risk);
    }
}

TEST_CASE("leave-one-out stays near the true risk for trees") {
    ModelFamily fam = section6_family(2);  // g' in {0, 0.5}
    std::vector<MemberRuns> runs =
        simulate_pairs(fam, 50, 3, 300, Functional::LeaveOneOut, 777, 2);
    const MemberRuns& noisy = runs[1];
    double mu = 0.0;
    double mr = 0.0;
    for (const RunPair& run : noisy.runs) {
        mu += run.u;
        mr += run.risk;
    }
    mu /= noisy.runs.size();
    mr /= noisy.runs.size();
    double su = 0.0;
    double sr = 0.0;
    for (const RunPair& run : noisy.runs) {
        su += (run.u - mu) * (run.u - mu);
        sr += (run.risk - mr) * (run.risk - mr);
    }
    int n = static_cast<int>(noisy.runs.size());
    su = std::sqrt(su / (n - 1)) / std::sqrt(double(n));
    sr = std::sqrt(sr / (n - 1)) / std::sqrt(double(n));
    CHECK(std::abs(mu - mr) <= 3 * (su + sr));
}

TEST_CASE("fresh-seed coverage validation on a reduced configuration") {
    ModelFamily fam = section6_family(5);
    const double eta = 0.9;
    std::vector<MemberRuns> fit =
        simulate_pairs(fam, 50, 3, 500, Functional::LeaveOneOut, 101, 2);
    EstimatingFunction fn = build_estimating_function(fit, eta);
    std::vector<MemberRuns> fresh =
        simulate_pairs(fam, 50, 3, 500, Functional::LeaveOneOut, 202, 2);
    CoverageReport report = coverage_check(fn, fresh);
    double se = std::sqrt(eta * (1 - eta) / 500.0);
    for (const MemberCoverage& m : report.members) {
        CHECK(m.coverage >= eta - 2 * se);
    }
}

TEST_CASE("build input validation") {
    std::vector<MemberRuns> data = {constant_member(0.1, 0.3, 50)};
    CHECK_THROWS_AS(build_estimating_function(data, 0.0), ArgumentError);
    CHECK_THROWS_AS(build_estimating_function(data, 1.0), ArgumentError);

    std::vector<MemberRuns> with_empty = data;
    MemberRuns empty;
    empty.family = "ghost";
    empty.param = 0.25;
    with_empty.push_back(empty);
    try {
        build_estimating_function(with_empty, 0.9);
        CHECK(false);
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
}
