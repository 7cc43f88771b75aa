#include <cmath>
#include <vector>

#include <doctest.h>

#include "riskbias/asymptotics.hpp"
#include "riskbias/exact_bias.hpp"

using namespace riskbias;

TEST_CASE("poisson cell expectations at the anchors") {
    for (double g : {0.5, 1.0, 3.0}) {
        CHECK(poisson_cell_errors(g, 0.0) == doctest::Approx(0.0).epsilon(1e-15));
    }
    // only the empty-cell term contributes at p = 0
    CHECK(poisson_cell_risk(1.0, 0.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-13));

    double zt = cell_errors_breakpoint();
    CHECK(std::abs(zt - 0.163) < 5e-4);
    CHECK(zt == doctest::Approx(0.163164988528).epsilon(1e-9));
}

TEST_CASE("inverse solves round trip") {
    double zt = cell_errors_breakpoint();
    CHECK(noise_for_cell_errors(0.0) == 0.0);
    CHECK(noise_for_cell_errors(zt) == 0.5);
    CHECK(occupancy_for_cell_errors(zt) == 1.0);
    for (double z : {0.02, 0.08, 0.15}) {
        double p = noise_for_cell_errors(z);
        CHECK(poisson_cell_errors(1.0, p) == doctest::Approx(z).epsilon(1e-9));
    }
    for (double z : {0.2, 0.3, 1.0, 5.0}) {
        double g = occupancy_for_cell_errors(z);
        CHECK(g >= 1.0);
        CHECK(poisson_cell_errors(g, 0.5) == doctest::Approx(z).epsilon(1e-9));
    }
    CHECK_THROWS_AS(noise_for_cell_errors(zt + 0.01), DomainError);
    CHECK_THROWS_AS(noise_for_cell_errors(-0.01), DomainError);
    CHECK_THROWS_AS(occupancy_for_cell_errors(zt - 0.01), DomainError);

    // monotonicity of the p = 1/2 curve in occupancy
    double prev = 0.0;
    for (double g = 1.0; g <= 32.0; g *= 2.0) {
        double v = poisson_cell_errors(g, 0.5);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("bias kernel values and continuity") {
    double zt = cell_errors_breakpoint();
    CHECK(bias_kernel(0.0) == doctest::Approx(0.5 * std::exp(-1.0)).epsilon(1e-13));
    // both branch formulas at the breakpoint
    double left = poisson_cell_risk(1.0, noise_for_cell_errors(zt));
    double right = 0.5 * occupancy_for_cell_errors(zt);
    CHECK(std::abs(left - 0.5) < 1e-9);
    CHECK(std::abs(right - 0.5) < 1e-9);
    CHECK(std::abs(left - right) < 1e-9);

    CHECK(bias_kernel(0.3) ==
          doctest::Approx(0.5 * occupancy_for_cell_errors(0.3)).epsilon(1e-12));

    // nondecreasing on a grid
    double zmax = poisson_cell_errors(8.0, 0.5);
    double prev = -1.0;
    for (int i = 0; i <= 400; ++i) {
        double v = bias_kernel(zmax * i / 400);
        CHECK(v >= prev - 1e-12);
        prev = v;
    }
}

TEST_CASE("asymptotic maximal bias curve") {
    const double half_inv_e = 0.5 * std::exp(-1.0);
    CHECK(max_bias_asymptotic(0.0, 1.0) == doctest::Approx(half_inv_e).epsilon(1e-12));
    CHECK(max_bias_asymptotic(0.0, 4.0) == doctest::Approx(half_inv_e / 4.0).epsilon(1e-12));

    // pointwise decreasing in M on the shared domain
    double common = max_admissible_empirical_risk(1.0) * 0.999;
    for (int i = 0; i <= 40; ++i) {
        double e0 = common * i / 40;
        double prev = 1e9;
        for (double m : {1.0, 2.0, 4.0, 8.0}) {
            double s = max_bias_asymptotic(e0, m);
            CHECK(s < prev + 1e-12);
            prev = s;
        }
    }

    CHECK_THROWS_AS(max_bias_asymptotic(0.8, 2.0), DomainError);
    try {
        max_bias_asymptotic(0.8, 2.0);
    } catch (const DomainError& e) {
        CHECK(e.admissible_hi() ==
              doctest::Approx(max_admissible_empirical_risk(2.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(max_bias_asymptotic(0.1, 0.5), ArgumentError);
}

TEST_CASE("closed-form kernel approximation") {
    const double zt = cell_errors_breakpoint();
    const double half_inv_e = 0.5 * std::exp(-1.0);
    CHECK(bias_kernel_approx(0.0) == doctest::Approx(half_inv_e).epsilon(1e-13));
    // the inverse closed form maps 1/2 back to z_T, so both sides meet at 0.5
    const double c = std::sqrt(3.0) * (1.0 - 2.0 * zt);
    CHECK(0.5 * (1.0 - c / std::sqrt(3.0)) == doctest::Approx(zt).epsilon(1e-13));
    CHECK(bias_kernel_approx(zt) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(bias_kernel_approx(zt + 1e-12) == doctest::Approx(0.5).epsilon(1e-7));

    // relative error <= 1% across the working grid
    double zmax = poisson_cell_errors(8.0, 0.5);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        double z = zmax * i / 999;
        double exact = bias_kernel(z);
        double approx = bias_kernel_approx(z);
        worst = std::max(worst, std::abs(approx - exact) / exact);
    }
    CHECK(worst <= 0.01);
    CHECK(worst == doctest::Approx(0.00811).epsilon(0.05));
}

TEST_CASE("auxiliary inverse-branch fit") {
    // 1 - 2 rho2(g)/g vs sqrt(3) (1 - 2 z_T) / sqrt(1 + 2g); exact at g = 1,
    // drifting to ~3.2% relative by g = 50 (survey-calibrated bounds)
    const double zt = cell_errors_breakpoint();
    const double c = std::sqrt(3.0) * (1.0 - 2.0 * zt);
    double worst_small = 0.0;
    double worst_full = 0.0;
    for (int i = 0; i <= 98; ++i) {
        double g = 1.0 + 49.0 * i / 98.0;
        double lhs = 1.0 - 2.0 * poisson_cell_errors(g, 0.5) / g;
        double rel = std::abs(lhs - c / std::sqrt(1.0 + 2.0 * g)) / lhs;
        if (g <= 8.0) worst_small = std::max(worst_small, rel);
        worst_full = std::max(worst_full, rel);
    }
    CHECK(worst_small <= 0.02);
    CHECK(worst_full <= 0.04);
}

TEST_CASE("poisson approximation tracks the exact binomial sums") {
    // tolerance fixed by a numeric survey: max gap 0.00688 at N=20, a=0.1, p=0
    double worst = 0.0;
    for (int n : {20, 50, 100}) {
        ProblemSize size(n, n);  // k unused by cell_expectation
        for (double alpha : {0.002, 0.01, 0.02, 0.04, 0.06, 0.08, 0.1}) {
            for (double p : {0.0, 0.25, 0.5}) {
                double mu_errors =
                    n * cell_expectation(CellParams{alpha, p}, size, CellFunction::EmpiricalRisk);
                double mu_risk =
                    cell_expectation(CellParams{alpha, p}, size, CellFunction::Risk) / alpha;
                double g = n * alpha;
                worst = std::max(worst, std::abs(poisson_cell_errors(g, p) - mu_errors));
                worst = std::max(worst, std::abs(poisson_cell_risk(g, p) - mu_risk));
            }
        }
    }
    CHECK(worst <= 0.0075);
    CHECK(worst == doctest::Approx(0.00688).epsilon(0.05));
}
