#include <cmath>
#include <limits>

#include <doctest.h>

#include "riskbias/asymptotics.hpp"
#include "riskbias/exact_bias.hpp"
#include "riskbias/vc_bound.hpp"

using namespace riskbias;

TEST_CASE("relative entropy values and conventions") {
    CHECK(relative_entropy(0.3, 0.3) == doctest::Approx(0.0).epsilon(1e-15));
    for (double p : {0.1, 0.4, 0.9}) {
        CHECK(relative_entropy(0.0, p) == doctest::Approx(-std::log1p(-p)).epsilon(1e-13));
    }
    // 0.1 ln(1/4) + 0.9 ln(3/2), cross-checked with high-precision arithmetic
    CHECK(relative_entropy(0.1, 0.4) == doctest::Approx(0.226289161185359).epsilon(1e-12));

    CHECK(relative_entropy(0.0, 0.0) == 0.0);
    CHECK(relative_entropy(1.0, 1.0) == 0.0);
    CHECK(std::isinf(relative_entropy(0.5, 0.0)));
    CHECK(std::isinf(relative_entropy(0.5, 1.0)));
    CHECK_THROWS_AS(relative_entropy(-0.1, 0.5), ArgumentError);

    // nonnegative, zero only at pt == p
    for (double pt : {0.0, 0.2, 0.5, 0.8}) {
        for (double p : {0.1, 0.5, 0.9}) {
            double h = relative_entropy(pt, p);
            CHECK(h >= 0.0);
            if (pt != p) CHECK(h > 0.0);
        }
    }
}

TEST_CASE("vc risk solve") {
    // closed form at e0 = 0: H(0, F) = -ln(1 - F) = 1/kappa
    for (double kappa : {0.5, 2.0, 7.2135}) {
        VcRisk r = vc_risk_bound(0.0, VcSetting{kappa});
        CHECK(!r.saturated);
        CHECK(r.risk == doctest::Approx(1.0 - std::exp(-1.0 / kappa)).epsilon(1e-9));
    }

    // solver residual on a grid
    for (double e0 : {0.0, 0.1, 0.3, 0.6}) {
        for (double kappa : {1.0, 5.0, 40.0}) {
            VcRisk r = vc_risk_bound(e0, VcSetting{kappa});
            if (!r.saturated) {
                CHECK(relative_entropy(e0, r.risk) ==
                      doctest::Approx(1.0 / kappa).epsilon(1e-9));
            }
            CHECK(r.risk >= e0);
        }
    }

    // zero complexity budget
    VcRisk flat = vc_risk_bound(0.25, VcSetting{std::numeric_limits<double>::infinity()});
    CHECK(flat.risk == 0.25);
    CHECK(!flat.saturated);

    // saturation: 1/kappa beyond any reachable entropy below the clamp
    VcRisk sat = vc_risk_bound(0.5, VcSetting{1e-4});
    CHECK(sat.saturated);
    CHECK(sat.risk == doctest::Approx(1.0).epsilon(1e-9));

    // monotone in 1/kappa at fixed e0
    double prev = 0.0;
    for (double invk : {0.01, 0.1, 0.5, 1.0, 2.0}) {
        double f = vc_risk_bound(0.2, VcSetting{1.0 / invk}).risk;
        CHECK(f > prev);
        prev = f;
    }

    CHECK_THROWS_AS(vc_risk_bound(1.0, VcSetting{1.0}), ArgumentError);
    CHECK_THROWS_AS(vc_risk_bound(0.1, VcSetting{0.0}), ArgumentError);
}

TEST_CASE("vc bias dominates the exact worst case at M = 5") {
    ProblemSize s(50, 10);
    CHECK(vc_bias(0.0, s) == doctest::Approx(1.0 - std::pow(2.0, -0.2)).epsilon(1e-9));

    double hi = attainable_empirical_risk(s).hi * 0.999;
    for (int i = 0; i <= 25; ++i) {
        double e0 = hi * i / 25;
        CHECK(vc_bias(e0, s) >= max_bias_exact(e0, s).bias);
        CHECK(vc_bias(e0, s) >= 0.0);
    }

    // vanishing complexity: kappa -> infinity means no optimism allowance
    CHECK(vc_risk_bound(0.2, VcSetting{1e12}).risk == doctest::Approx(0.2).epsilon(1e-5));
}
