#include "riskbias/vc_bound.hpp"

#include <cmath>
#include <limits>

#include "riskbias/numeric.hpp"

namespace riskbias {

VcSetting VcSetting::histogram(const ProblemSize& size) {
    return VcSetting{size.n() / (size.k() * std::log(2.0))};
}

double relative_entropy(double pt, double p) {
    if (!(pt >= 0.0 && pt <= 1.0) || !(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError("relative_entropy: arguments must be in [0, 1]");
    }
    if (p == 0.0 || p == 1.0) {
        return pt == p ? 0.0 : std::numeric_limits<double>::infinity();
    }
    double h = 0.0;
    if (pt > 0.0) h += pt * std::log(pt / p);
    if (pt < 1.0) h += (1.0 - pt) * std::log((1.0 - pt) / (1.0 - p));
    return h;
}

VcRisk vc_risk_bound(double e0, const VcSetting& setting) {
    if (!(setting.kappa > 0.0)) {
        throw ArgumentError("vc_risk_bound: kappa must be positive");
    }
    if (!(e0 >= 0.0 && e0 < 1.0)) {
        throw ArgumentError("vc_risk_bound: need 0 <= e0 < 1");
    }
    const double target = 1.0 / setting.kappa;
    if (target == 0.0) return VcRisk{e0, false};
    const double f_hi = 1.0 - 1e-12;
    if (relative_entropy(e0, f_hi) < target) {
        return VcRisk{f_hi, true};
    }
    double f = bisect_increasing([&](double q) { return relative_entropy(e0, q); }, e0, f_hi,
                                 target, BisectOptions{1e-12, 200});
    return VcRisk{f, false};
}

double vc_bias(double e0, const ProblemSize& size) {
    return vc_risk_bound(e0, VcSetting::histogram(size)).risk - e0;
}

}  // namespace riskbias
