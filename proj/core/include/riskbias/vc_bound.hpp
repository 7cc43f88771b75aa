#pragma once

#include "riskbias/types.hpp"

namespace riskbias {

// Complexity setting kappa = N / ln|rule set|.
struct VcSetting {
    double kappa = 1.0;
    // Histogram classifier: 2^k rules, kappa = N / (k ln 2).
    static VcSetting histogram(const ProblemSize& size);
};

// Binary relative entropy pt*ln(pt/p) + (1-pt)*ln((1-pt)/(1-p)), with the
// 0*ln 0 = 0 convention; +inf when p in {0,1} and pt != p.
double relative_entropy(double pt, double p);

struct VcRisk {
    double risk = 0.0;
    // Set when 1/kappa exceeds the entropy reachable below the clamp at 1.
    bool saturated = false;
};

// Asymptotic VC risk estimate: the solution F >= e0 of H(e0, F) = 1/kappa.
VcRisk vc_risk_bound(double e0, const VcSetting& setting);

// VC bias estimate F_vc(e0) - e0 for the histogram setting.
double vc_bias(double e0, const ProblemSize& size);

}  // namespace riskbias
