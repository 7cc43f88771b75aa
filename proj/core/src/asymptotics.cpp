#include "riskbias/asymptotics.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "riskbias/exact_bias.hpp"
#include "riskbias/numeric.hpp"

namespace riskbias {

namespace {

constexpr double kTailMass = 1e-13;

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

enum class CellStat { Errors, Risk };

// sum_m B(m,n,p) * phi(m,n) for one occupancy n.
double binomial_cell_sum(int n, double p, CellStat stat) {
    if (p == 0.0 || p == 1.0) {
        int m = p == 0.0 ? 0 : n;
        return stat == CellStat::Errors ? erm_cell_errors(m, n) : erm_cell_risk(m, n, p);
    }
    const double lp = std::log(p);
    const double lq = std::log1p(-p);
    double lc = 0.0;  // log C(n, m), updated by recurrence in m
    KahanSum s;
    for (int m = 0; m <= n; ++m) {
        double w = std::exp(lc + m * lp + (n - m) * lq);
        double phi = stat == CellStat::Errors ? erm_cell_errors(m, n)
                                              : erm_cell_risk(m, n, p);
        s.add(w * phi);
        if (m < n) {
            lc += std::log(static_cast<double>(n - m)) - std::log(static_cast<double>(m + 1));
        }
    }
    return s.value();
}

double poisson_sum(double gamma, double p, CellStat stat) {
    if (!(gamma >= 0.0)) {
        throw ArgumentError("poisson cell expectation: gamma must be >= 0");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError("poisson cell expectation: p must be in [0, 1]");
    }
    if (gamma == 0.0) {
        return stat == CellStat::Errors ? 0.0 : 0.5;
    }
    double w = std::exp(-gamma);
    KahanSum total;
    KahanSum mass;
    int n = 0;
    while (true) {
        total.add(w * binomial_cell_sum(n, p, stat));
        mass.add(w);
        if (1.0 - mass.value() < kTailMass && n > gamma) break;
        ++n;
        w *= gamma / n;
        if (n > 500000) {
            throw InternalError("poisson cell expectation: truncation did not converge");
        }
    }
    return total.value();
}

}  // namespace

double poisson_cell_errors(double gamma, double p) {
    return poisson_sum(gamma, p, CellStat::Errors);
}

double poisson_cell_risk(double gamma, double p) {
    return poisson_sum(gamma, p, CellStat::Risk);
}

double cell_errors_breakpoint() {
    static const double zt = poisson_cell_errors(1.0, 0.5);
    return zt;
}

double noise_for_cell_errors(double z) {
    const double zt = cell_errors_breakpoint();
    if (z < -1e-12 || z > zt + 1e-12) {
        throw DomainError("noise_for_cell_errors: z = " + fmt(z) + " outside [0, " + fmt(zt) +
                              "]",
                          0.0, zt);
    }
    if (z <= 0.0) return 0.0;
    if (z >= zt) return 0.5;
    return bisect_increasing([](double p) { return poisson_cell_errors(1.0, p); }, 0.0, 0.5, z,
                             BisectOptions{1e-12, 200});
}

double occupancy_for_cell_errors(double z) {
    const double zt = cell_errors_breakpoint();
    if (z < zt - 1e-12) {
        throw DomainError("occupancy_for_cell_errors: z = " + fmt(z) + " below z_T = " + fmt(zt),
                          zt, std::numeric_limits<double>::infinity());
    }
    if (z <= zt) return 1.0;
    double hi = 2.0;
    while (poisson_cell_errors(hi, 0.5) < z) {
        hi *= 2.0;
        if (hi > 1e9) {
            throw InternalError("occupancy_for_cell_errors: bracket growth failed");
        }
    }
    return bisect_increasing([](double g) { return poisson_cell_errors(g, 0.5); }, hi / 2.0, hi,
                             z, BisectOptions{1e-12, 200});
}

double bias_kernel(double z) {
    if (z < -1e-12) {
        throw DomainError("bias_kernel: z must be >= 0", 0.0,
                          std::numeric_limits<double>::infinity());
    }
    if (z <= 0.0) return poisson_cell_risk(1.0, 0.0);
    if (z <= cell_errors_breakpoint()) {
        return poisson_cell_risk(1.0, noise_for_cell_errors(z));
    }
    return 0.5 * occupancy_for_cell_errors(z);
}

double bias_kernel_approx(double z) {
    if (z < -1e-12) {
        throw DomainError("bias_kernel_approx: z must be >= 0", 0.0,
                          std::numeric_limits<double>::infinity());
    }
    const double zt = cell_errors_breakpoint();
    const double half_inv_e = 0.5 * std::exp(-1.0);
    if (z <= zt) {
        return half_inv_e + (0.5 - half_inv_e) * std::max(z, 0.0) / zt;
    }
    // Invert t * (1 - sqrt(3) (1 - 2 z_T) / sqrt(1 + 4t)) = z for t >= 1/2.
    const double c = std::sqrt(3.0) * (1.0 - 2.0 * zt);
    auto inv = [&](double t) { return t * (1.0 - c / std::sqrt(1.0 + 4.0 * t)); };
    double hi = z / (2.0 * zt) + 1.0;
    return bisect_increasing(inv, 0.5, hi, z, BisectOptions{1e-12, 200});
}

double max_admissible_empirical_risk(double relative_size) {
    if (!(relative_size >= 1.0)) {
        throw ArgumentError("max_admissible_empirical_risk: need M >= 1");
    }
    return poisson_cell_errors(relative_size, 0.5) / relative_size;
}

double max_bias_asymptotic(double e0, double relative_size) {
    if (!(relative_size >= 1.0)) {
        throw ArgumentError("max_bias_asymptotic: need M >= 1");
    }
    if (e0 < 0.0) {
        throw ArgumentError("max_bias_asymptotic: need e0 >= 0");
    }
    const double edge = max_admissible_empirical_risk(relative_size);
    if (e0 > edge + 1e-12) {
        throw DomainError("max_bias_asymptotic: e0 = " + fmt(e0) +
                              " beyond admissible maximum " + fmt(edge),
                          0.0, edge);
    }
    return bias_kernel(relative_size * e0) / relative_size - e0;
}

}  // namespace riskbias
