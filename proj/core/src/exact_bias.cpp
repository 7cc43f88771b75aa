#include "riskbias/exact_bias.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "riskbias/numeric.hpp"

namespace riskbias {

namespace {

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", x);
    return buf;
}

// log n! for n = 0..nmax
std::vector<double> log_factorials(int nmax) {
    std::vector<double> lf(static_cast<std::size_t>(nmax) + 1, 0.0);
    for (int i = 2; i <= nmax; ++i) {
        lf[i] = lf[i - 1] + std::log(static_cast<double>(i));
    }
    return lf;
}

double pmf_from_table(const std::vector<double>& lf, int m, int n, double lp, double lq,
                      double p) {
    if (p == 0.0) return m == 0 ? 1.0 : 0.0;
    if (p == 1.0) return m == n ? 1.0 : 0.0;
    return std::exp(lf[n] - lf[m] - lf[n - m] + m * lp + (n - m) * lq);
}

}  // namespace

double binom_pmf(int m, int n, double p) {
    if (n < 0 || m < 0 || m > n) {
        throw ArgumentError("binom_pmf: need 0 <= m <= n");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError("binom_pmf: need 0 <= p <= 1");
    }
    if (p == 0.0) return m == 0 ? 1.0 : 0.0;
    if (p == 1.0) return m == n ? 1.0 : 0.0;
    double lc = std::lgamma(n + 1.0) - std::lgamma(m + 1.0) - std::lgamma(n - m + 1.0);
    return std::exp(lc + m * std::log(p) + (n - m) * std::log1p(-p));
}

int erm_cell_errors(int m, int n) {
    if (n < 0 || m < 0 || m > n) {
        throw ArgumentError("erm_cell_errors: need 0 <= m <= n");
    }
    return std::min(m, n - m);
}

double erm_cell_risk(int m, int n, double p) {
    if (n < 0 || m < 0 || m > n) {
        throw ArgumentError("erm_cell_risk: need 0 <= m <= n");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ArgumentError("erm_cell_risk: need 0 <= p <= 1");
    }
    if (m > n - m) return 1.0 - p;
    if (m < n - m) return p;
    return 0.5;
}

void validate(const HistogramDistribution& dist) {
    if (dist.cells.empty()) {
        throw ArgumentError("HistogramDistribution: no cells");
    }
    KahanSum mass;
    for (const CellParams& c : dist.cells) {
        if (!(c.alpha >= 0.0 && c.alpha <= 1.0)) {
            throw ArgumentError("HistogramDistribution: cell mass out of [0,1]");
        }
        if (!(c.p >= 0.0 && c.p <= 1.0)) {
            throw ArgumentError("HistogramDistribution: cell p out of [0,1]");
        }
        mass.add(c.alpha);
    }
    if (std::abs(mass.value() - 1.0) > 1e-12) {
        throw ArgumentError("HistogramDistribution: cell masses sum to " + fmt(mass.value()) +
                            ", expected 1 within 1e-12");
    }
}

int SampleCounts::total() const {
    int t = 0;
    for (const CellCounts& c : cells) t += c.total;
    return t;
}

void validate(const SampleCounts& counts, const ProblemSize& size) {
    if (static_cast<int>(counts.cells.size()) != size.k()) {
        throw ArgumentError("SampleCounts: cell count mismatch");
    }
    for (const CellCounts& c : counts.cells) {
        if (c.class1 < 0 || c.total < 0 || c.class1 > c.total) {
            throw ArgumentError("SampleCounts: need 0 <= m <= n per cell");
        }
    }
    if (counts.total() != size.n()) {
        throw ArgumentError("SampleCounts: totals do not sum to N");
    }
}

double cell_expectation(const CellParams& cell, const ProblemSize& size, CellFunction fn) {
    if (!(cell.alpha >= 0.0 && cell.alpha <= 1.0) || !(cell.p >= 0.0 && cell.p <= 1.0)) {
        throw ArgumentError("cell_expectation: cell parameters out of range");
    }
    const int N = size.n();
    const double alpha = cell.alpha;
    const double p = cell.p;
    const std::vector<double> lf = log_factorials(N);
    const double la = alpha > 0.0 ? std::log(alpha) : 0.0;
    const double lb = alpha < 1.0 ? std::log1p(-alpha) : 0.0;
    const double lp = p > 0.0 ? std::log(p) : 0.0;
    const double lq = p < 1.0 ? std::log1p(-p) : 0.0;

    KahanSum outer;
    for (int n = 0; n <= N; ++n) {
        double wn = pmf_from_table(lf, n, N, la, lb, alpha);
        if (wn == 0.0) continue;
        KahanSum inner;
        for (int m = 0; m <= n; ++m) {
            double wm = pmf_from_table(lf, m, n, lp, lq, p);
            if (wm == 0.0) continue;
            double phi;
            switch (fn) {
                case CellFunction::EmpiricalRisk:
                    phi = static_cast<double>(erm_cell_errors(m, n)) / N;
                    break;
                case CellFunction::Risk:
                    phi = alpha * erm_cell_risk(m, n, p);
                    break;
                case CellFunction::Bias:
                default:
                    phi = alpha * erm_cell_risk(m, n, p) -
                          static_cast<double>(erm_cell_errors(m, n)) / N;
                    break;
            }
            inner.add(wm * phi);
        }
        outer.add(wn * inner.value());
    }
    return outer.value();
}

double expected_empirical_risk(const HistogramDistribution& dist, const ProblemSize& size) {
    validate(dist);
    KahanSum s;
    for (const CellParams& c : dist.cells) {
        s.add(cell_expectation(c, size, CellFunction::EmpiricalRisk));
    }
    return s.value();
}

double expected_risk(const HistogramDistribution& dist, const ProblemSize& size) {
    validate(dist);
    KahanSum s;
    for (const CellParams& c : dist.cells) {
        s.add(cell_expectation(c, size, CellFunction::Risk));
    }
    return s.value();
}

BiasPoint bias(const HistogramDistribution& dist, const ProblemSize& size) {
    double e = expected_empirical_risk(dist, size);
    double f = expected_risk(dist, size);
    return BiasPoint{e, f - e, f};
}

namespace {

double mu_empirical(double alpha, double p, const ProblemSize& size) {
    return cell_expectation(CellParams{alpha, p}, size, CellFunction::EmpiricalRisk);
}

double mu_bias(double alpha, double p, const ProblemSize& size) {
    return cell_expectation(CellParams{alpha, p}, size, CellFunction::Bias);
}

}  // namespace

double empirical_risk_threshold(const ProblemSize& size) {
    return (size.k() - 1) * mu_empirical(1.0 / size.n(), 0.5, size);
}

Interval attainable_empirical_risk(const ProblemSize& size) {
    if (size.k() == 1) return Interval{0.0, 0.0};
    double amax = 1.0 / (size.k() - 1);
    return Interval{0.0, (size.k() - 1) * mu_empirical(amax, 0.5, size)};
}

Interval envelope_domain(const ProblemSize& size) {
    return Interval{0.0, size.k() * mu_empirical(1.0 / size.k(), 0.5, size)};
}

double envelope_at(const ProblemSize& size, double z) {
    const int k = size.k();
    const double aN = 1.0 / size.n();
    const double ak = 1.0 / k;
    const Interval dom = envelope_domain(size);
    if (!dom.contains(z)) {
        throw DomainError("envelope: z = " + fmt(z) + " outside attainable [" + fmt(dom.lo) +
                              ", " + fmt(dom.hi) + "]",
                          dom.lo, dom.hi);
    }
    z = std::min(std::max(z, dom.lo), dom.hi);
    const double z_join = k * mu_empirical(aN, 0.5, size);
    if (z <= z_join) {
        double p = bisect_increasing([&](double q) { return k * mu_empirical(aN, q, size); },
                                     0.0, 0.5, z);
        return k * mu_bias(aN, p, size);
    }
    double a = bisect_increasing([&](double q) { return k * mu_empirical(q, 0.5, size); }, aN,
                                 ak, z);
    return k * mu_bias(a, 0.5, size);
}

BiasCurve envelope(const ProblemSize& size, std::span<const double> z_grid) {
    BiasCurve curve;
    curve.reserve(z_grid.size());
    for (double z : z_grid) {
        double zeta = envelope_at(size, z);
        curve.push_back(BiasPoint{z, zeta, z + zeta});
    }
    return curve;
}

HistogramDistribution worst_distribution(double e0, const ProblemSize& size) {
    const int k = size.k();
    const Interval range = attainable_empirical_risk(size);
    if (!range.contains(e0)) {
        throw DomainError("worst_distribution: e0 = " + fmt(e0) + " outside attainable [" +
                              fmt(range.lo) + ", " + fmt(range.hi) + "]",
                          range.lo, range.hi);
    }
    e0 = std::min(std::max(e0, range.lo), range.hi);

    HistogramDistribution dist;
    if (k == 1) {
        dist.cells = {CellParams{1.0, 0.0}};
        return dist;
    }
    const double aN = 1.0 / size.n();
    const double eT = empirical_risk_threshold(size);
    double ap;
    double pp;
    if (e0 <= eT) {
        ap = aN;
        pp = bisect_increasing(
            [&](double q) { return (k - 1) * mu_empirical(aN, q, size); }, 0.0, 0.5, e0);
    } else {
        pp = 0.5;
        ap = bisect_increasing(
            [&](double q) { return (k - 1) * mu_empirical(q, 0.5, size); }, aN,
            1.0 / (k - 1), e0);
    }
    dist.cells.assign(k - 1, CellParams{ap, pp});
    dist.cells.push_back(CellParams{std::max(0.0, 1.0 - (k - 1) * ap), 0.0});
    return dist;
}

BiasPoint max_bias_exact(double e0, const ProblemSize& size) {
    BiasPoint pt = bias(worst_distribution(e0, size), size);
    if (pt.empirical_risk < -1e-12 || pt.expected_risk < pt.empirical_risk - 1e-12 ||
        pt.expected_risk > 0.5 + 1e-12) {
        throw InternalError("max_bias_exact: worst-case point out of [0, 0.5] ordering");
    }
    return pt;
}

}  // namespace riskbias
